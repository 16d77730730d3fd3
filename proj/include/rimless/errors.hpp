#pragma once

#include <stdexcept>
#include <string>

namespace rimless {

/// Coupler endpoints coincide; the coupler angle is undefined.
class DegenerateGeometry : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN or infinity produced during integration.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Section data do not excite every direction of the return map.
class RankDeficient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rimless
