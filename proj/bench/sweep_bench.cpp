// Times the OpenMP sweep against the serial reference on a small grid.
#include <chrono>
#include <cstdio>
#include <sstream>

#include <CLI11.hpp>
#include <omp.h>

#include "rimless/io.hpp"
#include "rimless/sweep.hpp"

using namespace rimless;

int main(int argc, char** argv) {
  CLI::App app{"Serial vs parallel coupler sweep timing"};
  int nk = 4, nb = 4, trials = 4, workers = omp_get_max_threads();
  double t_max = 200.0;
  app.add_option("--nk", nk);
  app.add_option("--nb", nb);
  app.add_option("--trials", trials);
  app.add_option("--t-max", t_max);
  app.add_option("--workers", workers);
  CLI11_PARSE(app, argc, argv);

  NondimParams scenario;
  const SweepGrid grid = SweepGrid::log_spaced(scenario, 1e-4, 1e-2, nk, 1e-1, 1e1, nb);
  const auto seeds = default_initial_conditions(scenario, trials);
  IntegratorConfig cfg;
  cfg.t_max = t_max;

  auto timed = [](auto&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto out = f();
    return std::make_pair(std::move(out),
                          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  };
  const auto [serial, ts] = timed([&] { return run_sweep_serial(grid, seeds, cfg); });
  const auto [parallel, tp] = timed([&] { return run_sweep(grid, seeds, cfg, workers); });

  std::ostringstream a, b;
  write_sweep_csv(a, serial);
  write_sweep_csv(b, parallel);
  const bool same = a.str() == b.str();
  std::printf("grid %dx%d, %d seeds, t_max %g\n", nk, nb, trials, t_max);
  std::printf("serial   %8.3f s\n", ts);
  std::printf("parallel %8.3f s  (%d workers, speedup %.2fx)\n", tp, workers, ts / tp);
  std::printf("outputs %s\n", same ? "identical" : "DIFFER");
  return same ? 0 : 1;
}
