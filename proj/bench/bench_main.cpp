// Wall-clock timings of the main kernels and of the trial runners.
// Usage: mtlab_bench [--reps N] [--workers W]

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mtlab/experiments.hpp"
#include "mtlab/greedy_multitree.hpp"
#include "mtlab/matroid_intersect.hpp"
#include "mtlab/parallel.hpp"
#include "mtlab/rng.hpp"

using namespace mtlab;

namespace {

using Clock = std::chrono::steady_clock;

void report(const std::string& name, std::size_t reps, const std::function<std::size_t(std::size_t)>& body) {
  std::size_t sink = 0;
  const auto start = Clock::now();
  for (std::size_t r = 0; r < reps; ++r) sink += body(r);
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  std::printf("%-34s reps=%-4zu total=%10.1f ms  per=%9.3f ms  (check %zu)\n", name.c_str(), reps, ms,
              ms / static_cast<double>(reps), sink);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mtlab kernel benchmarks"};
  std::size_t reps = 5;
  std::size_t workers = 0;
  app.add_option("--reps", reps, "repetitions per kernel")->check(CLI::PositiveNumber);
  app.add_option("--workers", workers, "workers for the parallel runner (0: default)");
  CLI11_PARSE(app, argc, argv);
  workers = resolve_workers(workers);

  report("tuple stream n=2000 s=3, 1e5 rows", reps, [](std::size_t r) {
    TupleStream ts = TupleStream::generate(2000, 3, mix_seed(1, r));
    ts.ensure(100000);
    return ts.available();
  });
  report("exact m* n=400", reps, [](std::size_t r) {
    TupleStream ts = TupleStream::generate(400, 2, mix_seed(2, r));
    return exact_mstar(ts).m_star;
  });
  report("phase 1 to half giant n=10^4 s=2", reps, [](std::size_t r) {
    TupleStream ts = TupleStream::generate(10000, 2, mix_seed(3, r));
    ts.set_sparse_backing(true);
    return phase1(ts, StopRule::giant_half()).state.steps();
  });
  report("build multitree n=400 s=2", reps, [](std::size_t r) {
    TupleStream ts = TupleStream::generate(400, 2, mix_seed(4, r));
    return build_multitree(ts).m_used;
  });

  ExperimentConfig config;
  config.kind = ExperimentKind::kHittingTime;
  config.n_grid = {200};
  config.trials = 16;
  config.seed = 5;
  for (std::size_t w : {std::size_t{1}, workers}) {
    config.workers = w;
    report("hitting-time 16 trials, workers=" + std::to_string(w), 1,
           [&](std::size_t) { return run_experiment(config).records.rows.size(); });
  }
  return 0;
}
