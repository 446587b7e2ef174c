// One PASS/FAIL line per acceptance criterion. Optional arguments select
// criteria by number; the default runs all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtlab/experiments.hpp"
#include "mtlab/greedy_multitree.hpp"
#include "mtlab/matroid_intersect.hpp"
#include "mtlab/rng.hpp"
#include "mtlab/spread_count.hpp"

using namespace mtlab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, value);
  return buf;
}

ExperimentConfig config_for(ExperimentKind kind, std::vector<std::size_t> n_grid, std::size_t trials,
                            std::uint64_t seed) {
  ExperimentConfig c;
  c.kind = kind;
  c.n_grid = std::move(n_grid);
  c.trials = trials;
  c.seed = seed;
  return c;
}

double cell(const Table& t, std::size_t row, const std::string& column) {
  return std::stod(t.rows[row][t.column(column)]);
}

// Shared by criteria 1 and 2.
const ExperimentResult& hitting_runs() {
  static const ExperimentResult result =
      run_hitting_time(config_for(ExperimentKind::kHittingTime, {100, 200, 400}, 200, 2024));
  return result;
}

Verdict criterion1() {
  const ExperimentResult& r = hitting_runs();
  std::size_t bad = 0;
  for (std::size_t i = 0; i < r.records.rows.size(); ++i) bad += cell(r.records, i, "lower_ok") == 0;
  return {bad == 0, std::to_string(r.records.rows.size()) + " trials over n in {100,200,400}, " +
                        std::to_string(bad) + " with m* < max(m1,m2)"};
}

Verdict criterion2() {
  const ExperimentResult& r = hitting_runs();
  const double rate100 = cell(r.summary, 0, "equality_rate");
  const double rate200 = cell(r.summary, 1, "equality_rate");
  const double rate400 = cell(r.summary, 2, "equality_rate");
  return {rate200 >= 0.9 && rate400 >= rate100 - 0.05,
          "equality rate n=100 " + fmt("%.3f", rate100) + ", n=200 " + fmt("%.3f", rate200) + " (>= 0.9), n=400 " +
              fmt("%.3f", rate400)};
}

std::size_t brute_common(const IntersectionInstance& inst) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << inst.size()); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size <= best) continue;
    DisjointSets a(inst.n), b(inst.n);
    bool ok = true;
    for (std::size_t i = 0; i < inst.size() && ok; ++i) {
      if (mask >> i & 1) ok = a.unite(inst.first[i]) && b.unite(inst.second[i]);
    }
    if (ok) best = size;
  }
  return best;
}

std::size_t brute_kappa(const IntersectionInstance& inst) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << inst.size()); ++mask) {
    DisjointSets a(inst.n), b(inst.n);
    for (std::size_t i = 0; i < inst.size(); ++i) {
      if (mask >> i & 1) a.unite(inst.first[i]);
      else b.unite(inst.second[i]);
    }
    best = std::max(best, a.component_count() + b.component_count());
  }
  return best;
}

Verdict criterion3() {
  Rng rng(3);
  std::size_t mismatches = 0;
  std::size_t dual_mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + uniform_below(rng, 5);
    TupleStream ts = TupleStream::generate(n, 2, mix_seed(3, static_cast<std::uint64_t>(trial)));
    const std::size_t m = std::min<std::size_t>(ts.total(), 1 + uniform_below(rng, 14));
    const auto inst = IntersectionInstance::from_stream(ts, m);
    const std::size_t rank = max_common_forest(inst).rank();
    mismatches += rank != brute_common(inst);
    dual_mismatches += rank != 2 * n - brute_kappa(inst);
  }
  return {mismatches == 0 && dual_mismatches == 0,
          "1000 instances n<=6 m<=14: " + std::to_string(mismatches) + " rank mismatches, " +
              std::to_string(dual_mismatches) + " duality mismatches"};
}

const ExperimentResult& spread_runs() {
  static const ExperimentResult result =
      run_spread_verify(config_for(ExperimentKind::kSpreadVerify, {1}, 1, 1));
  return result;
}

Verdict family_verdict(const std::set<std::string>& families) {
  const ExperimentResult& r = spread_runs();
  std::size_t rows = 0;
  std::size_t failed = 0;
  std::uint64_t checked = 0;
  for (std::size_t i = 0; i < r.records.rows.size(); ++i) {
    if (!families.count(r.records.rows[i][r.records.column("family")])) continue;
    ++rows;
    failed += cell(r.records, i, "pass") == 0;
    checked += static_cast<std::uint64_t>(cell(r.records, i, "checked"));
  }
  return {rows > 0 && failed == 0, std::to_string(rows) + " checks (" + std::to_string(checked) +
                                       " items), " + std::to_string(failed) + " failed"};
}

Verdict criterion4() {
  Verdict v = family_verdict({"formula"});
  v.detail = "all size configs n0<=3 s<=3 t<=3: " + v.detail;
  return v;
}

Verdict criterion5() {
  Verdict v = family_verdict({"spread", "negative_control"});
  v.detail = "kappa=(n0/3)^(s-1), n0 3..6, s 2..3, plus kappa=10 control: " + v.detail;
  return v;
}

Verdict criterion6() {
  bool pass = true;
  std::string detail;
  for (std::size_t s : {2u, 3u}) {
    ExperimentConfig c = config_for(ExperimentKind::kThresholdScan, {100, 200, 400, 800}, 50, 6);
    c.s = s;
    const ExperimentResult r = run_threshold_scan(c);
    double lo = INFINITY, hi = 0;
    std::size_t failures = 0;
    detail += "s=" + std::to_string(s) + " median ratio";
    for (std::size_t i = 0; i < r.summary.rows.size(); ++i) {
      const double median = cell(r.summary, i, "ratio_median");
      failures += static_cast<std::size_t>(cell(r.summary, i, "trials") - cell(r.summary, i, "successes"));
      lo = std::min(lo, median);
      hi = std::max(hi, median);
      detail += " " + fmt("%.2f", median);
    }
    const bool ok = failures == 0 && r.violations == 0 && hi < 2 * lo;
    detail += " (spread " + fmt("%.2f", hi / lo) + "x, " + std::to_string(failures) + " failures)" +
              (ok ? "; " : " FAIL; ");
    pass = pass && ok;
  }
  return {pass, detail};
}

bool forests_consistent(const MultiForestState& state) {
  for (const DisjointSets& f : state.forests) {
    if (f.component_count() != state.n - state.steps()) return false;
  }
  return true;
}

Verdict criterion7() {
  std::size_t checks = 0;
  std::size_t bad = 0;
  for (std::size_t n : {10u, 50u, 100u, 200u}) {
    for (std::size_t s : {1u, 2u, 3u}) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        TupleStream ts = TupleStream::generate(n, s, mix_seed(7, seed));
        MultiForestState state(n, s);
        while (phase1_step(state, ts)) {
          ++checks;
          bad += !forests_consistent(state);
        }
      }
    }
  }
  const std::size_t exhaustive = checks;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    TupleStream ts = TupleStream::generate(10000, 2, mix_seed(77, seed));
    ts.set_sparse_backing(true);
    MultiForestState state(10000, 2);
    Rng pick(seed);
    while (2 * state.min_giant() < 10000 && phase1_step(state, ts)) {
      if (uniform_below(pick, 50) == 0) {
        ++checks;
        bad += !forests_consistent(state);
      }
    }
    ++checks;
    bad += !forests_consistent(state);
  }
  return {bad == 0, std::to_string(exhaustive) + " steps checked at n<=200, " +
                        std::to_string(checks - exhaustive) + " sampled at n=10^4, " + std::to_string(bad) +
                        " inconsistent"};
}

Verdict criterion8() {
  double lo = 1.0 + 1e-12, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (giant_fraction(mid) < 0.5 ? lo : hi) = mid;
  }
  const double c0 = solve_c0();
  const double err = std::abs(c0 - 2 * std::log(2.0));
  return {err < 1e-9 && std::abs(c0 - 0.5 * (lo + hi)) < 1e-9,
          "solve_c0 = " + fmt("%.12f", c0) + ", |c0 - 2 ln 2| = " + fmt("%.2e", err)};
}

Verdict criterion9() {
  ExperimentConfig c = config_for(ExperimentKind::kStructureAudit, {10000}, 50, 9);
  c.audit.lemmas = {"a(b)", "b(b)", "g(a)", "g(b)"};
  const ExperimentResult r = run_structure_audit(c);
  std::string detail;
  for (std::size_t i = 0; i < r.summary.rows.size(); ++i) {
    detail += r.summary.rows[i][r.summary.column("lemma")] + " pass/violation/vacuous " +
              r.summary.rows[i][r.summary.column("passes")] + "/" + r.summary.rows[i][r.summary.column("violations")] +
              "/" + r.summary.rows[i][r.summary.column("vacuous")] + "; ";
  }
  return {r.violations == 0, detail + "n=10^4, 50 trials x 11 grid points"};
}

Verdict criterion10() {
  ExperimentConfig c = config_for(ExperimentKind::kMultimatchingScan, {100, 200, 400}, 20, 10);
  c.scheme = SchemeMode::kBisect;
  c.factors = {8.0};
  const ExperimentResult r = run_multimatching_scan(c);
  bool pass = r.violations == 0;
  std::string detail;
  for (std::size_t i = 0; i < r.summary.rows.size(); ++i) {
    const double rate = cell(r.summary, i, "successes") / cell(r.summary, i, "trials");
    pass = pass && rate >= 0.95;
    detail += "n=" + r.summary.rows[i][0] + " success " + fmt("%.2f", rate) + "; ";
  }
  std::size_t kept = 0;
  for (std::size_t i = 0; i < r.records.rows.size(); ++i) kept += static_cast<std::size_t>(cell(r.records, i, "kept"));
  detail += "mean kept " + fmt("%.0f", static_cast<double>(kept) / static_cast<double>(r.records.rows.size())) +
            ", unverified successes " + std::to_string(r.violations);
  return {pass, detail};
}

std::string csv_without_wall(const Table& t) {
  std::ostringstream out;
  write_csv(out, t, false);
  return out.str();
}

Verdict criterion11() {
  std::vector<ExperimentConfig> configs;
  configs.push_back(config_for(ExperimentKind::kHittingTime, {40, 80}, 6, 11));
  configs.push_back(config_for(ExperimentKind::kThresholdScan, {40, 80}, 6, 11));
  configs.push_back(config_for(ExperimentKind::kSpreadVerify, {1}, 1, 11));
  configs.push_back(config_for(ExperimentKind::kStructureAudit, {300}, 3, 11));
  configs.back().audit.grid_points = 3;
  configs.push_back(config_for(ExperimentKind::kMultimatchingScan, {40, 60}, 4, 11));
  configs.back().factors = {1, 2};
  std::size_t differing = 0;
  for (ExperimentConfig c : configs) {
    std::vector<std::string> outputs;
    for (std::size_t workers : {1u, 1u, 4u}) {
      c.workers = workers;
      const ExperimentResult r = run_experiment(c);
      outputs.push_back(csv_without_wall(r.records) + csv_without_wall(r.summary));
    }
    differing += outputs[0] != outputs[1] || outputs[0] != outputs[2];
  }
  return {differing == 0, "5 experiment kinds, serial twice and 4 workers: " + std::to_string(differing) +
                              " with differing CSV"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Verdict()>> criteria{criterion1, criterion2, criterion3,  criterion4,
                                                       criterion5, criterion6, criterion7,  criterion8,
                                                       criterion9, criterion10, criterion11};
  std::set<std::size_t> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoul(argv[i]));
  std::size_t failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (!selected.empty() && !selected.count(k + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    const Verdict v = criteria[k]();
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("CRITERION %zu %s: %s [%.1fs]\n", k + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str(), seconds);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
