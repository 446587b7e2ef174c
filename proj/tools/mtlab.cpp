#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "mtlab/experiments.hpp"
#include "mtlab/matroid_intersect.hpp"
#include "mtlab/plot.hpp"
#include "mtlab/tuple_stream.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitViolations = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by every experiment command; each maps onto a config key.
struct ExperimentFlags {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_override(CLI::App* cmd, ExperimentFlags& flags, const std::string& key, const std::string& help) {
  cmd->add_option_function<std::string>(
      "--" + key, [&flags, key](const std::string& v) { flags.overrides[key] = v; }, help);
}

ExperimentFlags& add_experiment(CLI::App& app, std::map<CLI::App*, std::pair<mtlab::ExperimentKind, ExperimentFlags>>& commands,
                                mtlab::ExperimentKind kind, const std::string& description) {
  CLI::App* cmd = app.add_subcommand(mtlab::to_string(kind), description);
  auto& [k, flags] = commands[cmd];
  k = kind;
  cmd->add_option("--config", flags.config_path, "key = value config file");
  add_override(cmd, flags, "n", "comma-separated n grid");
  add_override(cmd, flags, "s", "coordinates per tuple");
  add_override(cmd, flags, "trials", "trials per n");
  add_override(cmd, flags, "seed", "master seed");
  add_override(cmd, flags, "workers", "worker threads (default MTLAB_WORKERS)");
  add_override(cmd, flags, "out", "output prefix for .records.csv / .summary.csv");
  add_override(cmd, flags, "json", "also write JSON mirrors (true/false)");
  return flags;
}

mtlab::ExperimentConfig load_config(mtlab::ExperimentKind kind, const ExperimentFlags& flags) {
  mtlab::ExperimentConfig config;
  try {
    if (!flags.config_path.empty()) {
      std::ifstream in(flags.config_path);
      if (!in) throw UsageError("cannot read config " + flags.config_path);
      config = mtlab::parse_config(in);
      if (config.kind != kind) {
        throw UsageError("config is for " + mtlab::to_string(config.kind) + ", not " + mtlab::to_string(kind));
      }
    }
    config.kind = kind;
    for (const auto& [key, value] : flags.overrides) mtlab::apply_setting(config, key, value);
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return config;
}

int run_experiment_command(mtlab::ExperimentKind kind, const ExperimentFlags& flags) {
  const mtlab::ExperimentConfig config = load_config(kind, flags);
  const mtlab::ExperimentResult result = mtlab::run_experiment(config);
  for (const auto& note : result.notes) std::cerr << note << '\n';
  if (config.out.empty()) {
    mtlab::write_csv(std::cout, result.summary);
  } else {
    for (const auto& path : mtlab::write_outputs(config, result)) std::cerr << "wrote " << path << '\n';
  }
  std::cerr << mtlab::to_string(kind) << ": " << result.records.rows.size() << " records, " << result.violations
            << " violations\n";
  return result.violations == 0 ? kExitPass : kExitViolations;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw UsageError("cannot write " + path);
  return file;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitree and multimatching experiments on random tuple streams"};
  app.require_subcommand(1);

  std::map<CLI::App*, std::pair<mtlab::ExperimentKind, ExperimentFlags>> commands;
  add_experiment(app, commands, mtlab::ExperimentKind::kHittingTime, "m* against max(m1, m2) for s = 2");
  add_experiment(app, commands, mtlab::ExperimentKind::kThresholdScan, "greedy multitree cost m_used/(n ln n)");
  add_experiment(app, commands, mtlab::ExperimentKind::kSpreadVerify, "counting formula and spread checks");
  ExperimentFlags& audit = add_experiment(app, commands, mtlab::ExperimentKind::kStructureAudit,
                                          "structural checks over the connectivity window");
  ExperimentFlags& scan = add_experiment(app, commands, mtlab::ExperimentKind::kMultimatchingScan,
                                         "multimatching success rate against the kept-tuple budget");
  for (auto& [cmd, entry] : commands) {
    if (&entry.second == &audit) {
      add_override(cmd, audit, "mode", "exhaustive | peel | sample");
      add_override(cmd, audit, "grid_points", "m values over the window");
      add_override(cmd, audit, "lemmas", "comma-separated lemma ids");
    } else if (&entry.second == &scan) {
      add_override(cmd, scan, "scheme", "parts | bisect");
      add_override(cmd, scan, "factors", "comma-separated K values");
      add_override(cmd, scan, "node_budget", "backtracking node budget");
      add_override(cmd, scan, "local_steps", "local search moves (0: default)");
    }
  }

  std::vector<std::string> plot_inputs;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plot", "SVG from a summary CSV");
  plot->add_option("--in", plot_inputs, "summary CSV files (series are merged)")->required();
  plot->add_option("--out", plot_out, "SVG path (default stdout)");

  std::size_t dump_n = 0;
  std::size_t dump_s = 2;
  std::uint64_t dump_seed = 1;
  std::size_t dump_m = 0;
  std::string dump_out;
  CLI::App* dump_stream = app.add_subcommand("dump-stream", "write a tuple stream");
  dump_stream->add_option("--n", dump_n, "vertices")->required()->check(CLI::Range(2, 1 << 20));
  dump_stream->add_option("--s", dump_s, "coordinates")->check(CLI::Range(1, 64));
  dump_stream->add_option("--seed", dump_seed, "stream seed");
  dump_stream->add_option("--out", dump_out, "path (default stdout)");
  CLI::App* dump_instance = app.add_subcommand("dump-instance", "write the two-graph instance of a stream prefix");
  dump_instance->add_option("--n", dump_n, "vertices")->required()->check(CLI::Range(2, 1 << 20));
  dump_instance->add_option("--seed", dump_seed, "stream seed");
  dump_instance->add_option("--m", dump_m, "prefix length")->required();
  dump_instance->add_option("--out", dump_out, "path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    for (auto& [cmd, entry] : commands) {
      if (cmd->parsed()) return run_experiment_command(entry.first, entry.second);
    }
    std::ofstream file;
    if (plot->parsed()) {
      mtlab::PlotSpec merged;
      for (const auto& path : plot_inputs) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot read " + path);
        mtlab::PlotSpec spec;
        try {
          spec = mtlab::plot_from_summary(mtlab::read_csv(in));
        } catch (const std::invalid_argument& e) {
          throw UsageError(path + ": " + e.what());
        }
        if (merged.title.empty()) merged = spec;
        else merged.series.insert(merged.series.end(), spec.series.begin(), spec.series.end());
      }
      open_output(plot_out, file) << mtlab::render_svg(merged);
      return kExitPass;
    }
    if (dump_stream->parsed()) {
      mtlab::TupleStream ts = mtlab::TupleStream::generate(dump_n, dump_s, dump_seed);
      mtlab::write_stream(open_output(dump_out, file), ts);
      return kExitPass;
    }
    if (dump_instance->parsed()) {
      mtlab::TupleStream ts = mtlab::TupleStream::generate(dump_n, 2, dump_seed);
      if (dump_m > ts.total()) throw UsageError("m exceeds n(n-1)/2");
      mtlab::write_instance(open_output(dump_out, file), mtlab::IntersectionInstance::from_stream(ts, dump_m));
      return kExitPass;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
