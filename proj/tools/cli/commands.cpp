#include "cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli/config.hpp"
#include "cli/output.hpp"
#include "ghzperc/error.hpp"
#include "ghzperc/experiments.hpp"
#include "ghzperc/partition.hpp"
#include "ghzperc/percolation.hpp"

#ifndef GHZPERC_VERSION
#define GHZPERC_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace ghzperc::cli {

namespace {

struct Options {
  std::string config_path;
  std::string manifest_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<int> threads;
  std::string out_dir = ".";
  std::vector<std::string> overrides;
};

// Simulation-phase failure (exit 3).
struct SimulationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Loaded {
  ConfigSource source;
  RunConfig config;
};

void make_partition_path_absolute(ordered_json& doc, const std::string& config_path) {
  if (!doc.contains("division") || !doc["division"].is_object()) return;
  auto& d = doc["division"];
  if (!d.contains("partition_file") || !d["partition_file"].is_string()) return;
  fs::path p = d["partition_file"].get<std::string>();
  if (p.is_relative()) {
    const fs::path base = fs::absolute(config_path).parent_path();
    d["partition_file"] = (base / p).lexically_normal().string();
  }
}

Loaded load(const Options& opt, Command command) {
  Loaded l;
  if (!opt.manifest_path.empty()) {
    ConfigSource manifest = load_config_file(opt.manifest_path);
    if (!manifest.doc.contains("config") || !manifest.doc["config"].is_object())
      throw ConfigError("config", "manifest has no config object");
    if (manifest.doc.contains("command") && manifest.doc["command"] != to_string(command))
      throw ConfigError("command", "manifest was written by '" +
                                       manifest.doc["command"].get<std::string>() + "'");
    l.source = {manifest.path, manifest.text, manifest.doc["config"]};
  } else {
    l.source = load_config_file(opt.config_path);
    make_partition_path_absolute(l.source.doc, opt.config_path);
  }
  auto& doc = l.source.doc;
  for (const auto& o : opt.overrides) apply_override(doc, o);
  if (opt.seed) doc["run"]["seed"] = *opt.seed;
  if (opt.trials) doc["run"]["trials"] = *opt.trials;
  // record the effective seed so the manifest alone reproduces the run
  if (!doc.contains("run") || !doc["run"].is_object() || !doc["run"].contains("seed"))
    doc["run"]["seed"] = 0;
  l.config = resolve_config(doc, command);

  if (opt.threads) {
    l.config.threads = *opt.threads;
  } else if (const char* env = std::getenv("GHZPERC_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long t = std::strtol(env, &end, 10);
    if (*end != '\0' || t < 0 || t > 1024)
      throw ConfigError("GHZPERC_THREADS", "must be an integer in [0, 1024]");
    if (!(doc.contains("run") && doc["run"].contains("threads"))) l.config.threads = static_cast<int>(t);
  }
  if (l.config.threads < 0) throw ConfigError("threads", "must be nonnegative");
  return l;
}

// Turns library errors raised while preparing inputs into config errors.
template <class F>
auto prepare(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

RegionPartition load_partition(const std::string& path, const NetworkTopology& topology) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("division.partition_file", "cannot open '" + path + "'");
  return prepare("division.partition_file", [&] { return read_partition_csv(in, topology); });
}

ConsumerPlacement single_placement(const RunConfig& cfg, const NetworkTopology& topology) {
  return prepare("consumers", [&] {
    if (cfg.placement.alice)
      return ConsumerPlacement::create(topology, *cfg.placement.alice, *cfg.placement.bob);
    return centered_placement(topology, cfg.placement.distances.front());
  });
}

SweepConfig to_sweep(const RunConfig& cfg) {
  SweepConfig s;
  s.width = cfg.width;
  s.height = cfg.height;
  s.placement = cfg.placement;
  s.base = cfg.protocol;
  s.axis = cfg.axis;
  s.values = cfg.values;
  s.trials = cfg.trials;
  s.seed = cfg.seed;
  s.divided = cfg.command == Command::Divided;
  s.parallelism.threads = cfg.threads;
  return s;
}

// Placements a sweep will visit, built up front so bad distances are config errors.
std::vector<ConsumerPlacement> sweep_placements(const RunConfig& cfg,
                                                const NetworkTopology& topology) {
  std::vector<ConsumerPlacement> out;
  if (cfg.placement.alice) {
    out.push_back(single_placement(cfg, topology));
  } else if (cfg.axis == SweepAxis::Distance) {
    for (double d : cfg.values)
      out.push_back(prepare("sweep.values", [&] {
        return centered_placement(topology, static_cast<int>(d));
      }));
  } else {
    for (int d : cfg.placement.distances)
      out.push_back(prepare("consumers.distance", [&] { return centered_placement(topology, d); }));
  }
  return out;
}

struct Outputs {
  fs::path dir;
  std::vector<std::string> files;
  std::vector<std::string> warnings;

  void write(const std::string& name, const std::string& content) {
    write_atomic(dir / name, content);
    files.push_back(name);
  }
};

int run_rate(const RunConfig& cfg, Outputs& out) {
  const auto topology = prepare("topology", [&] { return build_square_grid(cfg.width, cfg.height); });
  const auto placements = sweep_placements(cfg, topology);
  SweepConfig sweep = to_sweep(cfg);
  prepare("sweep", [&] { validate_sweep(sweep); return 0; });

  if (cfg.command == Command::Divided) {
    if (cfg.partition_file) {
      if (placements.size() != 1)
        throw ConfigError("division.partition_file", "a partition file fits a single placement");
      RegionPartition partition = load_partition(*cfg.partition_file, topology);
      prepare("division.partition_file", [&] {
        return ValidatedPartition::create(topology, placements.front(), partition);
      });
      sweep.partition = std::move(partition);
    } else {
      for (const auto& pl : placements) {
        RegionPartition generated = prepare("consumers", [&] {
          return generate_quadrant_partition(topology, pl);
        });
        if (placements.size() == 1) {
          std::ostringstream csv;
          write_partition_csv(csv, topology, generated);
          out.write("partition.csv", csv.str());
        }
      }
    }
  }

  RateTable table;
  try {
    table = sweep_rate(sweep);
  } catch (const Error& e) {
    throw SimulationFailure(e.what());
  }
  out.write(cfg.command == Command::Divided ? "divided.csv" : "rate.csv", rate_csv(table));
  return kExitOk;
}

int run_boundary(const RunConfig& cfg, Outputs& out) {
  const auto topology = prepare("topology", [&] { return build_square_grid(cfg.width, cfg.height); });
  std::vector<CriticalBoundary> curves;
  const RngStream root(cfg.seed, 0);
  for (std::size_t j = 0; j < cfg.k_values.size(); ++j) {
    ProtocolParams params = cfg.protocol;
    params.k = cfg.k_values[j];
    try {
      curves.push_back(trace_boundary(params, cfg.values, topology, cfg.tol, cfg.trials,
                                      root.fork(j), Parallelism{cfg.threads}));
    } catch (const Error& e) {
      throw SimulationFailure(e.what());
    }
    for (double q : curves.back().gaps)
      out.warnings.push_back("k=" + std::to_string(params.k) + ": no crossing at q=" +
                             format_double(q));
  }
  out.write("boundary.csv", boundary_csv(curves, cfg.width, cfg.height, cfg.trials));
  return kExitOk;
}

int run_optimal_k(const RunConfig& cfg, Outputs& out) {
  const auto topology = prepare("topology", [&] { return build_square_grid(cfg.width, cfg.height); });
  const auto placement = single_placement(cfg, topology);
  OptimalK result;
  try {
    result = find_optimal_k(topology, placement, cfg.protocol, cfg.k_max, cfg.trials,
                            RngStream(cfg.seed, 0), Parallelism{cfg.threads});
  } catch (const Error& e) {
    throw SimulationFailure(e.what());
  }
  out.write("optimal_k.json", optimal_k_json(result).dump(2) + "\n");
  return kExitOk;
}

int run_validate(const RunConfig& cfg, Outputs& out, std::ostream& os) {
  const auto topology = prepare("topology", [&] { return build_square_grid(cfg.width, cfg.height); });
  const auto placement = single_placement(cfg, topology);
  RegionPartition partition;
  if (cfg.partition_file) {
    partition = load_partition(*cfg.partition_file, topology);
  } else {
    partition = prepare("consumers", [&] { return generate_quadrant_partition(topology, placement); });
    std::ostringstream csv;
    write_partition_csv(csv, topology, partition);
    out.write("partition.csv", csv.str());
  }
  const auto violations = validate_partition(topology, placement, partition);
  for (const auto& v : violations) {
    os << to_string(v.kind);
    if (v.region) os << " region=" << to_string(*v.region);
    if (v.edge) os << " edge=" << topology.edge_label(*v.edge);
    os << ": " << v.detail << '\n';
    out.warnings.push_back(std::string(to_string(v.kind)) + ": " + v.detail);
  }
  if (violations.empty()) {
    os << "partition ok:";
    for (RegionId r : kAllRegions) os << ' ' << to_string(r) << '=' << partition.count(r);
    os << '\n';
    return kExitOk;
  }
  return kExitViolations;
}

std::string describe(const ConfigError& e, const std::string& source_path, const std::string& text) {
  int line = e.line();
  if (line == 0 && !e.field().empty() && !text.empty()) line = locate_field(text, e.field());
  std::string msg;
  if (!source_path.empty()) msg += source_path + ":" + (line > 0 ? std::to_string(line) + ":" : "") + " ";
  if (!e.field().empty()) msg += e.field() + ": ";
  return msg + e.what();
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo simulator for time-multiplexed GHZ entanglement routing on grids",
               "ghzperc"};
  app.set_version_flag("--version", std::string(GHZPERC_VERSION));
  app.require_subcommand(1);

  Options opt;
  struct Sub {
    Command command;
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {Command::Rate, "rate", "Estimate entanglement rates over a parameter sweep"},
      {Command::Boundary, "boundary", "Trace the critical p(q) boundary of the spanning probability"},
      {Command::OptimalK, "optimal-k", "Find the block length k maximising the rate"},
      {Command::Divided, "divided", "Rates of the four-region divided network"},
      {Command::ValidatePartition, "validate-partition", "Check or generate a region partition"},
  };
  std::map<CLI::App*, Command> commands;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    auto* cfg = sub->add_option("--config", opt.config_path, "JSON run configuration")
                    ->check(CLI::ExistingFile);
    auto* man = sub->add_option("--manifest", opt.manifest_path,
                                "Re-run the configuration recorded in a manifest")
                    ->check(CLI::ExistingFile);
    cfg->excludes(man);
    sub->add_option("--seed", opt.seed, "Override run.seed");
    sub->add_option("--trials", opt.trials, "Override run.trials");
    sub->add_option("--threads", opt.threads, "Worker threads (0 = one per core)");
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--set", opt.overrides, "Override a config entry, e.g. protocol.p=0.8");
    commands[sub] = s.command;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const Command command = commands.at(chosen);
  if (opt.config_path.empty() && opt.manifest_path.empty()) {
    err << "ghzperc " << to_string(command) << ": one of --config or --manifest is required\n";
    return kExitConfig;
  }

  const std::string started = utc_timestamp();
  Loaded loaded;
  try {
    loaded = load(opt, command);
  } catch (const ConfigError& e) {
    const std::string path = opt.manifest_path.empty() ? opt.config_path : opt.manifest_path;
    std::string text;
    if (std::ifstream in(path, std::ios::binary); in) {
      std::ostringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    }
    err << "error: " << describe(e, path, text) << '\n';
    return kExitConfig;
  }

  Outputs outputs;
  outputs.dir = opt.out_dir;
  int code = kExitOk;
  try {
    std::error_code ec;
    fs::create_directories(outputs.dir, ec);
    if (ec) throw ConfigError("--out", "cannot create '" + opt.out_dir + "': " + ec.message());
    switch (command) {
      case Command::Rate:
      case Command::Divided: code = run_rate(loaded.config, outputs); break;
      case Command::Boundary: code = run_boundary(loaded.config, outputs); break;
      case Command::OptimalK: code = run_optimal_k(loaded.config, outputs); break;
      case Command::ValidatePartition: code = run_validate(loaded.config, outputs, out); break;
    }
  } catch (const ConfigError& e) {
    err << "error: " << describe(e, loaded.source.path, loaded.source.text) << '\n';
    return kExitConfig;
  } catch (const SimulationFailure& e) {
    err << "simulation error: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSimulation;
  }

  for (const auto& w : outputs.warnings) err << "warning: " << w << '\n';

  ordered_json manifest;
  manifest["tool"] = "ghzperc";
  manifest["version"] = GHZPERC_VERSION;
  manifest["command"] = to_string(command);
  manifest["seed"] = loaded.config.seed;
  manifest["config"] = loaded.source.doc;
  manifest["started"] = started;
  manifest["finished"] = utc_timestamp();
  manifest["outputs"] = outputs.files;
  manifest["warnings"] = outputs.warnings;
  try {
    write_atomic(outputs.dir / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSimulation;
  }
  return code;
}

}  // namespace ghzperc::cli
