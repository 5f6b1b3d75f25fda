#include "cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ghzperc/error.hpp"

namespace ghzperc::cli {

using nlohmann::ordered_json;

namespace {

int line_at_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

std::vector<std::string> split_path(const std::string& field) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : field) {
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

ConfigSource load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  ConfigSource src{path, buf.str(), {}};
  try {
    src.doc = ordered_json::parse(src.text);
  } catch (const nlohmann::json::parse_error& e) {
    const int line = e.byte == 0 ? 0 : line_at_offset(src.text, e.byte - 1);
    throw ConfigError("", std::string("invalid JSON: ") + e.what(), line);
  }
  if (!src.doc.is_object()) throw ConfigError("", "config must be a JSON object", 1);
  return src;
}

void apply_override(ordered_json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ConfigError("", "override '" + assignment + "' is not of the form key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  ordered_json value;
  try {
    value = ordered_json::parse(raw);
  } catch (const nlohmann::json::parse_error&) {
    value = raw;
  }
  ordered_json* node = &doc;
  for (const auto& part : split_path(key)) {
    if (part.empty()) throw ConfigError(key, "override key '" + key + "' has an empty component");
    if (!node->is_object() && !node->is_null()) throw ConfigError(key, "override '" + key + "' descends into a non-object");
    node = &(*node)[part];
  }
  *node = std::move(value);
}

int locate_field(const std::string& text, const std::string& field) {
  std::size_t pos = 0;
  for (const auto& part : split_path(field)) {
    const std::string needle = "\"" + part + "\"";
    for (;;) {
      pos = text.find(needle, pos);
      if (pos == std::string::npos) return 0;
      std::size_t after = pos + needle.size();
      while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
      if (after < text.size() && text[after] == ':') break;
      pos = after;
    }
    pos += needle.size();
  }
  return line_at_offset(text, pos == 0 ? 0 : pos - 1);
}

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::Rate: return "rate";
    case Command::Boundary: return "boundary";
    case Command::OptimalK: return "optimal-k";
    case Command::Divided: return "divided";
    case Command::ValidatePartition: return "validate-partition";
  }
  return "?";
}

namespace {

class Reader {
 public:
  explicit Reader(const ordered_json& doc) : doc_(doc) {}

  const ordered_json* section(const std::string& name, std::initializer_list<const char*> keys) {
    if (!doc_.contains(name)) return nullptr;
    const ordered_json& s = doc_.at(name);
    if (!s.is_object()) throw ConfigError(name, "must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : s.items())
      if (!allowed.count(k)) throw ConfigError(name + "." + k, "unknown key");
    return &s;
  }

  static const ordered_json* get(const ordered_json* s, const char* key) {
    if (s == nullptr || !s->contains(key) || s->at(key).is_null()) return nullptr;
    return &s->at(key);
  }

  static double number(const ordered_json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "must be a number");
    return v.get<double>();
  }

  static std::int64_t integer(const ordered_json& v, const std::string& field) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<std::int64_t>(d);
    }
    throw ConfigError(field, "must be an integer");
  }

  static std::uint64_t unsigned_integer(const ordered_json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const auto i = integer(v, field);
    if (i < 0) throw ConfigError(field, "must be nonnegative");
    return static_cast<std::uint64_t>(i);
  }

  static NodeId node(const ordered_json& v, const std::string& field) {
    if (v.is_array() && v.size() == 2)
      return {static_cast<int>(integer(v[0], field)), static_cast<int>(integer(v[1], field))};
    if (v.is_object() && v.contains("x") && v.contains("y") && v.size() == 2)
      return {static_cast<int>(integer(v.at("x"), field + ".x")),
              static_cast<int>(integer(v.at("y"), field + ".y"))};
    throw ConfigError(field, "must be [x, y] or {\"x\": .., \"y\": ..}");
  }

 private:
  const ordered_json& doc_;
};

std::vector<double> read_values(const ordered_json& v, const std::string& field) {
  std::vector<double> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i)
      out.push_back(Reader::number(v[i], field + "[" + std::to_string(i) + "]"));
  } else if (v.is_object()) {
    for (const auto& [k, _] : v.items())
      if (k != "from" && k != "to" && k != "step") throw ConfigError(field + "." + k, "unknown key");
    if (!v.contains("from") || !v.contains("to") || !v.contains("step"))
      throw ConfigError(field, "range needs from, to and step");
    const double from = Reader::number(v.at("from"), field + ".from");
    const double to = Reader::number(v.at("to"), field + ".to");
    const double step = Reader::number(v.at("step"), field + ".step");
    if (!(step > 0)) throw ConfigError(field + ".step", "must be positive");
    if (to < from) throw ConfigError(field + ".to", "must not be below from");
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    if (count > 100000) throw ConfigError(field, "range has too many values");
    for (std::size_t i = 0; i < count; ++i) {
      // round away accumulated binary noise (0.6 + 3 * 0.05 -> 0.75)
      const double x = from + static_cast<double>(i) * step;
      out.push_back(std::stod(std::to_string(std::round(x * 1e12) / 1e12)));
    }
  } else {
    throw ConfigError(field, "must be a list of numbers or {from, to, step}");
  }
  if (out.empty()) throw ConfigError(field, "must contain at least one value");
  return out;
}

double read_mu(const ordered_json* v) {
  if (v == nullptr) return kInfinity;
  if (v->is_string()) {
    const auto s = v->get<std::string>();
    if (s == "inf" || s == "infinity") return kInfinity;
    throw ConfigError("protocol.mu", "must be a positive number, null or \"inf\"");
  }
  return Reader::number(*v, "protocol.mu");
}

void check_params(const ProtocolParams& p) {
  auto bad = [](const char* f, const std::string& why) { throw ConfigError(f, why); };
  if (!(p.p >= 0 && p.p <= 1)) bad("protocol.p", "must lie in [0, 1]");
  if (!(p.q >= 0 && p.q <= 1)) bad("protocol.q", "must lie in [0, 1]");
  if (p.n < 2) bad("protocol.n", "must be at least 2");
  if (p.k < 1) bad("protocol.k", "must be at least 1");
  if (!(p.mu > 0)) bad("protocol.mu", "must be positive or infinite");
  if (p.latency_slots < 0) bad("protocol.latency_slots", "must be nonnegative");
}

}  // namespace

RunConfig resolve_config(const ordered_json& doc, Command command) {
  static const std::set<std::string> kSections{"topology", "consumers", "protocol",
                                               "sweep",    "division",  "run"};
  for (const auto& [k, _] : doc.items())
    if (!kSections.count(k)) throw ConfigError(k, "unknown section");

  Reader r(doc);
  RunConfig cfg;
  cfg.command = command;

  if (const auto* s = r.section("topology", {"type", "width", "height"})) {
    if (const auto* t = Reader::get(s, "type"))
      if (!t->is_string() || t->get<std::string>() != "square")
        throw ConfigError("topology.type", "only \"square\" is supported");
    if (const auto* v = Reader::get(s, "width"))
      cfg.width = static_cast<int>(Reader::integer(*v, "topology.width"));
    if (const auto* v = Reader::get(s, "height"))
      cfg.height = static_cast<int>(Reader::integer(*v, "topology.height"));
  }
  if (cfg.width < 2 || cfg.width > 4096) throw ConfigError("topology.width", "must lie in [2, 4096]");
  if (cfg.height < 2 || cfg.height > 4096)
    throw ConfigError("topology.height", "must lie in [2, 4096]");

  if (const auto* s = r.section("consumers", {"distance", "alice", "bob"})) {
    if (const auto* v = Reader::get(s, "distance")) {
      if (v->is_array()) {
        for (std::size_t i = 0; i < v->size(); ++i)
          cfg.placement.distances.push_back(static_cast<int>(
              Reader::integer((*v)[i], "consumers.distance[" + std::to_string(i) + "]")));
        if (cfg.placement.distances.empty())
          throw ConfigError("consumers.distance", "must not be empty");
      } else {
        cfg.placement.distances.push_back(
            static_cast<int>(Reader::integer(*v, "consumers.distance")));
      }
      for (int d : cfg.placement.distances)
        if (d < 1) throw ConfigError("consumers.distance", "must be at least 1");
    }
    const auto* a = Reader::get(s, "alice");
    const auto* b = Reader::get(s, "bob");
    if ((a == nullptr) != (b == nullptr))
      throw ConfigError(a ? "consumers.bob" : "consumers.alice", "alice and bob go together");
    if (a != nullptr) {
      if (!cfg.placement.distances.empty())
        throw ConfigError("consumers.distance", "give either distance or alice/bob, not both");
      cfg.placement.alice = Reader::node(*a, "consumers.alice");
      cfg.placement.bob = Reader::node(*b, "consumers.bob");
      for (const auto& [name, n] : {std::pair{"consumers.alice", *cfg.placement.alice},
                                    std::pair{"consumers.bob", *cfg.placement.bob}})
        if (n.x < 0 || n.y < 0 || n.x >= cfg.width || n.y >= cfg.height)
          throw ConfigError(name, "lies outside the grid");
      if (*cfg.placement.alice == *cfg.placement.bob)
        throw ConfigError("consumers.bob", "must differ from alice");
    }
  }

  if (const auto* s = r.section("protocol", {"p", "q", "n", "k", "mu", "latency_slots"})) {
    if (const auto* v = Reader::get(s, "p")) cfg.protocol.p = Reader::number(*v, "protocol.p");
    if (const auto* v = Reader::get(s, "q")) cfg.protocol.q = Reader::number(*v, "protocol.q");
    if (const auto* v = Reader::get(s, "n"))
      cfg.protocol.n = static_cast<int>(Reader::integer(*v, "protocol.n"));
    if (const auto* v = Reader::get(s, "k"))
      cfg.protocol.k = static_cast<int>(Reader::integer(*v, "protocol.k"));
    cfg.protocol.mu = read_mu(Reader::get(s, "mu"));
    if (const auto* v = Reader::get(s, "latency_slots"))
      cfg.protocol.latency_slots = static_cast<int>(Reader::integer(*v, "protocol.latency_slots"));
  }
  check_params(cfg.protocol);

  bool have_axis = false;
  if (const auto* s = r.section("sweep", {"axis", "values", "tol", "k_values", "k_max"})) {
    if (const auto* v = Reader::get(s, "axis")) {
      if (!v->is_string()) throw ConfigError("sweep.axis", "must be a string");
      const auto axis = parse_sweep_axis(v->get<std::string>());
      if (!axis) throw ConfigError("sweep.axis", "must be one of p, q, k, mu, distance");
      cfg.axis = *axis;
      have_axis = true;
    }
    if (const auto* v = Reader::get(s, "values")) {
      if (!have_axis) throw ConfigError("sweep.axis", "is required when values are given");
      cfg.values = read_values(*v, "sweep.values");
    } else if (have_axis) {
      throw ConfigError("sweep.values", "is required when an axis is given");
    }
    if (const auto* v = Reader::get(s, "tol")) {
      cfg.tol = Reader::number(*v, "sweep.tol");
      if (!(cfg.tol > 0 && cfg.tol < 1)) throw ConfigError("sweep.tol", "must lie in (0, 1)");
    }
    if (const auto* v = Reader::get(s, "k_values")) {
      if (!v->is_array() || v->empty())
        throw ConfigError("sweep.k_values", "must be a nonempty list of integers");
      for (std::size_t i = 0; i < v->size(); ++i) {
        const auto k = Reader::integer((*v)[i], "sweep.k_values[" + std::to_string(i) + "]");
        if (k < 1) throw ConfigError("sweep.k_values", "entries must be at least 1");
        cfg.k_values.push_back(static_cast<int>(k));
      }
    }
    if (const auto* v = Reader::get(s, "k_max")) {
      cfg.k_max = static_cast<int>(Reader::integer(*v, "sweep.k_max"));
      if (cfg.k_max < 1 || cfg.k_max > 256) throw ConfigError("sweep.k_max", "must lie in [1, 256]");
    }
  }

  bool generate = false;
  if (const auto* s = r.section("division", {"partition_file", "generate"})) {
    if (const auto* v = Reader::get(s, "partition_file")) {
      if (!v->is_string()) throw ConfigError("division.partition_file", "must be a path string");
      cfg.partition_file = v->get<std::string>();
    }
    if (const auto* v = Reader::get(s, "generate")) {
      if (!v->is_boolean()) throw ConfigError("division.generate", "must be true or false");
      generate = v->get<bool>();
    }
    if (generate && cfg.partition_file)
      throw ConfigError("division.generate", "conflicts with division.partition_file");
  }

  if (const auto* s = r.section("run", {"seed", "trials", "threads"})) {
    if (const auto* v = Reader::get(s, "seed")) cfg.seed = Reader::unsigned_integer(*v, "run.seed");
    if (const auto* v = Reader::get(s, "trials"))
      cfg.trials = Reader::unsigned_integer(*v, "run.trials");
    if (const auto* v = Reader::get(s, "threads")) {
      const auto t = Reader::integer(*v, "run.threads");
      if (t < 0 || t > 1024) throw ConfigError("run.threads", "must lie in [0, 1024]");
      cfg.threads = static_cast<int>(t);
    }
  }

  // command-specific requirements
  const bool needs_trials = command != Command::ValidatePartition;
  if (needs_trials && cfg.trials == 0) throw ConfigError("run.trials", "must be at least 1");

  const bool explicit_nodes = cfg.placement.alice.has_value();
  switch (command) {
    case Command::Rate:
    case Command::Divided:
      if (!have_axis) {
        cfg.axis = SweepAxis::P;
        cfg.values = {cfg.protocol.p};
      }
      if (cfg.axis != SweepAxis::Distance && !explicit_nodes && cfg.placement.distances.empty())
        throw ConfigError("consumers", "needs distance or alice/bob");
      if (cfg.axis == SweepAxis::Distance) {
        if (explicit_nodes) throw ConfigError("consumers", "a distance sweep cannot use alice/bob");
        if (!cfg.placement.distances.empty())
          throw ConfigError("consumers.distance", "a distance sweep takes distances from sweep.values");
      }
      if (command == Command::Divided) {
        if (cfg.protocol.k != 1 || cfg.axis == SweepAxis::K)
          throw ConfigError("protocol.k", "network division supports k = 1 only");
        if (cfg.axis == SweepAxis::Mu)
          throw ConfigError("sweep.axis", "mu has no effect at k = 1 without latency");
      } else if (cfg.partition_file || generate) {
        throw ConfigError("division", "belongs to the divided command");
      }
      for (std::size_t i = 0; i < cfg.values.size(); ++i) {
        const std::string f = "sweep.values[" + std::to_string(i) + "]";
        const double v = cfg.values[i];
        const bool integral = std::floor(v) == v;
        switch (cfg.axis) {
          case SweepAxis::P:
          case SweepAxis::Q:
            if (!(v >= 0 && v <= 1)) throw ConfigError(f, "must lie in [0, 1]");
            break;
          case SweepAxis::K:
            if (!integral || v < 1) throw ConfigError(f, "must be an integer of at least 1");
            break;
          case SweepAxis::Mu:
            if (!(v > 0)) throw ConfigError(f, "must be positive");
            break;
          case SweepAxis::Distance:
            if (!integral || v < 1) throw ConfigError(f, "must be an integer of at least 1");
            break;
        }
      }
      break;
    case Command::Boundary:
      if (!have_axis || cfg.axis != SweepAxis::Q)
        throw ConfigError("sweep.axis", "boundary tracing needs axis \"q\" with a q grid");
      for (std::size_t i = 0; i < cfg.values.size(); ++i)
        if (!(cfg.values[i] >= 0 && cfg.values[i] <= 1))
          throw ConfigError("sweep.values[" + std::to_string(i) + "]", "must lie in [0, 1]");
      if (cfg.k_values.empty()) cfg.k_values = {cfg.protocol.k};
      if (cfg.partition_file || generate) throw ConfigError("division", "not used by boundary");
      break;
    case Command::OptimalK:
      if (have_axis) throw ConfigError("sweep.axis", "optimal-k sweeps k itself; use sweep.k_max");
      if (!explicit_nodes && cfg.placement.distances.size() != 1)
        throw ConfigError("consumers", "optimal-k needs a single placement");
      if (cfg.partition_file || generate) throw ConfigError("division", "not used by optimal-k");
      break;
    case Command::ValidatePartition:
      if (!explicit_nodes && cfg.placement.distances.size() != 1)
        throw ConfigError("consumers", "validate-partition needs a single placement");
      break;
  }
  return cfg;
}

}  // namespace ghzperc::cli
