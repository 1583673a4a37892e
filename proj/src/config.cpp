#include "scmnet/config.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include "scmnet/error.hpp"

namespace scmnet {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::BadConfig, "'" + key + "' " + why);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string_view rest(s);
  while (true) {
    const auto comma = rest.find(',');
    auto item = trim(rest.substr(0, comma));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty())
    bad_key(key, "has invalid value '" + text + "'");
  return value;
}

class Reader {
 public:
  Reader(const KeyValues& kv, std::set<std::string> allowed) : kv_(kv) {
    for (const auto& [key, value] : kv.values)
      if (!allowed.count(key)) bad_key(key, "is not a recognized key");
  }

  bool has(const std::string& key) const { return kv_.values.count(key) > 0; }
  const std::string& raw(const std::string& key) const { return kv_.values.at(key); }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    return has(key) ? parse_number<T>(key, raw(key)) : fallback;
  }

  template <typename T>
  std::vector<T> numbers(const std::string& key, std::vector<T> fallback) const {
    if (!has(key)) return fallback;
    std::vector<T> out;
    for (const auto& item : split_list(raw(key))) out.push_back(parse_number<T>(key, item));
    if (out.empty()) bad_key(key, "must not be empty");
    return out;
  }

 private:
  const KeyValues& kv_;
};

BridgeMode parse_bridge_mode(const std::string& text) {
  if (text == "pure") return BridgeMode::Pure;
  if (text == "mixed") return BridgeMode::Mixed;
  bad_key("bridge_mode", "must be 'pure' or 'mixed', got '" + text + "'");
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  return in;
}

}  // namespace

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::BadConfig, "line " + std::to_string(lineno) + ": expected 'key = value'");
    auto key = trim(std::string_view(body).substr(0, eq));
    auto value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty()) throw Error(ErrorKind::BadConfig, "line " + std::to_string(lineno) + ": empty key");
    if (kv.values.count(key)) bad_key(key, "is defined twice (line " + std::to_string(lineno) + ")");
    kv.lines[key] = lineno;
    kv.values[key] = std::move(value);
  }
  return kv;
}

TopologyConfig topology_from(const KeyValues& kv) {
  const Reader r(kv, {"variant", "n", "layers", "bridge_fraction", "bridge_mode", "targets", "gen_rate",
                      "hop_limit", "latency", "duration", "seed", "label"});
  if (!r.has("variant")) bad_key("variant", "is required");

  TopologyConfig cfg;
  cfg.n = r.number<std::size_t>("n", cfg.n);
  cfg.gen_rate = r.number<double>("gen_rate", cfg.gen_rate);
  cfg.hop_limit = r.number<std::uint32_t>("hop_limit", cfg.hop_limit);
  cfg.latency = r.number<double>("latency", cfg.latency);
  cfg.duration = r.number<double>("duration", cfg.duration);
  cfg.seed = r.number<std::uint64_t>("seed", cfg.seed);
  if (r.has("label")) cfg.label = r.raw("label");

  const auto& variant = r.raw("variant");
  auto reject = [&](const std::string& key) {
    if (r.has(key)) bad_key(key, "does not apply to variant '" + variant + "'");
  };
  if (variant == "ordered" || variant == "chaotic") {
    for (const char* key : {"layers", "bridge_fraction", "bridge_mode", "targets"}) reject(key);
    cfg.variant = variant == "ordered" ? Variant{Ordered{}} : Variant{Chaotic{}};
  } else if (variant == "layered") {
    reject("targets");
    if (!r.has("layers")) bad_key("layers", "is required for variant 'layered'");
    Layered l;
    l.layers = r.number<std::size_t>("layers", 0);
    l.bridge_fraction = r.number<double>("bridge_fraction", l.bridge_fraction);
    if (r.has("bridge_mode")) l.bridge_mode = parse_bridge_mode(r.raw("bridge_mode"));
    cfg.variant = l;
  } else if (variant == "p2p") {
    for (const char* key : {"layers", "bridge_fraction", "bridge_mode"}) reject(key);
    if (!r.has("targets")) bad_key("targets", "is required for variant 'p2p'");
    cfg.variant = P2P{r.numbers<std::size_t>("targets", {})};
  } else {
    bad_key("variant", "must be one of ordered|chaotic|layered|p2p, got '" + variant + "'");
  }
  if (cfg.label.empty()) cfg.label = variant;
  cfg.validate();
  return cfg;
}

SweepGrid grid_from(const KeyValues& kv) {
  const Reader r(kv, {"sizes", "durations", "configs", "seeds", "seed_count", "gen_rate", "hop_limit",
                      "latency", "bridge_mode", "bridge_fraction"});
  SweepGrid grid;
  grid.sizes = r.numbers<std::size_t>("sizes", grid.sizes);
  grid.durations = r.numbers<double>("durations", grid.durations);
  if (r.has("configs")) grid.configs = split_list(r.raw("configs"));
  if (r.has("seeds") && r.has("seed_count")) bad_key("seed_count", "conflicts with 'seeds'");
  if (r.has("seeds")) grid.seeds = r.numbers<std::uint64_t>("seeds", {});
  if (r.has("seed_count")) {
    const auto count = r.number<std::uint64_t>("seed_count", 0);
    if (count == 0) bad_key("seed_count", "must be >= 1");
    grid.seeds.clear();
    for (std::uint64_t s = 1; s <= count; ++s) grid.seeds.push_back(s);
  }
  grid.gen_rate = r.number<double>("gen_rate", grid.gen_rate);
  grid.hop_limit = r.number<std::uint32_t>("hop_limit", grid.hop_limit);
  grid.latency = r.number<double>("latency", grid.latency);
  grid.bridge_fraction = r.number<double>("bridge_fraction", grid.bridge_fraction);
  if (r.has("bridge_mode")) grid.bridge_mode = parse_bridge_mode(r.raw("bridge_mode"));
  grid.validate();
  return grid;
}

TopologyConfig load_topology(const std::string& path) {
  auto in = open(path);
  return topology_from(parse_key_values(in));
}

SweepGrid load_grid(const std::string& path) {
  auto in = open(path);
  return grid_from(parse_key_values(in));
}

}  // namespace scmnet
