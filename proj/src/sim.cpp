#include "scmnet/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <sstream>

#include "scmnet/error.hpp"

namespace scmnet {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::BadConfig, "'" + key + "' " + why);
}

const char* to_string(BridgeMode m) { return m == BridgeMode::Pure ? "pure" : "mixed"; }

enum class EventKind : std::uint8_t { Generate, Deliver };

struct Event {
  double time;
  std::uint64_t seq;
  EventKind kind;
  Message msg;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const noexcept {
    if (a.time != b.time) return a.time > b.time;
    return a.seq > b.seq;
  }
};

}  // namespace

void TopologyConfig::validate() const {
  if (n < 2) bad("n", "must be >= 2");
  if (!(gen_rate > 0.0) || !std::isfinite(gen_rate)) bad("gen_rate", "must be > 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) bad("duration", "must be > 0");
  if (!(latency >= 0.0) || !std::isfinite(latency)) bad("latency", "must be >= 0");

  if (const auto* l = std::get_if<Layered>(&variant)) {
    if (l->layers < 2) bad("layers", "must be >= 2");
    if (l->layers > n)
      bad("layers", "(" + std::to_string(l->layers) + ") exceeds n (" + std::to_string(n) + ")");
    if (!(l->bridge_fraction >= 0.0 && l->bridge_fraction <= 1.0))
      bad("bridge_fraction", "must lie in [0, 1]");
  } else if (const auto* p = std::get_if<P2P>(&variant)) {
    if (p->targets.empty()) bad("targets", "must name at least one component");
    std::vector<std::size_t> sorted = p->targets;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      bad("targets", "contains duplicates");
    if (sorted.back() >= n) bad("targets", "id " + std::to_string(sorted.back()) + " out of range");
  }
}

std::string TopologyConfig::describe() const {
  std::ostringstream os;
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ordered>) {
          os << "ordered";
        } else if constexpr (std::is_same_v<T, Chaotic>) {
          os << "chaotic";
        } else if constexpr (std::is_same_v<T, Layered>) {
          os << "layered layers=" << v.layers << " bridge_fraction=" << v.bridge_fraction
             << " bridge_mode=" << to_string(v.bridge_mode);
        } else {
          os << "p2p targets=";
          for (std::size_t i = 0; i < v.targets.size(); ++i) os << (i ? ";" : "") << v.targets[i];
        }
      },
      variant);
  os << " n=" << n << " gen_rate=" << gen_rate << " hop_limit=" << hop_limit
     << " latency=" << latency << " duration=" << duration << " seed=" << seed;
  return os.str();
}

std::size_t group_of(std::size_t i, std::size_t layers) noexcept { return i % layers; }

std::size_t bridge_count(std::size_t group_size, double bridge_fraction) noexcept {
  const auto b = static_cast<std::size_t>(std::floor(bridge_fraction * static_cast<double>(group_size)));
  return std::min(group_size, std::max<std::size_t>(1, b));
}

std::vector<TargetRule> build_rules(const TopologyConfig& config) {
  config.validate();
  const std::size_t n = config.n;
  std::vector<TargetRule> rules(n, Inert{});

  auto others = [n](std::size_t self) {
    std::vector<std::size_t> t;
    t.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != self) t.push_back(j);
    return t;
  };

  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Ordered>) {
          rules[0] = FixedTarget{1};
        } else if constexpr (std::is_same_v<T, Chaotic>) {
          for (std::size_t i = 0; i < n; ++i) rules[i] = UniformOver{others(i)};
        } else if constexpr (std::is_same_v<T, Layered>) {
          std::vector<std::vector<std::size_t>> groups(v.layers);
          for (std::size_t i = 0; i < n; ++i) groups[group_of(i, v.layers)].push_back(i);
          for (std::size_t g = 0; g < v.layers; ++g) {
            const auto& members = groups[g];
            const std::size_t bridges = bridge_count(members.size(), v.bridge_fraction);
            const std::size_t foreign = groups[(g + 1) % v.layers].front();
            for (std::size_t m = 0; m < members.size(); ++m) {
              const std::size_t self = members[m];
              std::vector<std::size_t> peers;
              peers.reserve(members.size());
              for (std::size_t other : members)
                if (other != self) peers.push_back(other);
              if (m < bridges) {
                if (v.bridge_mode == BridgeMode::Pure) {
                  rules[self] = FixedTarget{foreign};
                } else {
                  peers.push_back(foreign);
                  rules[self] = UniformOver{std::move(peers)};
                }
              } else {
                if (peers.empty())
                  bad("layers", "group " + std::to_string(g) + " leaves a non-bridge member without targets");
                rules[self] = UniformOver{std::move(peers)};
              }
            }
          }
        } else {
          if (v.targets.size() == 1) {
            for (std::size_t i = 0; i < n; ++i)
              if (i != v.targets.front()) rules[i] = FixedTarget{v.targets.front()};
          } else {
            for (std::size_t i = 0; i < n; ++i) {
              std::vector<std::size_t> set;
              for (std::size_t t : v.targets)
                if (t != i) set.push_back(t);
              if (!set.empty()) rules[i] = UniformOver{std::move(set)};
            }
          }
        }
      },
      config.variant);
  return rules;
}

CountMatrix run(const TopologyConfig& config, RunStats* stats,
                const std::function<void(const SendEvent&)>& on_send) {
  const auto started = std::chrono::steady_clock::now();
  const auto rules = build_rules(config);
  const std::size_t n = config.n;

  CountMatrix counts(n);
  counts.meta.label = config.label;
  counts.meta.duration = config.duration;
  counts.meta.seed = config.seed;
  counts.meta.config = config.describe();

  std::mt19937_64 rng(config.seed);
  std::exponential_distribution<double> gap(config.gen_rate);

  auto draw = [&](std::size_t holder) -> std::ptrdiff_t {
    const auto& rule = rules[holder];
    if (const auto* f = std::get_if<FixedTarget>(&rule)) return static_cast<std::ptrdiff_t>(f->target);
    if (const auto* u = std::get_if<UniformOver>(&rule)) {
      std::uniform_int_distribution<std::size_t> pick(0, u->targets.size() - 1);
      return static_cast<std::ptrdiff_t>(u->targets[pick(rng)]);
    }
    return -1;
  };

  // Generation events live in a heap; deliveries share one fixed latency, so
  // they are produced in (time, seq) order and a FIFO keeps them sorted.
  // Merging the two by (time, seq) equals a single ordered event queue.
  std::priority_queue<Event, std::vector<Event>, Later> generations;
  std::deque<Event> deliveries;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::holds_alternative<Inert>(rules[i])) continue;
    generations.push({gap(rng), seq++, EventKind::Generate, {i, config.hop_limit, i}});
  }

  RunStats local;
  auto send = [&](double now, Message msg, std::size_t target) {
    ++counts(msg.current_holder, target);
    ++local.send_events;
    if (on_send) on_send({now, msg.current_holder, target});
    msg.current_holder = target;
    deliveries.push_back({now + config.latency, seq++, EventKind::Deliver, msg});
  };

  const Later later;
  while (!generations.empty() || !deliveries.empty()) {
    Event ev;
    if (deliveries.empty() || (!generations.empty() && later(deliveries.front(), generations.top()))) {
      ev = generations.top();
      if (ev.time >= config.duration) break;
      generations.pop();
    } else {
      ev = deliveries.front();
      if (ev.time >= config.duration) break;
      deliveries.pop_front();
    }

    if (ev.kind == EventKind::Generate) {
      const std::size_t self = ev.msg.current_holder;
      send(ev.time, ev.msg, static_cast<std::size_t>(draw(self)));
      ++local.generated;
      generations.push({ev.time + gap(rng), seq++, EventKind::Generate, {self, config.hop_limit, self}});
      continue;
    }

    Message msg = ev.msg;
    if (msg.hops_remaining == 0) continue;
    const auto target = draw(msg.current_holder);
    if (target < 0) continue;
    --msg.hops_remaining;
    send(ev.time, msg, static_cast<std::size_t>(target));
    ++local.forwarded;
  }

  local.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (stats) *stats = local;
  return counts;
}

double expected_sends_per_component(const TopologyConfig& config) {
  return config.gen_rate * config.duration * (1.0 + static_cast<double>(config.hop_limit));
}

}  // namespace scmnet
