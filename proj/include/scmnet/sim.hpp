#pragma once

// Seeded discrete-event simulator of full-mesh message-passing networks.
//
// Every sending component generates messages with exponential inter-arrival
// times (mean 1/gen_rate). A message is sent to a target drawn from the
// sender's TargetRule and counted at send time; after `latency` seconds it is
// delivered and, while hops remain, forwarded by the receiver using the
// receiver's own rule. The run stops at `duration`.
//
// Randomness comes from std::mt19937_64 seeded with TopologyConfig::seed.

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "scmnet/count_matrix.hpp"

namespace scmnet {

enum class BridgeMode { Pure, Mixed };

struct Ordered {};
struct Chaotic {};
struct Layered {
  std::size_t layers = 2;
  double bridge_fraction = 0.01;
  BridgeMode bridge_mode = BridgeMode::Mixed;
};
struct P2P {
  /// One id means every component sends to it; several ids mean a uniform
  /// draw over the group.
  std::vector<std::size_t> targets;
};

using Variant = std::variant<Ordered, Chaotic, Layered, P2P>;

struct TopologyConfig {
  std::size_t n = 128;
  Variant variant = Chaotic{};
  double gen_rate = 5.0;
  std::uint32_t hop_limit = 8;
  double latency = 0.01;
  double duration = 500.0;
  std::uint64_t seed = 1;
  std::string label;

  /// Throws BadConfig naming the offending field.
  void validate() const;
  std::string describe() const;
};

struct FixedTarget {
  std::size_t target;
};
struct UniformOver {
  std::vector<std::size_t> targets;
};
/// Never generates and never forwards.
struct Inert {};

using TargetRule = std::variant<FixedTarget, UniformOver, Inert>;

struct Message {
  std::size_t origin = 0;
  std::uint32_t hops_remaining = 0;
  std::size_t current_holder = 0;
};

struct SendEvent {
  double time;
  std::size_t src;
  std::size_t dst;
};

struct RunStats {
  std::uint64_t send_events = 0;
  std::uint64_t generated = 0;
  std::uint64_t forwarded = 0;
  double wall_seconds = 0.0;
};

/// Round-robin group id of component `i` for a Layered config.
std::size_t group_of(std::size_t i, std::size_t layers) noexcept;
std::size_t bridge_count(std::size_t group_size, double bridge_fraction) noexcept;

std::vector<TargetRule> build_rules(const TopologyConfig& config);

/// Optional observer receives every send in processing order.
CountMatrix run(const TopologyConfig& config, RunStats* stats = nullptr,
                const std::function<void(const SendEvent&)>& on_send = {});

double expected_sends_per_component(const TopologyConfig& config);

}  // namespace scmnet
