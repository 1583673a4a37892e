#include <doctest.h>

#include <cmath>
#include <set>

#include "scmnet/error.hpp"
#include "scmnet/scm.hpp"
#include "scmnet/sim.hpp"

using namespace scmnet;

namespace {

TopologyConfig config(Variant v, std::size_t n, double duration, std::uint64_t seed = 1) {
  TopologyConfig c;
  c.variant = std::move(v);
  c.n = n;
  c.duration = duration;
  c.seed = seed;
  return c;
}

std::size_t nonzero_cells(const CountMatrix& m) {
  std::size_t z = 0;
  for (auto v : m.data()) z += v != 0;
  return z;
}

ErrorKind kind_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("build_rules: Ordered") {
  const auto rules = build_rules(config(Ordered{}, 4, 10));
  REQUIRE(rules.size() == 4);
  REQUIRE(std::holds_alternative<FixedTarget>(rules[0]));
  CHECK(std::get<FixedTarget>(rules[0]).target == 1);
  for (std::size_t i = 1; i < 4; ++i) CHECK(std::holds_alternative<Inert>(rules[i]));
}

TEST_CASE("build_rules: Chaotic n=3") {
  const auto rules = build_rules(config(Chaotic{}, 3, 10));
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& u = std::get<UniformOver>(rules[i]);
    CHECK(u.targets.size() == 2);
    CHECK(std::find(u.targets.begin(), u.targets.end(), i) == u.targets.end());
  }
}

TEST_CASE("build_rules: Layered n=128, 8 layers") {
  CHECK(bridge_count(16, 0.01) == 1);
  CHECK(bridge_count(512, 0.01) == 5);
  CHECK(bridge_count(1, 0.5) == 1);

  for (auto mode : {BridgeMode::Pure, BridgeMode::Mixed}) {
    const auto rules = build_rules(config(Layered{8, 0.01, mode}, 128, 10));
    std::size_t bridges = 0;
    for (std::size_t i = 0; i < 128; ++i) {
      const std::size_t g = group_of(i, 8);
      const bool is_bridge = i < 8;  // first member of each round-robin group
      if (is_bridge) {
        ++bridges;
        const std::size_t foreign = (g + 1) % 8;
        if (mode == BridgeMode::Pure) {
          CHECK(std::get<FixedTarget>(rules[i]).target == foreign);
        } else {
          const auto& t = std::get<UniformOver>(rules[i]).targets;
          CHECK(t.size() == 16);
          CHECK(std::count(t.begin(), t.end(), foreign) == 1);
        }
        continue;
      }
      const auto& t = std::get<UniformOver>(rules[i]).targets;
      CHECK(t.size() == 15);
      for (auto target : t) {
        CHECK(target != i);
        CHECK(group_of(target, 8) == g);
      }
    }
    CHECK(bridges == 8);
  }
}

TEST_CASE("build_rules: uneven groups differ by at most one") {
  const auto rules = build_rules(config(Layered{3}, 10, 10));
  std::vector<std::size_t> sizes(3, 0);
  for (std::size_t i = 0; i < 10; ++i) ++sizes[group_of(i, 3)];
  CHECK(*std::max_element(sizes.begin(), sizes.end()) - *std::min_element(sizes.begin(), sizes.end()) <= 1);
  for (const auto& r : rules) CHECK_FALSE(std::holds_alternative<Inert>(r));
}

TEST_CASE("build_rules: P2P") {
  const auto single = build_rules(config(P2P{{5}}, 8, 10));
  CHECK(std::holds_alternative<Inert>(single[5]));
  CHECK(std::get<FixedTarget>(single[0]).target == 5);

  const auto group = build_rules(config(P2P{{1, 2}}, 8, 10));
  CHECK(std::get<UniformOver>(group[0]).targets == std::vector<std::size_t>{1, 2});
  CHECK(std::get<UniformOver>(group[1]).targets == std::vector<std::size_t>{2});
}

TEST_CASE("build_rules: bad configs") {
  CHECK(kind_of([] { build_rules(config(Layered{200}, 128, 10)); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { build_rules(config(Layered{1}, 128, 10)); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { build_rules(config(P2P{{}}, 8, 10)); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { build_rules(config(P2P{{9}}, 8, 10)); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { build_rules(config(Chaotic{}, 8, 0)); }) == ErrorKind::BadConfig);
  CHECK(kind_of([] { build_rules(config(Chaotic{}, 1, 10)); }) == ErrorKind::BadConfig);
  auto c = config(Chaotic{}, 8, 10);
  c.gen_rate = 0;
  CHECK(kind_of([&] { build_rules(c); }) == ErrorKind::BadConfig);
  try {
    build_rules(config(Layered{200}, 128, 10));
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("'layers'") != std::string::npos);
  }
}

TEST_CASE("run: Ordered has exactly one nonzero cell") {
  for (double t : {10.0, 500.0}) {
    const auto m = run(config(Ordered{}, 128, t, 3));
    CHECK(nonzero_cells(m) == 1);
    CHECK(m(0, 1) > 0);
    const auto r = analyze(m);
    CHECK(r.h_norm == 0.0);
    CHECK(r.q_norm == 1.0);
  }
}

TEST_CASE("run: Layered containment") {
  auto c = config(Layered{8, 0.01, BridgeMode::Pure}, 128, 100, 5);
  const auto m = run(c);
  for (std::size_t i = 0; i < 128; ++i) {
    const std::size_t g = group_of(i, 8);
    if (i < 8) {
      const std::size_t foreign = (g + 1) % 8;
      for (std::size_t j = 0; j < 128; ++j)
        if (j != foreign) CHECK(m(i, j) == 0);
      CHECK(m(i, foreign) > 0);
      continue;
    }
    for (std::size_t j = 0; j < 128; ++j)
      if (group_of(j, 8) != g) CHECK(m(i, j) == 0);
  }

  c.variant = Layered{8};
  const auto mixed = run(c);
  for (std::size_t i = 8; i < 128; ++i)
    for (std::size_t j = 0; j < 128; ++j)
      if (group_of(j, 8) != group_of(i, 8)) CHECK(mixed(i, j) == 0);
}

TEST_CASE("run: determinism and no self-sends") {
  for (const Variant& v : {Variant{Chaotic{}}, Variant{Layered{4}}, Variant{P2P{{0, 3, 7}}}}) {
    const auto a = run(config(v, 32, 50, 42));
    const auto b = run(config(v, 32, 50, 42));
    CHECK(a == b);
    for (std::size_t i = 0; i < 32; ++i) CHECK(a(i, i) == 0);
    const auto other = run(config(v, 32, 50, 43));
    CHECK_FALSE(a == other);
  }
}

TEST_CASE("run: conservation") {
  auto c = config(Chaotic{}, 64, 40, 8);
  RunStats stats;
  std::uint64_t observed = 0;
  const auto m = run(c, &stats, [&](const SendEvent& e) {
    CHECK(e.src != e.dst);
    CHECK(e.time < c.duration);
    ++observed;
  });
  CHECK(m.total() == stats.send_events);
  CHECK(observed == stats.send_events);
  CHECK(stats.send_events == stats.generated + stats.forwarded);
  CHECK(stats.forwarded <= stats.generated * c.hop_limit);
}

TEST_CASE("run: hop_limit=0 Chaotic sends ~ n * t * rate") {
  std::uint64_t total = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = config(Chaotic{}, 128, 500, seed);
    c.gen_rate = 1.0;
    c.hop_limit = 0;
    total += run(c).total();
  }
  const double mean = static_cast<double>(total) / 10.0;
  CHECK(std::abs(mean - 128.0 * 500.0) <= 0.05 * 128.0 * 500.0);
}

TEST_CASE("expected_sends_per_component") {
  auto c = config(Chaotic{}, 128, 500);
  c.gen_rate = 1.0;
  c.hop_limit = 8;
  CHECK(expected_sends_per_component(c) == 4500.0);
  const double per_component = static_cast<double>(run(c).total()) / 128.0;
  CHECK(std::abs(per_component - 4500.0) <= 0.05 * 4500.0);

  c.hop_limit = 0;
  CHECK(expected_sends_per_component(c) == 500.0);
  c.hop_limit = 8;
  c.duration = 10;
  CHECK(expected_sends_per_component(c) == 90.0);
}

TEST_CASE("Ordered degeneracy across sizes and seeds") {
  for (std::size_t n : {3u, 17u, 256u})
    for (std::uint64_t seed : {1u, 99u}) {
      const auto r = analyze(run(config(Ordered{}, n, 25, seed)));
      CHECK(r.h_norm == 0.0);
      CHECK(r.q_norm == 1.0);
    }
}

TEST_CASE("Chaotic q_norm shrinks with duration on seed means") {
  double previous = 1.0;
  for (double t : {10.0, 100.0, 500.0}) {
    double q = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) q += analyze(run(config(Chaotic{}, 128, t, seed))).q_norm;
    q /= 10;
    CHECK(q <= previous);
    previous = q;
  }
}

TEST_CASE("describe echoes the variant") {
  auto c = config(Layered{8, 0.01, BridgeMode::Pure}, 128, 500, 3);
  CHECK(c.describe().find("layered layers=8") != std::string::npos);
  CHECK(c.describe().find("bridge_mode=pure") != std::string::npos);
  CHECK(run(config(Chaotic{}, 8, 1)).meta.config.find("chaotic") == 0);
}
