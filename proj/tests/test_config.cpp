#include <doctest.h>

#include <sstream>

#include "scmnet/config.hpp"
#include "scmnet/error.hpp"

using namespace scmnet;

namespace {

KeyValues kv(const std::string& text) {
  std::istringstream in(text);
  return parse_key_values(in);
}

std::string error_of(const auto& fn) {
  try {
    fn();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::BadConfig);
    return e.what();
  }
  FAIL("expected BadConfig");
  return {};
}

}  // namespace

TEST_CASE("key-value parsing") {
  const auto parsed = kv("# topology\nvariant = layered   # inline\n\n  layers=8\n");
  CHECK(parsed.values.at("variant") == "layered");
  CHECK(parsed.values.at("layers") == "8");
  CHECK(parsed.lines.at("layers") == 4);
  CHECK(error_of([] { kv("variant\n"); }).find("line 1") != std::string::npos);
  CHECK(error_of([] { kv("n = 1\nn = 2\n"); }).find("'n'") != std::string::npos);
}

TEST_CASE("topology configs") {
  const auto c = topology_from(kv("variant = layered\nn = 256\nlayers = 16\nbridge_mode = pure\nseed = 12\nduration = 100\n"));
  CHECK(c.n == 256);
  CHECK(c.seed == 12);
  CHECK(c.duration == 100.0);
  const auto& l = std::get<Layered>(c.variant);
  CHECK(l.layers == 16);
  CHECK(l.bridge_mode == BridgeMode::Pure);
  CHECK(l.bridge_fraction == 0.01);

  const auto d = topology_from(kv("variant = chaotic\n"));
  CHECK(std::holds_alternative<Chaotic>(d.variant));
  CHECK(d.gen_rate == 5.0);
  CHECK(d.hop_limit == 8);
  CHECK(d.latency == 0.01);

  const auto p = topology_from(kv("variant = p2p\nn = 8\ntargets = 1, 2,3\n"));
  CHECK(std::get<P2P>(p.variant).targets == std::vector<std::size_t>{1, 2, 3});
}

TEST_CASE("topology config errors name the key") {
  CHECK(error_of([] { topology_from(kv("n = 128\n")); }).find("'variant'") != std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = mesh\n")); }).find("'variant'") != std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = layered\nn = 128\nlayers = 200\n")); }).find("'layers'") !=
        std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = chaotic\nn = abc\n")); }).find("'n'") != std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = chaotic\ncolour = red\n")); }).find("'colour'") !=
        std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = chaotic\nlayers = 4\n")); }).find("'layers'") !=
        std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = layered\nlayers = 4\nbridge_mode = odd\n")); })
            .find("'bridge_mode'") != std::string::npos);
  CHECK(error_of([] { topology_from(kv("variant = chaotic\nduration = -5\n")); }).find("'duration'") !=
        std::string::npos);
}

TEST_CASE("sweep grids") {
  const auto g = grid_from(kv(""));
  CHECK(g.run_count() == 1280);

  const auto h = grid_from(kv("sizes = 64\ndurations = 10, 20\nconfigs = Or, L8, Ch\nseed_count = 3\nhop_limit = 2\n"));
  CHECK(h.sizes == std::vector<std::size_t>{64});
  CHECK(h.durations == std::vector<double>{10, 20});
  CHECK(h.configs == std::vector<std::string>{"Or", "L8", "Ch"});
  CHECK(h.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(h.hop_limit == 2);
  CHECK(h.run_count() == 18);

  CHECK(error_of([] { grid_from(kv("configs = Or, L3\n")); }).find("'configs'") != std::string::npos);
  CHECK(error_of([] { grid_from(kv("seeds = 1\nseed_count = 2\n")); }).find("'seed_count'") != std::string::npos);
  CHECK(error_of([] { grid_from(kv("sizes = \n")); }).find("'sizes'") != std::string::npos);
}
