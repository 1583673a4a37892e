#pragma once

// Declarative `key = value` config files. `#` starts a comment, lists are
// comma separated, keys are case sensitive.
//
// Topology keys:
//   variant          ordered | chaotic | layered | p2p        (required)
//   n                component count                          (default 128)
//   layers           layered only, >= 2
//   bridge_fraction  layered only                             (default 0.01)
//   bridge_mode      layered only, pure | mixed               (default mixed)
//   targets          p2p only, list of component ids
//   gen_rate         messages/s per component                 (default 5.0)
//   hop_limit        forwards per message                     (default 8)
//   latency          seconds per hop                          (default 0.01)
//   duration         seconds                                  (default 500)
//   seed             64-bit integer                           (default 1)
//   label            free text
//
// Sweep grid keys:
//   sizes        list of n                   (default 128,256,512,1024)
//   durations    list of seconds             (default 10,100,200,500)
//   configs      list of Or,L64,...,L2,Ch    (default all eight)
//   seeds        explicit list of seeds      (default 1..10)
//   seed_count   alternative to seeds: seeds 1..seed_count
//   gen_rate, hop_limit, latency, bridge_mode, bridge_fraction  dynamics overrides

#include <iosfwd>
#include <map>
#include <string>

#include "scmnet/experiments.hpp"
#include "scmnet/sim.hpp"

namespace scmnet {

struct KeyValues {
  std::map<std::string, std::string> values;
  std::map<std::string, std::size_t> lines;
};

KeyValues parse_key_values(std::istream& in);

TopologyConfig topology_from(const KeyValues& kv);
SweepGrid grid_from(const KeyValues& kv);

TopologyConfig load_topology(const std::string& path);
SweepGrid load_grid(const std::string& path);

}  // namespace scmnet
