#pragma once

// Sweep runner over (configuration, n, duration, seed), aggregating seed
// means/stddevs per cell and normalizing SCM within each (n, duration) group.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scmnet/scm.hpp"
#include "scmnet/sim.hpp"

namespace scmnet {

/// Known configuration labels in dimension order, Or (1) .. Ch (128).
const std::vector<std::string>& known_labels();

/// 1 for Or, 2 for L64, ... 128 for Ch.
std::size_t dimension_axis(const std::string& label);

struct SweepGrid {
  std::vector<std::size_t> sizes{128, 256, 512, 1024};
  std::vector<double> durations{10, 100, 200, 500};
  std::vector<std::string> configs = known_labels();
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  double gen_rate = 5.0;
  std::uint32_t hop_limit = 8;
  double latency = 0.01;
  double bridge_fraction = 0.01;
  BridgeMode bridge_mode = BridgeMode::Mixed;

  void validate() const;
  std::size_t run_count() const {
    return sizes.size() * durations.size() * configs.size() * seeds.size();
  }
};

TopologyConfig make_topology(const SweepGrid& grid, const std::string& label, std::size_t n,
                             double duration, std::uint64_t seed);

struct CellStats {
  std::string config;
  std::size_t n = 0;
  double duration = 0.0;
  std::size_t runs = 0;
  double h_mean = 0.0, h_sd = 0.0;
  double q_mean = 0.0, q_sd = 0.0;
  double scm_mean = 0.0, scm_sd = 0.0;
  double scm_bar = 0.0;
  bool failed = false;
  std::string error;
};

struct ConvergenceFlag {
  std::string config;
  std::size_t n = 0;
  bool converged = false;
  double dh = 0.0;
  double dq = 0.0;
};

struct SweepReport {
  std::vector<CellStats> cells;
  std::vector<ConvergenceFlag> convergence;
  std::vector<std::string> failures;
  double wall_seconds = 0.0;

  const CellStats* find(const std::string& config, std::size_t n, double duration) const;
  const CellStats& at(const std::string& config, std::size_t n, double duration) const;
};

struct SweepOptions {
  std::size_t workers = 1;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

SweepReport run_sweep(const SweepGrid& grid, const SweepOptions& options = {});

/// Rebuilds scm_bar per (n, duration) group and the t=200 vs t=500
/// convergence flags from the cell means.
void finalize_report(SweepReport& report);

struct Verdict {
  bool converged = false;
  double dh = 0.0;
  double dq = 0.0;
};

inline constexpr double kConvergenceTolerance = 0.03;

/// Compares the t=200 and t=500 cells; throws MissingCell if either is absent.
Verdict convergence_check(const SweepReport& report, std::size_t n, const std::string& config);

void write_report_csv(std::ostream& out, const SweepReport& report);
nlohmann::json report_to_json(const SweepReport& report);
SweepReport report_from_json(const nlohmann::json& j);

/// Text table (H, Q, SCM-bar per size) for one duration.
std::string format_table(const SweepReport& report, double duration);

/// H, Q, SCM-bar versus the dimension axis on a log2 scale.
std::string render_chart_svg(const SweepReport& report, std::size_t n, double duration);

}  // namespace scmnet
