#pragma once

// Statistical complexity (LMC form, SCM = H * Q) of a message-passing system
// observed through its sent-message count matrix. All logarithms are natural.

#include <span>
#include <string>
#include <vector>

#include "scmnet/count_matrix.hpp"

namespace scmnet {

struct ComponentProfile {
  std::size_t index = 0;
  std::vector<double> row;  // length n-1, diagonal slot removed
  std::uint64_t total_sent = 0;
  bool active = false;
};

struct SystemProfile {
  std::size_t n = 0;
  std::vector<ComponentProfile> components;
  std::vector<double> reference_row;  // uniform 1/(n-1)
  std::size_t active_count = 0;
};

struct ComponentScore {
  double entropy = 0.0;
  double jsd = 0.0;
  bool active = false;
};

struct ScmResult {
  double h_raw = 0.0;
  double q_raw = 0.0;
  double h_norm = 0.0;
  double q_norm = 0.0;
  double scm_raw = 0.0;
  double scm_hq = 0.0;
  std::vector<ComponentScore> per_component;
  RunMeta meta;
};

struct ComparisonEntry {
  std::string label;
  ScmResult result;
  double scm_bar = 0.0;
};

struct ComparisonSet {
  std::vector<ComparisonEntry> entries;

  const ComparisonEntry& at(const std::string& label) const;
};

SystemProfile build_profile(const CountMatrix& counts);

double row_entropy(std::span<const double> p);
double shannon_entropy(const SystemProfile& profile);

double kl_divergence(std::span<const double> p, std::span<const double> m);

/// Jensen-Shannon divergence in nats. Exactly symmetric in its arguments, and
/// bit-identical for permutations of a one-hot p against a uniform r.
double jsd(std::span<const double> p, std::span<const double> r);

/// Mean JSD of active rows against the uniform reference.
double disequilibrium(const SystemProfile& profile);

/// Disequilibrium of the Ordered configuration: jsd(one-hot, uniform) on n-1
/// cells.
double q_max(std::size_t n);

double normalized_h(const SystemProfile& profile);
double normalized_q(const SystemProfile& profile);

ScmResult scm(const SystemProfile& profile);
ScmResult analyze(const CountMatrix& counts);

/// Normalizes scm_hq by the set maximum. All maximizing entries get exactly 1.
ComparisonSet normalize_set(std::vector<std::pair<std::string, ScmResult>> results);

}  // namespace scmnet
