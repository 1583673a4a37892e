#include "scmnet/scm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "scmnet/error.hpp"

namespace scmnet {

namespace {

void require_same_length(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::BadShape, "distribution lengths differ (" + std::to_string(a.size()) +
                                         " vs " + std::to_string(b.size()) + ")");
}

void require_normalizable(std::size_t n) {
  if (n <= 2)
    throw Error(ErrorKind::BadShape, "normalization needs n >= 3, got " + std::to_string(n));
}

}  // namespace

const ComparisonEntry& ComparisonSet::at(const std::string& label) const {
  for (const auto& e : entries)
    if (e.label == label) return e;
  throw Error(ErrorKind::UnknownLabel, "no comparison entry '" + label + "'");
}

SystemProfile build_profile(const CountMatrix& counts) {
  counts.validate();
  const std::size_t n = counts.size();

  SystemProfile profile;
  profile.n = n;
  profile.reference_row.assign(n - 1, 1.0 / static_cast<double>(n - 1));
  profile.components.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    auto& comp = profile.components[i];
    comp.index = i;
    comp.total_sent = counts.row_sum(i);
    comp.active = comp.total_sent > 0;
    comp.row.assign(n - 1, 0.0);
    if (!comp.active) continue;
    ++profile.active_count;
    const double total = static_cast<double>(comp.total_sent);
    for (std::size_t j = 0, slot = 0; j < n; ++j) {
      if (j == i) continue;
      comp.row[slot++] = static_cast<double>(counts(i, j)) / total;
    }
  }
  if (profile.active_count == 0)
    throw Error(ErrorKind::AllZeroMatrix, "no component sent any message");
  return profile;
}

double row_entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0.0) h -= x * std::log(x);
  return std::max(h, 0.0);
}

double shannon_entropy(const SystemProfile& profile) {
  double h = 0.0;
  for (const auto& c : profile.components)
    if (c.active) h += row_entropy(c.row);
  return h;
}

double kl_divergence(std::span<const double> p, std::span<const double> m) {
  require_same_length(p, m);
  double d = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j] <= 0.0) continue;
    if (m[j] <= 0.0)
      throw Error(ErrorKind::SupportViolation,
                  "p is positive where m is zero at index " + std::to_string(j));
    d += p[j] * std::log(p[j] / m[j]);
  }
  return std::max(d, 0.0);
}

double jsd(std::span<const double> p, std::span<const double> r) {
  require_same_length(p, r);
  // Cells where exactly one side is zero contribute (mass) * ln 2; summing
  // that mass separately keeps the result independent of where the
  // disjoint cells sit.
  double overlap = 0.0;
  double disjoint = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    const double a = p[j];
    const double b = r[j];
    if (a > 0.0 && b > 0.0) {
      const double s = a + b;
      overlap += a * std::log(2.0 * a / s) + b * std::log(2.0 * b / s);
    } else if (a > 0.0 || b > 0.0) {
      disjoint += a + b;
    }
  }
  const double d = 0.5 * (overlap + disjoint * std::numbers::ln2);
  return std::clamp(d, 0.0, std::numbers::ln2);
}

double disequilibrium(const SystemProfile& profile) {
  if (profile.active_count == 0)
    throw Error(ErrorKind::AllZeroMatrix, "no active component");
  double q = 0.0;
  for (const auto& c : profile.components)
    if (c.active) q += jsd(c.row, profile.reference_row);
  return q / static_cast<double>(profile.active_count);
}

double q_max(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::BadShape, "q_max needs n >= 2, got " + std::to_string(n));
  const std::size_t k = n - 1;
  std::vector<double> one_hot(k, 0.0);
  one_hot[0] = 1.0;
  const std::vector<double> uniform(k, 1.0 / static_cast<double>(k));
  return jsd(one_hot, uniform);
}

double normalized_h(const SystemProfile& profile) {
  require_normalizable(profile.n);
  const double n = static_cast<double>(profile.n);
  return shannon_entropy(profile) / (n * std::log(n - 1.0));
}

double normalized_q(const SystemProfile& profile) {
  require_normalizable(profile.n);
  return disequilibrium(profile) / q_max(profile.n);
}

ScmResult scm(const SystemProfile& profile) {
  require_normalizable(profile.n);
  if (profile.active_count == 0)
    throw Error(ErrorKind::AllZeroMatrix, "no active component");

  ScmResult out;
  out.per_component.reserve(profile.components.size());
  for (const auto& c : profile.components) {
    ComponentScore s;
    s.active = c.active;
    if (c.active) {
      s.entropy = row_entropy(c.row);
      s.jsd = jsd(c.row, profile.reference_row);
      out.h_raw += s.entropy;
      out.q_raw += s.jsd;
    }
    out.per_component.push_back(s);
  }
  out.q_raw /= static_cast<double>(profile.active_count);

  const double n = static_cast<double>(profile.n);
  out.h_norm = out.h_raw / (n * std::log(n - 1.0));
  out.q_norm = out.q_raw / q_max(profile.n);
  out.scm_raw = out.h_raw * out.q_raw;
  out.scm_hq = out.h_norm * out.q_norm;
  return out;
}

ScmResult analyze(const CountMatrix& counts) {
  ScmResult r = scm(build_profile(counts));
  r.meta = counts.meta;
  return r;
}

ComparisonSet normalize_set(std::vector<std::pair<std::string, ScmResult>> results) {
  if (results.empty()) throw Error(ErrorKind::EmptySet, "nothing to normalize");
  double best = 0.0;
  for (const auto& [label, r] : results) best = std::max(best, r.scm_hq);
  if (!(best > 0.0)) throw Error(ErrorKind::AllZeroSet, "every scm_hq is zero");

  ComparisonSet set;
  set.entries.reserve(results.size());
  for (auto& [label, r] : results) {
    const double bar = r.scm_hq == best ? 1.0 : r.scm_hq / best;
    set.entries.push_back({std::move(label), std::move(r), bar});
  }
  return set;
}

}  // namespace scmnet
