#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace scmnet {

struct RunMeta {
  std::string label;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::string config;
};

/// Dense n x n matrix of sent-message counts; counts(i, j) is the number of
/// messages component i sent to component j.
class CountMatrix {
 public:
  CountMatrix() = default;
  explicit CountMatrix(std::size_t n);
  CountMatrix(std::size_t n, std::vector<std::uint64_t> counts);

  std::size_t size() const noexcept { return n_; }

  std::uint64_t operator()(std::size_t i, std::size_t j) const { return counts_[i * n_ + j]; }
  std::uint64_t& operator()(std::size_t i, std::size_t j) { return counts_[i * n_ + j]; }

  const std::vector<std::uint64_t>& data() const noexcept { return counts_; }

  std::uint64_t row_sum(std::size_t i) const;
  std::uint64_t total() const;

  /// Throws BadShape when n < 2, the storage is not n*n, or the diagonal is
  /// nonzero.
  void validate() const;

  /// Component labels; empty means "c0".."c{n-1}".
  std::vector<std::string> labels;
  RunMeta meta;

  std::vector<std::string> effective_labels() const;

  friend bool operator==(const CountMatrix& a, const CountMatrix& b) {
    return a.n_ == b.n_ && a.counts_ == b.counts_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> counts_;
};

}  // namespace scmnet
