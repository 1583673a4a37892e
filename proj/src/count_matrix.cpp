#include "scmnet/count_matrix.hpp"

#include <numeric>

#include "scmnet/error.hpp"

namespace scmnet {

CountMatrix::CountMatrix(std::size_t n) : n_(n), counts_(n * n, 0) {}

CountMatrix::CountMatrix(std::size_t n, std::vector<std::uint64_t> counts)
    : n_(n), counts_(std::move(counts)) {
  validate();
}

std::uint64_t CountMatrix::row_sum(std::size_t i) const {
  const auto first = counts_.begin() + static_cast<std::ptrdiff_t>(i * n_);
  return std::accumulate(first, first + static_cast<std::ptrdiff_t>(n_), std::uint64_t{0});
}

std::uint64_t CountMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

void CountMatrix::validate() const {
  if (n_ < 2) throw Error(ErrorKind::BadShape, "count matrix needs n >= 2, got " + std::to_string(n_));
  if (counts_.size() != n_ * n_)
    throw Error(ErrorKind::BadShape, "count matrix storage is not n x n");
  if (!labels.empty() && labels.size() != n_)
    throw Error(ErrorKind::BadShape, "label count does not match n");
  for (std::size_t i = 0; i < n_; ++i) {
    if ((*this)(i, i) != 0)
      throw Error(ErrorKind::BadShape, "nonzero diagonal at component " + std::to_string(i));
  }
}

std::vector<std::string> CountMatrix::effective_labels() const {
  if (!labels.empty()) return labels;
  std::vector<std::string> out;
  out.reserve(n_);
  for (std::size_t i = 0; i < n_; ++i) out.push_back("c" + std::to_string(i));
  return out;
}

}  // namespace scmnet
