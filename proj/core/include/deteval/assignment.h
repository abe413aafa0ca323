// Dense maximum-weight assignment (Kuhn-Munkres with shortest augmenting
// paths and potentials, O(n^3)).
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace deteval {

// Square row-major weight matrix.
class WeightMatrix {
 public:
  explicit WeightMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * n_, n_}; }

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// Column assigned to each row for a perfect matching maximising the sum of
// weights. Internal arithmetic is done in long double. Deterministic for a
// given matrix.
std::vector<std::size_t> solve_max_weight_assignment(const WeightMatrix& weights);

// Sum of weights along an assignment, accumulated in long double.
long double assignment_weight(const WeightMatrix& weights,
                              std::span<const std::size_t> row_to_col);

}  // namespace deteval
