#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ks2d/matrix.hpp"

namespace ks2d {

/// LU factorization with partial (row) pivoting, PA = LU, stored in place.
///
/// Throws SingularSystem when a pivot falls below pivot_tol * max|A|.
class LuDecomposition {
 public:
  explicit LuDecomposition(Matrix a, double pivot_tol = 1e-14);

  std::size_t size() const { return lu_.rows(); }
  std::vector<double> solve(std::span<const double> b) const;
  /// Solves A X = B column by column.
  Matrix solve(const Matrix& b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace ks2d
