#pragma once

// Test-side oracles. Nothing here calls the library's solvers, so agreement
// with them is a genuine cross-check.

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ks2d/matrix.hpp"

namespace ks2d::testing {

inline Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  Matrix m(r, c);
  for (double& v : m.values()) v = d(rng);
  return m;
}

/// Neumann matrix written out directly from its entry rule.
inline Matrix reference_neumann(int J) {
  const std::size_t n = static_cast<std::size_t>(J) + 1;
  Matrix a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    a(j, j) = -2.0;
    if (j > 0) a(j, j - 1) = 1.0;
    if (j + 1 < n) a(j, j + 1) = 1.0;
  }
  a(0, 1) = 2.0;
  a(n - 1, n - 2) = 2.0;
  return a;
}

/// Plain triple-loop product, independent of the library's kernel.
inline Matrix naive_product(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

/// Gauss-Jordan with full pivoting on a copy.
inline std::vector<double> gauss_solve(std::vector<std::vector<double>> g, std::vector<double> b) {
  const std::size_t n = b.size();
  std::vector<std::size_t> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = i;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pr = k, pc = k;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (std::abs(g[i][j]) > std::abs(g[pr][pc])) pr = i, pc = j;
    if (g[pr][pc] == 0.0) throw std::runtime_error("gauss_solve: singular");
    std::swap(g[k], g[pr]);
    std::swap(b[k], b[pr]);
    if (pc != k) {
      for (auto& row : g) std::swap(row[k], row[pc]);
      std::swap(col[k], col[pc]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k) continue;
      const double f = g[i][k] / g[k][k];
      if (f == 0.0) continue;
      for (std::size_t j = k; j < n; ++j) g[i][j] -= f * g[k][j];
      b[i] -= f * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) x[col[k]] = b[k] / g[k][k];
  return x;
}

/// Solves op(X) = C for a linear map on n x n matrices by probing op with
/// the unit matrices and solving the assembled n^2 system.
inline Matrix probe_solve(const std::function<Matrix(const Matrix&)>& op, const Matrix& C) {
  const std::size_t n = C.rows();
  const std::size_t nn = n * n;
  std::vector<std::vector<double>> g(nn, std::vector<double>(nn));
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      Matrix e(n, n);
      e(i, j) = 1.0;
      const Matrix col = op(e);
      for (std::size_t cj = 0; cj < n; ++cj)
        for (std::size_t ci = 0; ci < n; ++ci) g[ci + cj * n][i + j * n] = col(ci, cj);
    }
  std::vector<double> b(nn);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) b[i + j * n] = C(i, j);
  const auto x = gauss_solve(std::move(g), std::move(b));
  Matrix X(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) X(i, j) = x[i + j * n];
  return X;
}

inline double rel_err(const Matrix& a, const Matrix& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    num += (a.values()[i] - b.values()[i]) * (a.values()[i] - b.values()[i]);
    den += b.values()[i] * b.values()[i];
  }
  return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

inline double max_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values().size(); ++i) m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  return m;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("ks2d_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace ks2d::testing
