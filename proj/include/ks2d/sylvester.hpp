#pragma once

// Lyapunov-Sylvester operator algebra for the step equation
//
//   K(X) = X - sigma alpha Gamma(L_A(X)) = C,
//   L_A(X)   = A X + X A^T,
//   Gamma(X) = q X - delta kappa L_A(X),
//
// with a spectral solver (A diagonalized in its cosine eigenbasis) and a
// Kronecker-vectorized dense solver for general sum_i A_i X B_i = C.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ks2d/grid.hpp"
#include "ks2d/matrix.hpp"

namespace ks2d {

/// X -> A X + X A^T. Either backed by a dense A or by the Neumann stencil.
class LyapunovOperator {
 public:
  explicit LyapunovOperator(Matrix a);
  /// Stencil form of neumann_matrix(J); O(J^2) per application.
  static LyapunovOperator neumann(int J);

  std::size_t size() const { return n_; }
  Matrix operator()(const Matrix& X) const;
  /// The matrix A (materialized for the stencil variant).
  Matrix matrix() const;

 private:
  LyapunovOperator() = default;
  std::size_t n_ = 0;
  std::optional<Matrix> dense_;
};

Matrix lyap_apply(const Matrix& A, const Matrix& X);

Matrix gamma_apply(const SchemeParams& params, const LyapunovOperator& lyap, const Matrix& X);
Matrix gamma_apply(const SchemeParams& params, const Matrix& A, const Matrix& X);

Matrix k_apply(const SchemeParams& params, const LyapunovOperator& lyap, const Matrix& X);
Matrix k_apply(const SchemeParams& params, const Matrix& A, const Matrix& X);

/// Eigen-decomposition A P = P diag(eigenvalues) of the Neumann matrix.
struct SpectralBasis {
  int J = 0;
  std::vector<double> eigenvalues;
  Matrix P;      ///< column k is the unit-norm eigenvector v_k
  Matrix P_inv;  ///< A is not symmetric, so P is not orthogonal
};

/// lambda_k = 2 cos(k pi / J) - 2, v_k(j) = cos(k pi j / J) normalized;
/// P_inv by LU solve against P.
SpectralBasis cosine_eigenbasis(int J);

/// Max-norm residuals of the basis against neumann_matrix(J).
struct BasisResiduals {
  double eigen = 0.0;    ///< max |A P - P diag(lambda)|
  double inverse = 0.0;  ///< max |P P_inv - I|
};
BasisResiduals basis_residuals(const SpectralBasis& basis);

/// k[i][j] = 1 - sigma alpha (q mu - delta kappa mu^2), mu = lambda_i + lambda_j.
Matrix spectral_symbol(const SchemeParams& params, const SpectralBasis& basis);

inline constexpr double kSingularSymbolThreshold = 1e-12;

/// Solves K(X) = C in the eigenbasis: X = P ((P^-1 C P^-T) ./ k) P^T.
/// Throws NearSingular if some |k[i][j]| <= kSingularSymbolThreshold.
Matrix solve_k(const SchemeParams& params, const SpectralBasis& basis, const Matrix& C);

/// solve_k with the symbol and transposes precomputed; reused every step.
class SpectralSolver {
 public:
  SpectralSolver(const SchemeParams& params, SpectralBasis basis);

  Matrix solve(const Matrix& C) const;
  const SpectralBasis& basis() const { return basis_; }
  const Matrix& symbol() const { return symbol_; }
  double min_abs_symbol() const { return min_abs_symbol_; }

 private:
  SpectralBasis basis_;
  Matrix symbol_;
  Matrix P_t_;
  Matrix P_inv_t_;
  double min_abs_symbol_ = 0.0;
};

/// sum_i A_i X B_i = C.
struct GeneralSylvesterProblem {
  std::vector<std::pair<Matrix, Matrix>> terms;
  Matrix rhs;
};

inline constexpr std::size_t kKronSolveMaxUnknowns = 4096;

/// Assembles G = sum_i (B_i^T kron A_i) (column-stacking vec) and solves
/// G vec(X) = vec(C) by LU with partial pivoting.
/// Throws SizeLimit above kKronSolveMaxUnknowns unknowns, SingularSystem on a
/// vanishing pivot, InvalidArgument / ShapeMismatch on malformed problems.
Matrix kron_solve(const GeneralSylvesterProblem& problem);

/// Term set of K written as sum_i A_i X B_i, for use with kron_solve.
std::vector<std::pair<Matrix, Matrix>> k_operator_terms(const SchemeParams& params, const Matrix& A);

}  // namespace ks2d
