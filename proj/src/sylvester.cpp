#include "ks2d/sylvester.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ks2d/dense_lu.hpp"
#include "ks2d/errors.hpp"

namespace ks2d {

LyapunovOperator::LyapunovOperator(Matrix a) : n_(a.rows()), dense_(std::move(a)) {
  if (!dense_->square()) throw ShapeMismatch("Lyapunov operator needs a square matrix");
}

LyapunovOperator LyapunovOperator::neumann(int J) {
  if (J < 2) throw InvalidArgument("neumann operator: J must be >= 2");
  LyapunovOperator op;
  op.n_ = static_cast<std::size_t>(J) + 1;
  return op;
}

Matrix LyapunovOperator::operator()(const Matrix& X) const {
  if (X.rows() != n_ || X.cols() != n_) throw ShapeMismatch("Lyapunov operand");
  if (!dense_) return neumann_lyap(X);
  return *dense_ * X + X * dense_->transposed();
}

Matrix LyapunovOperator::matrix() const {
  return dense_ ? *dense_ : neumann_matrix(static_cast<int>(n_) - 1);
}

Matrix lyap_apply(const Matrix& A, const Matrix& X) {
  if (!A.square() || !A.same_shape(X)) throw ShapeMismatch("lyap_apply");
  return A * X + X * A.transposed();
}

Matrix gamma_apply(const SchemeParams& params, const LyapunovOperator& lyap, const Matrix& X) {
  Matrix out = params.q * X;
  out.axpy(-params.delta * params.kappa, lyap(X));
  return out;
}

Matrix gamma_apply(const SchemeParams& params, const Matrix& A, const Matrix& X) {
  if (!A.same_shape(X)) throw ShapeMismatch("gamma_apply");
  return gamma_apply(params, LyapunovOperator(A), X);
}

Matrix k_apply(const SchemeParams& params, const LyapunovOperator& lyap, const Matrix& X) {
  Matrix out = X;
  out.axpy(-params.sigma * params.alpha, gamma_apply(params, lyap, lyap(X)));
  return out;
}

Matrix k_apply(const SchemeParams& params, const Matrix& A, const Matrix& X) {
  if (!A.same_shape(X)) throw ShapeMismatch("k_apply");
  return k_apply(params, LyapunovOperator(A), X);
}

SpectralBasis cosine_eigenbasis(int J) {
  if (J < 2) throw InvalidArgument("cosine_eigenbasis: J must be >= 2");
  const auto n = static_cast<std::size_t>(J) + 1;
  SpectralBasis b;
  b.J = J;
  b.eigenvalues.resize(n);
  b.P = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = static_cast<double>(k) * std::numbers::pi / J;
    // -4 sin^2(theta/2) avoids the cancellation in 2 cos(theta) - 2 near k = 0.
    const double s = std::sin(0.5 * theta);
    b.eigenvalues[k] = -4.0 * s * s;
    double norm2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      // Reduce k*j mod 2J so the cosine argument stays in [0, 2 pi).
      const auto kj = static_cast<double>((k * j) % (2 * n - 2));
      const double v = std::cos(kj * std::numbers::pi / J);
      b.P(j, k) = v;
      norm2 += v * v;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t j = 0; j < n; ++j) b.P(j, k) *= inv;
  }
  b.P_inv = LuDecomposition(b.P).inverse();
  return b;
}

BasisResiduals basis_residuals(const SpectralBasis& basis) {
  const Matrix A = neumann_matrix(basis.J);
  Matrix lhs = A * basis.P;
  for (std::size_t i = 0; i < lhs.rows(); ++i)
    for (std::size_t k = 0; k < lhs.cols(); ++k) lhs(i, k) -= basis.P(i, k) * basis.eigenvalues[k];
  Matrix eye = basis.P * basis.P_inv;
  eye -= Matrix::identity(eye.rows());
  return {max_abs(lhs), max_abs(eye)};
}

Matrix spectral_symbol(const SchemeParams& params, const SpectralBasis& basis) {
  const std::size_t n = basis.eigenvalues.size();
  Matrix k(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double mu = basis.eigenvalues[i] + basis.eigenvalues[j];
      k(i, j) = 1.0 - params.sigma * params.alpha * (params.q * mu - params.delta * params.kappa * mu * mu);
    }
  return k;
}

SpectralSolver::SpectralSolver(const SchemeParams& params, SpectralBasis basis)
    : basis_(std::move(basis)),
      symbol_(spectral_symbol(params, basis_)),
      P_t_(basis_.P.transposed()),
      P_inv_t_(basis_.P_inv.transposed()) {
  min_abs_symbol_ = std::abs(symbol_(0, 0));
  for (double v : symbol_.values()) min_abs_symbol_ = std::min(min_abs_symbol_, std::abs(v));
  if (!(min_abs_symbol_ > kSingularSymbolThreshold)) {
    throw NearSingular("step operator is singular: min |k| = " + std::to_string(min_abs_symbol_) +
                           " (time step too large for this grid)",
                       min_abs_symbol_);
  }
}

Matrix SpectralSolver::solve(const Matrix& C) const {
  if (!C.same_shape(symbol_)) throw ShapeMismatch("solve_k right-hand side");
  // K fixes constant fields, so X = c + K^-1(C - c) for any reference value
  // c. Taking c from C itself keeps constant data exact through the solve.
  const double shift = C.rows() > 0 ? C(0, 0) : 0.0;
  Matrix centered = C;
  for (double& v : centered.values()) v -= shift;
  const Matrix modal = divide_entrywise(basis_.P_inv * centered * P_inv_t_, symbol_);
  Matrix X = basis_.P * modal * P_t_;
  for (double& v : X.values()) v += shift;
  return X;
}

Matrix solve_k(const SchemeParams& params, const SpectralBasis& basis, const Matrix& C) {
  return SpectralSolver(params, basis).solve(C);
}

std::vector<std::pair<Matrix, Matrix>> k_operator_terms(const SchemeParams& params, const Matrix& A) {
  // K = I - sigma alpha (q L_A - delta kappa L_A^2), with
  // L_A^2(X) = A^2 X + 2 A X A^T + X (A^2)^T.
  const std::size_t n = A.rows();
  const Matrix I = Matrix::identity(n);
  const Matrix At = A.transposed();
  const Matrix A2 = A * A;
  const double sa = params.sigma * params.alpha;
  const double sadk = sa * params.delta * params.kappa;
  return {
      {I, I},
      {(-sa * params.q) * A, I},
      {(-sa * params.q) * I, At},
      {sadk * A2, I},
      {(2.0 * sadk) * A, At},
      {sadk * I, A2.transposed()},
  };
}

Matrix kron_solve(const GeneralSylvesterProblem& problem) {
  if (problem.terms.empty()) throw InvalidArgument("kron_solve: no terms");
  const Matrix& C = problem.rhs;
  if (!C.square()) throw ShapeMismatch("kron_solve right-hand side must be square");
  for (const auto& [a, b] : problem.terms) {
    if (!a.same_shape(C) || !b.same_shape(C)) throw ShapeMismatch("kron_solve term");
  }
  const std::size_t n = C.rows();
  if (n * n > kKronSolveMaxUnknowns) {
    throw SizeLimit("kron_solve: " + std::to_string(n * n) + " unknowns exceeds limit " +
                    std::to_string(kKronSolveMaxUnknowns));
  }
  Matrix G(n * n, n * n);
  for (const auto& [a, b] : problem.terms) G += kron(b.transposed(), a);
  const LuDecomposition lu(std::move(G));
  return unvec(lu.solve(vec(C)), n, n);
}

}  // namespace ks2d
