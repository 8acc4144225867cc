#pragma once

#include <cstddef>

#include "ks2d/matrix.hpp"

namespace ks2d {

/// Space-time discretization of the square [L0, L1]^2 x [t0, T].
struct GridSpec {
  double L0 = -1.0;
  double L1 = 1.0;
  int J = 10;         ///< subintervals per axis; nodes are 0..J
  double h = 0.2;     ///< (L1 - L0) / J
  double t0 = 0.0;
  double T = 1.0;
  double l = 0.0;     ///< time step
  long long N = 0;    ///< number of steps

  std::size_t nodes() const { return static_cast<std::size_t>(J) + 1; }
  double x(int j) const { return L0 + j * h; }
  double y(int m) const { return L0 + m * h; }
  double t(long long n) const { return t0 + static_cast<double>(n) * l; }

  bool operator==(const GridSpec&) const = default;
};

/// PDE coefficients of u_t = q Lap u - kappa Lap^2 u + lambda |grad u|^2 and
/// the barycentric weights of the three-level scheme.
struct Coefficients {
  double q = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;  ///< weight on U^{n+1}, U^{n-1}
  double beta = 0.0;   ///< weight on V^{n+1}, V^{n-1}

  /// q = 11 pi^2 / 2, kappa = 1, lambda = -2 pi^2, alpha = 1/3, beta = 1/5.
  static Coefficients manufactured_defaults();
};

/// Coefficients bound to a grid, with sigma = 2l/h^2 and delta = 1/h^2.
struct SchemeParams {
  double q = 0.0;
  double kappa = 0.0;
  double lambda = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double sigma = 0.0;
  double delta = 0.0;

  Coefficients coefficients() const { return {q, kappa, lambda, alpha, beta}; }
};

SchemeParams make_scheme_params(const Coefficients& c, const GridSpec& grid);
/// Same as above but with an explicit (h, l) pair.
SchemeParams make_scheme_params(const Coefficients& c, double h, double l);

/// Builds the grid with time step l = h^power * (T - t0) and
/// N = ceil((T - t0) / l), so that t0 + N l >= T by less than one step.
///
/// Throws InvalidArgument for J < 2, L1 <= L0, T <= t0, power <= 0 or any
/// non-finite input.
GridSpec build_grid(double L0, double L1, int J, double t0, double T,
                    double coupling_power);

/// Step count for a span covered by steps of size l (ceil with a relative
/// guard of 1e-9 so that exact multiples are not bumped up).
long long step_count(double span, double l);

/// Neumann second-difference matrix A of size (J+1)x(J+1): tridiagonal
/// (1, -2, 1) with corner rows (-2, 2) and (2, -2).
Matrix neumann_matrix(int J);

/// A X + X A^T for A = neumann_matrix(X.rows()-1), applied by stencil.
Matrix neumann_lyap(const Matrix& X);

}  // namespace ks2d
