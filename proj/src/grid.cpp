#include "ks2d/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "ks2d/errors.hpp"

namespace ks2d {

Coefficients Coefficients::manufactured_defaults() {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return {11.0 * pi2 / 2.0, 1.0, -2.0 * pi2, 1.0 / 3.0, 1.0 / 5.0};
}

SchemeParams make_scheme_params(const Coefficients& c, double h, double l) {
  SchemeParams p;
  p.q = c.q;
  p.kappa = c.kappa;
  p.lambda = c.lambda;
  p.alpha = c.alpha;
  p.beta = c.beta;
  p.sigma = 2.0 * l / (h * h);
  p.delta = 1.0 / (h * h);
  return p;
}

SchemeParams make_scheme_params(const Coefficients& c, const GridSpec& grid) {
  return make_scheme_params(c, grid.h, grid.l);
}

long long step_count(double span, double l) {
  const double ratio = span / l;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * nearest) return static_cast<long long>(nearest);
  return static_cast<long long>(std::ceil(ratio));
}

GridSpec build_grid(double L0, double L1, int J, double t0, double T,
                    double coupling_power) {
  for (double v : {L0, L1, t0, T, coupling_power}) {
    if (!std::isfinite(v)) throw InvalidArgument("build_grid: non-finite input");
  }
  if (J < 2) throw InvalidArgument("build_grid: J must be >= 2, got " + std::to_string(J));
  if (!(L1 > L0)) throw InvalidArgument("build_grid: requires L1 > L0");
  if (!(T > t0)) throw InvalidArgument("build_grid: requires T > t0");
  if (!(coupling_power > 0.0)) throw InvalidArgument("build_grid: coupling power must be positive");

  GridSpec g;
  g.L0 = L0;
  g.L1 = L1;
  g.J = J;
  g.h = (L1 - L0) / J;
  g.t0 = t0;
  g.T = T;
  g.l = std::pow(g.h, coupling_power) * (T - t0);
  if (!(g.l > 0.0) || !std::isfinite(g.l)) throw InvalidArgument("build_grid: degenerate time step");
  g.N = step_count(T - t0, g.l);
  return g;
}

Matrix neumann_matrix(int J) {
  if (J < 2) throw InvalidArgument("neumann_matrix: J must be >= 2");
  const auto n = static_cast<std::size_t>(J) + 1;
  Matrix A(n, n);
  A(0, 0) = -2.0;
  A(0, 1) = 2.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    A(j, j - 1) = 1.0;
    A(j, j) = -2.0;
    A(j, j + 1) = 1.0;
  }
  A(n - 1, n - 2) = 2.0;
  A(n - 1, n - 1) = -2.0;
  return A;
}

Matrix neumann_lyap(const Matrix& X) {
  if (!X.square() || X.rows() < 3) throw ShapeMismatch("neumann_lyap needs a square field with J >= 2");
  const std::size_t n = X.rows();
  const std::size_t last = n - 1;
  // Ghost reflection: X(-1, m) = X(1, m), X(J+1, m) = X(J-1, m); same in m.
  auto nb = [last](std::size_t i, int d) -> std::size_t {
    if (i == 0 && d < 0) return 1;
    if (i == last && d > 0) return last - 1;
    return d < 0 ? i - 1 : i + 1;
  };
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = nb(i, -1);
    const std::size_t ip = nb(i, +1);
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t jm = nb(j, -1);
      const std::size_t jp = nb(j, +1);
      const double c = X(i, j);
      out(i, j) = (X(im, j) - 2.0 * c + X(ip, j)) + (X(i, jm) - 2.0 * c + X(i, jp));
    }
  }
  return out;
}

}  // namespace ks2d
