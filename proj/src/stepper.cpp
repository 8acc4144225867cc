#include "ks2d/stepper.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "ks2d/errors.hpp"

namespace ks2d {

Field sample_field(const GridSpec& grid, const SpaceTimeFunction& f, double t) {
  const std::size_t n = grid.nodes();
  Field out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.x(static_cast<int>(j));
    for (std::size_t m = 0; m < n; ++m) out(j, m) = f(x, grid.y(static_cast<int>(m)), t);
  }
  return out;
}

Field Forcing::sample(const GridSpec& grid, double t) const {
  if (!g_) return Field(grid.nodes(), grid.nodes());
  return sample_field(grid, g_, t);
}

Field nonlinear_F(const Field& U) {
  if (!U.square() || U.rows() < 3) throw ShapeMismatch("nonlinear_F needs a square field with J >= 2");
  const std::size_t n = U.rows();
  const std::size_t last = n - 1;
  Field F(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    // Ghost reflection makes the centered difference vanish on the boundary.
    const bool edge_j = j == 0 || j == last;
    for (std::size_t m = 0; m < n; ++m) {
      const bool edge_m = m == 0 || m == last;
      const double dx = edge_j ? 0.0 : U(j + 1, m) - U(j - 1, m);
      const double dy = edge_m ? 0.0 : U(j, m + 1) - U(j, m - 1);
      F(j, m) = 0.25 * (dx * dx + dy * dy);
    }
  }
  return F;
}

SchemeOperators::SchemeOperators(const SchemeParams& params, const GridSpec& grid)
    : SchemeOperators(params, grid, cosine_eigenbasis(grid.J)) {}

SchemeOperators::SchemeOperators(const SchemeParams& params, const GridSpec& grid, SpectralBasis basis)
    : params_(params),
      grid_(grid),
      lyap_(LyapunovOperator::neumann(grid.J)),
      solver_(params, std::move(basis)) {
  if (solver_.basis().J != grid.J) throw ShapeMismatch("spectral basis does not match grid");
}

namespace {

void require_state_shape(const StepperState& s, const GridSpec& grid) {
  const std::size_t n = grid.nodes();
  for (const Field* f : {&s.U_prev, &s.V_prev, &s.U_curr, &s.V_curr}) {
    if (f->rows() != n || f->cols() != n) throw ShapeMismatch("stepper state does not match grid");
  }
}

void require_finite(const Field& f, long long level, const char* name) {
  if (!all_finite(f)) {
    throw NonFinite(std::string("non-finite ") + name + " at step " + std::to_string(level));
  }
}

}  // namespace

Field step_rhs(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing) {
  require_state_shape(state, ops.grid());
  const SchemeParams& p = ops.params();
  const auto& L = ops.lyap();
  Field rhs = state.U_prev;
  rhs.axpy(p.sigma * (1.0 - 2.0 * p.alpha), L(ops.gamma(state.U_curr)));
  rhs.axpy(p.sigma * p.alpha, L(ops.gamma(state.U_prev)));
  rhs.axpy(p.sigma * p.lambda, nonlinear_F(state.U_curr));
  if (forcing.present()) rhs.axpy(2.0 * ops.grid().l, forcing.sample(ops.grid(), state.t_curr));
  return rhs;
}

StepperState step(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing) {
  const SchemeParams& p = ops.params();
  if (p.beta == 0.0) throw InvalidArgument("step: beta must be nonzero (use step_beta0)");
  const long long next = state.n + 1;

  Field U_next = ops.solver().solve(step_rhs(state, ops, forcing));
  require_finite(U_next, next, "U");

  // beta V^{n+1} = alpha Gamma U^{n+1} + (1-2 alpha) Gamma U^n + alpha Gamma U^{n-1}
  //              - (1-2 beta) V^n - beta V^{n-1},
  // evaluated for W = V - Gamma U, which obeys the same recurrence driven by
  // (alpha - beta) Gamma(U^{n+1} - 2 U^n + U^{n-1}). Equal in exact
  // arithmetic; this arrangement keeps V = Gamma U exact on steady states.
  const Field gamma_next = ops.gamma(U_next);
  const Field gamma_curr = ops.gamma(state.U_curr);
  const Field W_curr = state.V_curr - gamma_curr;
  const Field W_prev = state.V_prev - ops.gamma(state.U_prev);
  Field second_diff = U_next - 2.0 * state.U_curr;
  second_diff += state.U_prev;
  Field W_next = (p.alpha - p.beta) * ops.gamma(second_diff);
  W_next.axpy(-(1.0 - 2.0 * p.beta), W_curr);
  W_next.axpy(-p.beta, W_prev);
  W_next *= 1.0 / p.beta;
  Field V_next = gamma_next + W_next;
  require_finite(V_next, next, "V");

  return {state.U_curr, state.V_curr, std::move(U_next), std::move(V_next), next, ops.grid().t(next)};
}

StepperState step_beta0(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing) {
  const SchemeParams& p = ops.params();
  if (p.beta != 0.0) throw InvalidArgument("step_beta0: beta must be zero");
  const long long next = state.n + 1;

  Field U_next = ops.solver().solve(step_rhs(state, ops, forcing));
  require_finite(U_next, next, "U");

  // alpha Gamma U^{n+1} + (1-2 alpha) Gamma U^n + alpha Gamma U^{n-1}, grouped
  // as Gamma U^n + alpha Gamma(U^{n+1} - 2 U^n + U^{n-1}).
  Field gamma_next = ops.gamma(U_next);
  Field second_diff = U_next - 2.0 * state.U_curr;
  second_diff += state.U_prev;
  Field V_level_n = ops.gamma(state.U_curr);
  V_level_n.axpy(p.alpha, ops.gamma(second_diff));
  require_finite(V_level_n, state.n, "V");

  return {state.U_curr, std::move(V_level_n), std::move(U_next), std::move(gamma_next), next,
          ops.grid().t(next)};
}

StepperState advance(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing) {
  return ops.params().beta == 0.0 ? step_beta0(state, ops, forcing) : step(state, ops, forcing);
}

StepperState bootstrap(const Field& phi, const SchemeOperators& ops, const Forcing& forcing,
                       const std::optional<Field>& exact_psi) {
  const GridSpec& grid = ops.grid();
  const SchemeParams& p = ops.params();
  if (phi.rows() != grid.nodes() || phi.cols() != grid.nodes()) throw ShapeMismatch("bootstrap: phi");
  require_finite(phi, 0, "initial data");
  if (exact_psi) {
    if (!exact_psi->same_shape(phi)) throw ShapeMismatch("bootstrap: exact psi");
    require_finite(*exact_psi, 0, "initial V");
  }

  const auto& L = ops.lyap();
  auto lap = [&](const Field& X) { return p.delta * L(X); };
  const double l = grid.l;

  const Field lap1 = lap(phi);
  const Field lap2 = lap(lap1);
  const Field lap3 = lap(lap2);
  const Field grad2 = p.delta * nonlinear_F(phi);
  const Field lap_grad2 = lap(grad2);
  const Field g0 = forcing.sample(grid, grid.t0);
  const Field lap_g0 = lap(g0);

  Field phi_tilde = -p.q * lap1;
  phi_tilde.axpy(p.kappa, lap2);
  phi_tilde.axpy(-p.lambda, grad2);
  phi_tilde -= g0;

  Field psi_tilde = -(l * p.q * p.q + p.kappa) * lap1;
  psi_tilde.axpy(2.0 * l * p.kappa * p.q, lap2);
  psi_tilde.axpy(-l * p.kappa * p.kappa, lap3);
  psi_tilde.axpy(-p.lambda * l * p.q, grad2);
  psi_tilde.axpy(p.lambda * l * p.kappa, lap_grad2);
  psi_tilde.axpy(-l * p.q, g0);
  psi_tilde.axpy(l * p.kappa, lap_g0);

  StepperState s;
  s.U_curr = phi;
  if (exact_psi) {
    s.V_curr = *exact_psi;
  } else {
    s.V_curr = p.q * phi;
    s.V_curr.axpy(-p.kappa, lap1);
  }
  s.U_prev = phi;
  s.U_prev.axpy(l, phi_tilde);
  s.V_prev = p.q * phi;
  s.V_prev += psi_tilde;
  s.n = 0;
  s.t_curr = grid.t0;
  return s;
}

StepperState bootstrap(const SpaceTimeFunction& phi, const SchemeOperators& ops, const Forcing& forcing,
                       const std::optional<Field>& exact_psi) {
  return bootstrap(sample_field(ops.grid(), phi, ops.grid().t0), ops, forcing, exact_psi);
}

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kNearSingular: return "near_singular";
    case RunStatus::kNonFinite: return "non_finite";
  }
  return "unknown";
}

double RunReport::max_pair_norm() const {
  double m = 0.0;
  for (const auto& r : norms) m = std::max(m, std::hypot(r.norm_U, r.norm_V));
  return m;
}

double RunReport::initial_pair_norm() const {
  return norms.empty() ? 0.0 : std::hypot(norms.front().norm_U, norms.front().norm_V);
}

RunResult run(const StepperState& initial, const SchemeOperators& ops, const Forcing& forcing,
              long long snapshot_every, const StepObserver& observer) {
  if (snapshot_every < 1) throw InvalidArgument("run: snapshot_every must be >= 1");
  require_state_shape(initial, ops.grid());
  const auto start = std::chrono::steady_clock::now();

  RunResult result;
  RunReport& report = result.report;
  report.grid = ops.grid();
  report.params = ops.params();

  auto record = [&](const StepperState& s, bool force_snapshot) {
    report.norms.push_back({s.n, s.t_curr, frobenius_norm(s.U_curr), frobenius_norm(s.V_curr)});
    if (force_snapshot || s.n % snapshot_every == 0) {
      result.snapshots.push_back({s.n, s.t_curr, s.U_curr, s.V_curr});
    }
    if (observer) observer(s);
  };

  const long long last = ops.grid().N;
  StepperState state = initial;
  record(state, state.n >= last);
  while (state.n < last) {
    try {
      state = advance(state, ops, forcing);
    } catch (const NonFinite& e) {
      report.status = RunStatus::kNonFinite;
      report.failed_step = state.n + 1;
      report.message = e.what();
      break;
    }
    ++report.steps_taken;
    record(state, state.n == last);
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace ks2d
