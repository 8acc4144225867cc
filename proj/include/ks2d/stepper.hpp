#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ks2d/grid.hpp"
#include "ks2d/matrix.hpp"
#include "ks2d/sylvester.hpp"

namespace ks2d {

/// Grid function; entry (j, m) is the value at (x_j, y_m).
using Field = Matrix;

using SpaceTimeFunction = std::function<double(double x, double y, double t)>;

/// Source term g(x, y, t) of the inhomogeneous problem; empty means g = 0.
class Forcing {
 public:
  Forcing() = default;
  explicit Forcing(SpaceTimeFunction g) : g_(std::move(g)) {}

  bool present() const { return static_cast<bool>(g_); }
  double operator()(double x, double y, double t) const { return g_ ? g_(x, y, t) : 0.0; }
  /// Samples g at every node at time t (zero field when absent).
  Field sample(const GridSpec& grid, double t) const;

 private:
  SpaceTimeFunction g_;
};

/// Samples f(x_j, y_m, t) on the grid.
Field sample_field(const GridSpec& grid, const SpaceTimeFunction& f, double t);

/// Two consecutive time levels of the coupled (U, V) system.
struct StepperState {
  Field U_prev;
  Field V_prev;
  Field U_curr;
  Field V_curr;
  long long n = 0;  ///< level index of U_curr
  double t_curr = 0.0;
};

/// F_{j,m} = 1/4 [(U_{j+1,m} - U_{j-1,m})^2 + (U_{j,m+1} - U_{j,m-1})^2], with
/// Neumann ghost reflection at the boundary.
Field nonlinear_F(const Field& U);

/// Per-run operators shared by every step: the Neumann L_A and the
/// spectral solver for K. Construction throws NearSingular when K is not
/// invertible for these parameters.
class SchemeOperators {
 public:
  SchemeOperators(const SchemeParams& params, const GridSpec& grid);
  SchemeOperators(const SchemeParams& params, const GridSpec& grid, SpectralBasis basis);

  const SchemeParams& params() const { return params_; }
  const GridSpec& grid() const { return grid_; }
  const LyapunovOperator& lyap() const { return lyap_; }
  const SpectralSolver& solver() const { return solver_; }

  Field gamma(const Field& X) const { return gamma_apply(params_, lyap_, X); }

 private:
  SchemeParams params_;
  GridSpec grid_;
  LyapunovOperator lyap_;
  SpectralSolver solver_;
};

/// Right-hand side of K(U^{n+1}) = RHS:
///   U^{n-1} + sigma (1-2 alpha) L_A Gamma U^n + sigma alpha L_A Gamma U^{n-1}
///   + sigma lambda F^n + 2 l G^n.
Field step_rhs(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing);

/// One step of the coupled scheme (beta != 0): U^{n+1} from the K solve, then
/// V^{n+1} from the second line of the coupled system.
/// Throws InvalidArgument for beta == 0, NonFinite if the new level is not
/// finite.
StepperState step(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing);

/// One step of the beta = 0 system. U^{n+1} as in step(); V at level n is
/// alpha Gamma U^{n+1} + (1-2 alpha) Gamma U^n + alpha Gamma U^{n-1} and is
/// stored in V_prev of the returned state. V_curr holds the single-level
/// value Gamma(U^{n+1}) until the next step supplies the barycentric one.
StepperState step_beta0(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing);

/// Dispatches on beta.
StepperState advance(const StepperState& state, const SchemeOperators& ops, const Forcing& forcing);

/// Initial levels from phi:
///   U^0 = phi, V^0 = q U^0 - kappa Lap_h U^0 (or exact_psi),
///   U^{-1} = U^0 + l phi~,  V^{-1} = q U^0 + psi~,
/// where phi~ = -q Lap phi + kappa Lap^2 phi - lambda |grad phi|^2 - g(t0) and
/// psi~ is the matching V-level expression, all with Lap -> delta L_A and
/// |grad phi|^2 -> delta F(phi). The returned state has n = 0.
StepperState bootstrap(const Field& phi, const SchemeOperators& ops, const Forcing& forcing,
                       const std::optional<Field>& exact_psi = std::nullopt);
StepperState bootstrap(const SpaceTimeFunction& phi, const SchemeOperators& ops, const Forcing& forcing,
                       const std::optional<Field>& exact_psi = std::nullopt);

struct NormRecord {
  long long n = 0;
  double t = 0.0;
  double norm_U = 0.0;
  double norm_V = 0.0;
};

struct Snapshot {
  long long n = 0;
  double t = 0.0;
  Field U;
  Field V;
};

enum class RunStatus { kCompleted, kNearSingular, kNonFinite };

std::string to_string(RunStatus status);

struct RunReport {
  GridSpec grid;
  SchemeParams params;
  RunStatus status = RunStatus::kCompleted;
  long long steps_taken = 0;
  std::optional<long long> failed_step;  ///< level index that could not be produced
  std::string message;
  std::vector<NormRecord> norms;  ///< level 0 first, then one per step
  double wall_ms = 0.0;
  /// Filled by the manufactured-solution harness.
  std::optional<double> Er;
  std::optional<double> C;

  /// max_n sqrt(||U^n||^2 + ||V^n||^2) over the recorded levels.
  double max_pair_norm() const;
  double initial_pair_norm() const;
};

struct RunResult {
  RunReport report;
  std::vector<Snapshot> snapshots;
};

/// Called after every produced level (including level 0).
using StepObserver = std::function<void(const StepperState&)>;

/// Takes ops.grid().N - initial.n steps, recording norms every step and
/// snapshots at every level divisible by snapshot_every and at the final
/// level. Stops at the first error and returns the partial report.
RunResult run(const StepperState& initial, const SchemeOperators& ops, const Forcing& forcing,
              long long snapshot_every, const StepObserver& observer = {});

}  // namespace ks2d
