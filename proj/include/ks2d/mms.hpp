#pragma once

// Manufactured-solution harness on [-1, 1]^2 x [0, 1] with
//   u(x, y, t) = e(t) C^3(x) C^3(y),  C(x) = cos(pi x / 2),  e(t) = exp(-K t),
//   K = 9 pi^4 / 2,  v = q u - kappa Lap u.

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ks2d/errors.hpp"
#include "ks2d/grid.hpp"
#include "ks2d/stepper.hpp"

namespace ks2d::mms {

enum class ForcingMode {
  kResidual,  ///< g = u_t - Lap v - lambda |grad u|^2 in closed form
  kPaper,     ///< alternative closed-form source, kept for comparison
  kNone,
};

std::string to_string(ForcingMode mode);
ForcingMode parse_forcing_mode(const std::string& text);

inline constexpr double kDecayRate =
    9.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi * std::numbers::pi / 2.0;

double decay(double t);

double exact_u(double x, double y, double t);
double exact_v(const Coefficients& c, double x, double y, double t);
double forcing_g(const Coefficients& c, double x, double y, double t, ForcingMode mode = ForcingMode::kResidual);

/// Exact (u, v) pair and the source that goes with it.
struct ExactSolution {
  SpaceTimeFunction u;
  SpaceTimeFunction v;
  SpaceTimeFunction g;  ///< may be empty (no source)
};

/// The manufactured case with its parameter preset.
struct ManufacturedCase {
  Coefficients coefficients = Coefficients::manufactured_defaults();
  ForcingMode forcing_mode = ForcingMode::kResidual;
  double L0 = -1.0;
  double L1 = 1.0;
  double t0 = 0.0;
  double T = 1.0;

  ExactSolution solution() const;
  Forcing forcing() const;
};

/// max over snapshots of ||U^n - u(., ., t_n)||_F. Throws InvalidArgument
/// when there are no snapshots.
double error_Er(const std::vector<Snapshot>& snapshots, const SpaceTimeFunction& u, const GridSpec& grid);

/// Er / (l^2 + h^2).
double rate_C(double Er, const GridSpec& grid);

/// Snapshot cadence used for Er: every step up to 2048 steps, otherwise
/// every ceil(N / 2048) steps.
long long error_snapshot_stride(long long N);

// ---------------------------------------------------------------------------
// Consistency order

/// Max-norm of the discrete residual of both lines of the coupled scheme
/// over interior nodes, with exact data injected at levels n-1, n, n+1.
struct ResidualNorms {
  double line1 = 0.0;
  double line2 = 0.0;
  double scale1 = 0.0;  ///< magnitude of the largest term in line 1
  double scale2 = 0.0;
};

struct ResidualFields {
  Field line1;
  Field line2;
  double scale1 = 0.0;
  double scale2 = 0.0;
};

ResidualFields discrete_residual_fields(const ExactSolution& exact, const Coefficients& c, double L0, double L1,
                                        int J, double l, double t);
ResidualNorms discrete_residual(const ExactSolution& exact, const Coefficients& c, double L0, double L1, int J,
                                double l, double t);

struct TruncationSweep {
  std::vector<int> space_J{8, 16, 32};
  double space_dt = 1e-6;
  std::vector<double> time_dt{1e-3, 5e-4, 2.5e-4};
  int time_J = 64;
  double t_eval = 0.0;
  /// Residuals below this fraction of the line's term scale are treated as
  /// rounding noise and excluded from the fit.
  double noise_floor = 1e-10;
};

struct OrderEstimate {
  double p_space = 0.0;
  double p_time = 0.0;
  double p_space_line1 = 0.0;
  double p_space_line2 = 0.0;
  double p_time_line1 = 0.0;
  double p_time_line2 = 0.0;
  std::vector<ResidualNorms> space_residuals;
  std::vector<ResidualNorms> time_residuals;  ///< time part only
};

/// Thrown when fewer than three residuals rise above the noise floor.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

/// Least-squares slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Space sweep at fixed tiny l; time sweep at fixed fine J where the time
/// part is isolated as R(J, l) - R(J, l_ref) with l_ref = 1e-3 min(l).
/// Reported orders are the smaller of the two lines' slopes.
OrderEstimate truncation_order_check(const ExactSolution& exact, const Coefficients& c, double L0, double L1,
                                     const TruncationSweep& sweep = {});

// ---------------------------------------------------------------------------
// Convergence tables

struct ReferenceRow {
  int J = 0;
  long long N = 0;
  double Er = 0.0;
};

struct TableSpec {
  int id = 0;
  double power = 0.0;  ///< l = h^power
  std::vector<ReferenceRow> rows;
};

/// Reference rows for tables 1-3 (powers 4.01, 3.99, 3.01). Throws
/// InvalidArgument for other ids.
const TableSpec& reference_table(int id);
std::optional<ReferenceRow> reference_row(const TableSpec& table, int J);

struct ErrorRow {
  int J = 0;
  std::optional<long long> reference_N;
  long long computed_N = 0;
  double h = 0.0;
  double l = 0.0;
  double Er = 0.0;
  double C = 0.0;
  double wall_ms = 0.0;
  RunStatus status = RunStatus::kCompleted;
  std::string message;
  double max_pair_norm = 0.0;
  double initial_pair_norm = 0.0;
  bool stability_bound_holds = false;  ///< max ||(U,V)|| <= 2 ||(U0,V0)|| + 1, all finite
};

struct ErrorTable {
  double power = 0.0;
  ForcingMode forcing_mode = ForcingMode::kResidual;
  Coefficients coefficients;
  std::vector<ErrorRow> rows;
};

/// Full simulation for one J: bootstrap from exact data, run to T with the
/// case's forcing, Er and C from snapshots. Failures are recorded in the
/// row, not thrown.
ErrorRow run_case(const ManufacturedCase& mcase, int J, double power, const TableSpec* reference = nullptr);

/// One row per J; rows are computed on up to `threads` worker threads.
ErrorTable table_run(const ManufacturedCase& mcase, const std::vector<int>& J_list, double power,
                     const TableSpec* reference = nullptr, unsigned threads = 1);

}  // namespace ks2d::mms
