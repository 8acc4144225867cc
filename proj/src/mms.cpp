#include "ks2d/mms.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>

#include "ks2d/errors.hpp"

namespace ks2d::mms {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2.0;

// f(x) = cos^3(pi x / 2) = (3 cos(th) + cos(3 th)) / 4 with th = pi x / 2.
double f0(double x) {
  const double c = std::cos(kHalfPi * x);
  return c * c * c;
}
double f1(double x) {
  const double th = kHalfPi * x;
  return -kHalfPi * (3.0 * std::sin(th) + 3.0 * std::sin(3.0 * th)) / 4.0;
}
double f2(double x) {
  const double th = kHalfPi * x;
  return -kHalfPi * kHalfPi * (3.0 * std::cos(th) + 9.0 * std::cos(3.0 * th)) / 4.0;
}
double f4(double x) {
  const double th = kHalfPi * x;
  const double w4 = kHalfPi * kHalfPi * kHalfPi * kHalfPi;
  return w4 * (3.0 * std::cos(th) + 81.0 * std::cos(3.0 * th)) / 4.0;
}

}  // namespace

std::string to_string(ForcingMode mode) {
  switch (mode) {
    case ForcingMode::kResidual: return "residual";
    case ForcingMode::kPaper: return "paper";
    case ForcingMode::kNone: return "none";
  }
  return "unknown";
}

ForcingMode parse_forcing_mode(const std::string& text) {
  if (text == "residual") return ForcingMode::kResidual;
  if (text == "paper") return ForcingMode::kPaper;
  if (text == "none") return ForcingMode::kNone;
  throw InvalidArgument("unknown forcing mode '" + text + "' (expected residual, paper or none)");
}

double decay(double t) { return std::exp(-kDecayRate * t); }

double exact_u(double x, double y, double t) { return decay(t) * f0(x) * f0(y); }

double exact_v(const Coefficients& c, double x, double y, double t) {
  const double e = decay(t);
  const double fx = f0(x);
  const double fy = f0(y);
  const double lap_u = e * (f2(x) * fy + fx * f2(y));
  return c.q * e * fx * fy - c.kappa * lap_u;
}

double forcing_g(const Coefficients& c, double x, double y, double t, ForcingMode mode) {
  const double e = decay(t);
  switch (mode) {
    case ForcingMode::kNone:
      return 0.0;
    case ForcingMode::kPaper: {
      const double cx = std::cos(kHalfPi * x), sx = std::sin(kHalfPi * x);
      const double cy = std::cos(kHalfPi * y), sy = std::sin(kHalfPi * y);
      const double cx2 = cx * cx, cy2 = cy * cy;
      const double term1 = cx2 * cx2 * sx * sx * cy2 * cy2 * cy2 + cx2 * cx2 * cx2 * cy2 * cy2 * sy * sy;
      const double term2 = cx * sx * sx * cy * sy * sy;
      return kDecayRate * e * (e * term1 - term2);
    }
    case ForcingMode::kResidual: {
      const double fx = f0(x), fy = f0(y);
      const double fx2 = f2(x), fy2 = f2(y);
      const double u_t = -kDecayRate * e * fx * fy;
      const double lap_u = e * (fx2 * fy + fx * fy2);
      const double bilap_u = e * (f4(x) * fy + 2.0 * fx2 * fy2 + fx * f4(y));
      const double lap_v = c.q * lap_u - c.kappa * bilap_u;
      const double ux = e * f1(x) * fy;
      const double uy = e * fx * f1(y);
      return u_t - lap_v - c.lambda * (ux * ux + uy * uy);
    }
  }
  return 0.0;
}

ExactSolution ManufacturedCase::solution() const {
  const Coefficients c = coefficients;
  const ForcingMode mode = forcing_mode;
  ExactSolution s;
  s.u = [](double x, double y, double t) { return exact_u(x, y, t); };
  s.v = [c](double x, double y, double t) { return exact_v(c, x, y, t); };
  if (mode != ForcingMode::kNone) {
    s.g = [c, mode](double x, double y, double t) { return forcing_g(c, x, y, t, mode); };
  }
  return s;
}

Forcing ManufacturedCase::forcing() const {
  auto s = solution();
  return s.g ? Forcing(s.g) : Forcing();
}

double error_Er(const std::vector<Snapshot>& snapshots, const SpaceTimeFunction& u, const GridSpec& grid) {
  if (snapshots.empty()) throw InvalidArgument("error_Er: no snapshots");
  double er = 0.0;
  for (const auto& s : snapshots) {
    Field diff = s.U;
    diff -= sample_field(grid, u, s.t);
    const double e = frobenius_norm(diff);
    if (std::isnan(e)) return e;
    er = std::max(er, e);
  }
  return er;
}

double rate_C(double Er, const GridSpec& grid) { return Er / (grid.l * grid.l + grid.h * grid.h); }

long long error_snapshot_stride(long long N) {
  constexpr long long kMaxSnapshots = 2048;
  return N <= kMaxSnapshots ? 1 : (N + kMaxSnapshots - 1) / kMaxSnapshots;
}

// ---------------------------------------------------------------------------

ResidualFields discrete_residual_fields(const ExactSolution& exact, const Coefficients& c, double L0, double L1,
                                        int J, double l, double t) {
  GridSpec grid;
  grid.L0 = L0;
  grid.L1 = L1;
  grid.J = J;
  grid.h = (L1 - L0) / J;
  grid.t0 = t;
  grid.l = l;
  const SchemeParams p = make_scheme_params(c, grid);
  const auto L = LyapunovOperator::neumann(J);

  const Field u_prev = sample_field(grid, exact.u, t - l);
  const Field u_curr = sample_field(grid, exact.u, t);
  const Field u_next = sample_field(grid, exact.u, t + l);
  const Field v_prev = sample_field(grid, exact.v, t - l);
  const Field v_curr = sample_field(grid, exact.v, t);
  const Field v_next = sample_field(grid, exact.v, t + l);
  const Field g = exact.g ? sample_field(grid, exact.g, t) : Field(grid.nodes(), grid.nodes());

  Field v_bar = p.beta * v_next;
  v_bar.axpy(1.0 - 2.0 * p.beta, v_curr);
  v_bar.axpy(p.beta, v_prev);
  Field u_bar = p.alpha * u_next;
  u_bar.axpy(1.0 - 2.0 * p.alpha, u_curr);
  u_bar.axpy(p.alpha, u_prev);

  // Line 1 divided by 2l:
  //   (U^{n+1} - U^{n-1}) / 2l - delta L_A(V^{n,beta}) - lambda delta F^n - G^n
  const Field dudt = (1.0 / (2.0 * l)) * (u_next - u_prev);
  const Field lap_v = p.delta * L(v_bar);
  const Field nonlinear = (p.lambda * p.delta) * nonlinear_F(u_curr);
  Field r1 = dudt - lap_v - nonlinear - g;

  // Line 2: V^{n,beta} - Gamma(U^{n,alpha})
  const Field gamma_u = gamma_apply(p, L, u_bar);
  Field r2 = v_bar - gamma_u;

  auto interior_max = [J](const Field& f) {
    double m = 0.0;
    for (int j = 1; j < J; ++j)
      for (int k = 1; k < J; ++k) m = std::max(m, std::abs(f(j, k)));
    return m;
  };

  ResidualFields out;
  out.scale1 = std::max({interior_max(dudt), interior_max(lap_v), interior_max(nonlinear), interior_max(g)});
  out.scale2 = std::max(interior_max(v_bar), interior_max(gamma_u));
  out.line1 = std::move(r1);
  out.line2 = std::move(r2);
  return out;
}

namespace {

double interior_max_abs(const Field& f) {
  const std::size_t n = f.rows();
  double m = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j)
    for (std::size_t k = 1; k + 1 < n; ++k) m = std::max(m, std::abs(f(j, k)));
  return m;
}

}  // namespace

ResidualNorms discrete_residual(const ExactSolution& exact, const Coefficients& c, double L0, double L1, int J,
                                double l, double t) {
  const auto f = discrete_residual_fields(exact, c, L0, L1, J, l, t);
  return {interior_max_abs(f.line1), interior_max_abs(f.line2), f.scale1, f.scale2};
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("log_log_slope: need matching samples");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

// Slope of one residual line, or nullopt if fewer than 3 points clear the
// noise floor.
std::optional<double> fit_line(const std::vector<double>& steps, const std::vector<double>& residuals,
                               const std::vector<double>& scales, double noise_floor) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (std::isfinite(residuals[i]) && residuals[i] > noise_floor * std::max(scales[i], 1.0)) {
      xs.push_back(steps[i]);
      ys.push_back(residuals[i]);
    }
  }
  if (xs.size() < 3) return std::nullopt;
  return log_log_slope(xs, ys);
}

struct LineSlopes {
  double line1;
  double line2;
  double order;
};

LineSlopes fit_both(const std::vector<double>& steps, const std::vector<ResidualNorms>& res, double noise_floor,
                    const char* what) {
  std::vector<double> r1, r2, s1, s2;
  for (const auto& r : res) {
    r1.push_back(r.line1);
    r2.push_back(r.line2);
    s1.push_back(r.scale1);
    s2.push_back(r.scale2);
  }
  const auto p1 = fit_line(steps, r1, s1, noise_floor);
  const auto p2 = fit_line(steps, r2, s2, noise_floor);
  if (!p1 && !p2) throw DegenerateFit(std::string("degenerate fit for ") + what + ": residuals at rounding level");
  const double nan = std::nan("");
  LineSlopes out{p1.value_or(nan), p2.value_or(nan), 0.0};
  out.order = (p1 && p2) ? std::min(*p1, *p2) : (p1 ? *p1 : *p2);
  return out;
}

}  // namespace

OrderEstimate truncation_order_check(const ExactSolution& exact, const Coefficients& c, double L0, double L1,
                                     const TruncationSweep& sweep) {
  if (sweep.space_J.size() < 3 || sweep.time_dt.size() < 3) {
    throw DegenerateFit("truncation_order_check needs at least 3 points per sweep");
  }
  if (!std::is_sorted(sweep.space_J.begin(), sweep.space_J.end())) {
    throw InvalidArgument("truncation_order_check: J list must be ascending");
  }
  OrderEstimate est;

  std::vector<double> hs;
  for (int J : sweep.space_J) {
    hs.push_back((L1 - L0) / J);
    est.space_residuals.push_back(discrete_residual(exact, c, L0, L1, J, sweep.space_dt, sweep.t_eval));
  }
  const auto space = fit_both(hs, est.space_residuals, sweep.noise_floor, "space sweep");
  est.p_space_line1 = space.line1;
  est.p_space_line2 = space.line2;
  est.p_space = space.order;

  const double l_ref = 1e-3 * *std::min_element(sweep.time_dt.begin(), sweep.time_dt.end());
  const auto ref = discrete_residual_fields(exact, c, L0, L1, sweep.time_J, l_ref, sweep.t_eval);
  for (double l : sweep.time_dt) {
    const auto f = discrete_residual_fields(exact, c, L0, L1, sweep.time_J, l, sweep.t_eval);
    est.time_residuals.push_back({interior_max_abs(f.line1 - ref.line1), interior_max_abs(f.line2 - ref.line2),
                                  f.scale1, f.scale2});
  }
  const auto time = fit_both(sweep.time_dt, est.time_residuals, sweep.noise_floor, "time sweep");
  est.p_time_line1 = time.line1;
  est.p_time_line2 = time.line2;
  est.p_time = time.order;
  return est;
}

// ---------------------------------------------------------------------------

const TableSpec& reference_table(int id) {
  static const TableSpec t1{1, 4.01,
                            {{10, 640, 1.25e-5},
                             {12, 1320, 2.46e-6},
                             {14, 2450, 6.14e-7},
                             {16, 4183, 1.84e-7},
                             {18, 6707, 6.38e-8},
                             {20, 10233, 2.46e-8},
                             {22, 14997, 1.04e-8},
                             {24, 21258, 4.76e-9},
                             {25, 25039, 3.29e-9},
                             {30, 52015, 6.36e-10}}};
  static const TableSpec t2{2, 3.99,
                            {{10, 616, 1.35e-5},
                             {12, 1273, 2.55e-6},
                             {14, 2355, 6.65e-7},
                             {16, 4012, 2.00e-7},
                             {18, 6419, 6.96e-8},
                             {20, 7973, 4.06e-8},
                             {22, 14295, 1.14e-8},
                             {24, 20228, 5.26e-9},
                             {25, 23806, 3.64e-9},
                             {30, 49273, 7.09e-10}}};
  static const TableSpec t3{3, 3.01,
                            {{10, 128, 3.10e-4},
                             {12, 220, 8.82e-5},
                             {14, 350, 2.99e-5},
                             {16, 523, 1.17e-5},
                             {18, 746, 9.59e-6},
                             {20, 1024, 2.45e-6},
                             {22, 1364, 1.26e-6},
                             {24, 1772, 6.84e-7},
                             {25, 2004, 5.14e-7},
                             {30, 3468, 1.34e-7},
                             {50, 16137, 3.96e-9}}};
  switch (id) {
    case 1: return t1;
    case 2: return t2;
    case 3: return t3;
  }
  throw InvalidArgument("no table " + std::to_string(id) + " (expected 1, 2 or 3)");
}

std::optional<ReferenceRow> reference_row(const TableSpec& table, int J) {
  for (const auto& r : table.rows)
    if (r.J == J) return r;
  return std::nullopt;
}

ErrorRow run_case(const ManufacturedCase& mcase, int J, double power, const TableSpec* reference) {
  const auto start = std::chrono::steady_clock::now();
  ErrorRow row;
  row.J = J;
  if (reference) {
    if (auto pr = reference_row(*reference, J)) row.reference_N = pr->N;
  }
  const GridSpec grid = build_grid(mcase.L0, mcase.L1, J, mcase.t0, mcase.T, power);
  row.computed_N = grid.N;
  row.h = grid.h;
  row.l = grid.l;

  const auto exact = mcase.solution();
  const Forcing forcing = mcase.forcing();
  try {
    const SchemeOperators ops(make_scheme_params(mcase.coefficients, grid), grid);
    const StepperState init =
        bootstrap(exact.u, ops, forcing, sample_field(grid, exact.v, grid.t0));
    const auto result = run(init, ops, forcing, error_snapshot_stride(grid.N));
    row.status = result.report.status;
    row.message = result.report.message;
    row.Er = error_Er(result.snapshots, exact.u, grid);
    row.C = rate_C(row.Er, grid);
    row.max_pair_norm = result.report.max_pair_norm();
    row.initial_pair_norm = result.report.initial_pair_norm();
    row.stability_bound_holds = row.status == RunStatus::kCompleted && std::isfinite(row.max_pair_norm) &&
                                row.max_pair_norm <= 2.0 * row.initial_pair_norm + 1.0;
  } catch (const NearSingular& e) {
    row.status = RunStatus::kNearSingular;
    row.message = e.what();
    row.Er = std::nan("");
    row.C = std::nan("");
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

ErrorTable table_run(const ManufacturedCase& mcase, const std::vector<int>& J_list, double power,
                     const TableSpec* reference, unsigned threads) {
  if (J_list.empty()) throw InvalidArgument("table_run: empty J list");
  for (int J : J_list) {
    if (J < 2) throw InvalidArgument("table_run: J must be >= 2, got " + std::to_string(J));
  }
  ErrorTable table;
  table.power = power;
  table.forcing_mode = mcase.forcing_mode;
  table.coefficients = mcase.coefficients;
  table.rows.resize(J_list.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < J_list.size(); i = next++) {
      table.rows[i] = run_case(mcase, J_list[i], power, reference);
    }
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(J_list.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  return table;
}

}  // namespace ks2d::mms
