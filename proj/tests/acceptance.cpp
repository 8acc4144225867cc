// Acceptance suite: one line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "ks2d/mms.hpp"
#include "ks2d/stepper.hpp"
#include "ks2d/sylvester.hpp"

using namespace ks2d;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("%s criterion %d (%s): %s; %.2f s of %.0f s%s\n", ok ? "PASS" : "FAIL", id, name, o.detail.c_str(),
              secs, budget_s, in_time ? "" : " [over budget]");
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

mms::ErrorRow table_row(const mms::ManufacturedCase& mcase, int table, int J) {
  const auto& spec = mms::reference_table(table);
  return mms::run_case(mcase, J, spec.power, &spec);
}

std::string stability_note(const mms::ErrorRow& r) {
  return "J=" + std::to_string(r.J) + " max|(U,V)|=" + fmt(r.max_pair_norm) + " vs bound " +
         fmt(2 * r.initial_pair_norm + 1);
}

}  // namespace

int main() {
  const mms::ManufacturedCase mcase;

  criterion(1, "oracle equivalence", 10, [] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int J = 2; J <= 6; ++J) {
      const SpectralBasis b = cosine_eigenbasis(J);
      const Matrix A = neumann_matrix(J);
      for (int d = 0; d < 50;) {
        SchemeParams p;
        p.q = 20.0 * u(rng);
        p.kappa = 2.0 * u(rng);
        p.alpha = u(rng);
        p.sigma = 1.0 + u(rng);
        p.delta = 3.0 + 2.0 * u(rng);
        const Matrix k = spectral_symbol(p, b);
        double mk = INFINITY;
        for (double v : k.values()) mk = std::min(mk, std::abs(v));
        if (mk <= 1e-6) continue;
        Matrix C(J + 1, J + 1);
        for (double& v : C.values()) v = u(rng);
        worst = std::max(worst, relative_frobenius_error(solve_k(p, b, C), kron_solve({k_operator_terms(p, A), C})));
        ++d;
      }
    }
    return Outcome{worst <= 1e-9, "250 draws, max relative Frobenius error " + fmt(worst) + " (<= 1e-9)"};
  });

  criterion(2, "eigenbasis exactness", 1, [] {
    double eig = 0.0, inv = 0.0;
    for (int J : {2, 10, 30, 50}) {
      const auto r = basis_residuals(cosine_eigenbasis(J));
      eig = std::max(eig, r.eigen);
      inv = std::max(inv, r.inverse);
    }
    return Outcome{eig <= 1e-12 && inv <= 1e-12,
                   "max |AP - P diag| = " + fmt(eig) + ", max |P P^-1 - I| = " + fmt(inv) + " (<= 1e-12)"};
  });

  criterion(3, "consistency order", 30, [&] {
    const auto est = mms::truncation_order_check(mcase.solution(), mcase.coefficients, mcase.L0, mcase.L1);
    const bool ok = est.p_space >= 1.7 && est.p_space <= 2.3 && est.p_time >= 1.7 && est.p_time <= 2.3;
    return Outcome{ok, "p_space " + fmt(est.p_space) + ", p_time " + fmt(est.p_time) + " (in [1.7, 2.3])"};
  });

  criterion(4, "steady-state invariance", 5, [&] {
    double worst = 0.0;
    int runs = 0;
    for (int table : {1, 2, 3}) {
      const double power = mms::reference_table(table).power;
      for (int J : {10, 16}) {
        GridSpec g = build_grid(mcase.L0, mcase.L1, J, mcase.t0, mcase.T, power);
        g.N = 1000;
        const SchemeOperators ops(make_scheme_params(mcase.coefficients, g), g);
        for (double c : {0.3, -2.7, 1.0, 123.456}) {
          StepperState s;
          s.U_prev = s.U_curr = Field::constant(g.nodes(), g.nodes(), c);
          s.V_prev = s.V_curr = Field::constant(g.nodes(), g.nodes(), mcase.coefficients.q * c);
          const StepperState s0 = s;
          for (int n = 0; n < 1000; ++n) {
            s = advance(s, ops, Forcing{});
            worst = std::max({worst, max_abs(s.U_curr - s0.U_curr), max_abs(s.V_curr - s0.V_curr)});
          }
          ++runs;
        }
      }
    }
    return Outcome{worst <= 1e-10, std::to_string(runs) + " runs x 1000 steps, max drift " + fmt(worst) +
                                       " (<= 1e-10)"};
  });

  mms::ErrorRow t3_10, t1_10;
  std::vector<mms::ErrorRow> sweep;

  criterion(5, "table 3 row J=10", 5, [&] {
    t3_10 = table_row(mcase, 3, 10);
    const bool ok = t3_10.status == RunStatus::kCompleted && t3_10.Er >= 3.1e-5 && t3_10.Er <= 3.1e-3;
    return Outcome{ok, "N=" + std::to_string(t3_10.computed_N) + " status " + to_string(t3_10.status) + ", Er " +
                           fmt(t3_10.Er) + " (want [3.1e-5, 3.1e-3], reference 3.10e-4)"};
  });

  criterion(6, "table 1 row J=10", 30, [&] {
    t1_10 = table_row(mcase, 1, 10);
    const bool ok = t1_10.status == RunStatus::kCompleted && t1_10.Er >= 1.25e-6 && t1_10.Er <= 1.25e-4;
    return Outcome{ok, "N=" + std::to_string(t1_10.computed_N) + " status " + to_string(t1_10.status) + ", Er " +
                           fmt(t1_10.Er) + " (want [1.25e-6, 1.25e-4], reference 1.25e-5)"};
  });

  criterion(7, "monotone convergence", 120, [&] {
    for (int J : {10, 12, 14, 16}) sweep.push_back(J == 10 ? t3_10 : table_row(mcase, 3, J));
    bool ok = true;
    std::string d = "Er";
    for (const auto& r : sweep) {
      d += " " + fmt(r.Er);
      ok = ok && r.status == RunStatus::kCompleted;
    }
    d += "; ratios";
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      const double ratio = sweep[i - 1].Er / sweep[i].Er;
      d += " " + fmt(ratio);
      ok = ok && sweep[i].Er < sweep[i - 1].Er && ratio >= 2.0;
    }
    return Outcome{ok, d + " (strictly decreasing, ratios >= 2)"};
  });

  criterion(8, "stability bound", 1, [&] {
    bool ok = true;
    std::string d;
    std::vector<mms::ErrorRow> rows{t3_10, t1_10};
    rows.insert(rows.end(), sweep.begin() + 1, sweep.end());
    for (const auto& r : rows) {
      if (!r.stability_bound_holds) {
        ok = false;
        d += (d.empty() ? "" : "; ") + stability_note(r);
      }
    }
    return Outcome{ok, ok ? "all " + std::to_string(rows.size()) + " runs within 2|(U0,V0)| + 1 and finite" : d};
  });

  criterion(9, "beta = 0 variant", 5, [&] {
    mms::ManufacturedCase b0 = mcase;
    b0.coefficients.beta = 0.0;
    const auto r = table_row(b0, 3, 10);
    const double ratio = r.Er / t3_10.Er;
    const bool ok = r.status == RunStatus::kCompleted && ratio >= 0.1 && ratio <= 10.0;
    return Outcome{ok, "status " + to_string(r.status) + ", Er " + fmt(r.Er) + " vs " + fmt(t3_10.Er) +
                          " with beta=1/5 (ratio " + fmt(ratio) + ", want [0.1, 10])"};
  });

  std::printf("%s: %d criteria failed\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
  return failures ? 1 : 0;
}
