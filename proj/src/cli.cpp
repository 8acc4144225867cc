#include "ks2d/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "ks2d/dense_lu.hpp"
#include "ks2d/stepper.hpp"
#include "ks2d/sylvester.hpp"

namespace ks2d::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(const std::string& s) {
  long long v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return v;
}

// `where` is "line N" for file entries and "flag --key" for overrides.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  if (value.empty()) throw MissingKey("missing value for key '" + key + "' at " + where);
  auto real = [&](double& dst) {
    const auto v = to_double(value);
    if (!v) throw TypeError("key '" + key + "' at " + where + ": expected a number, got '" + value + "'");
    dst = *v;
  };
  auto integer = [&]() {
    const auto v = to_integer(value);
    if (!v) throw TypeError("key '" + key + "' at " + where + ": expected an integer, got '" + value + "'");
    return *v;
  };

  if (key == "L0") real(cfg.L0);
  else if (key == "L1") real(cfg.L1);
  else if (key == "t0") real(cfg.t0);
  else if (key == "T") real(cfg.T);
  else if (key == "J") {
    const long long j = integer();
    if (j < 2 || j > 1'000'000) throw TypeError("key 'J' at " + where + ": out of range");
    cfg.J = static_cast<int>(j);
  } else if (key == "power" || key == "coupling_power") real(cfg.coupling_power);
  else if (key == "q") real(cfg.coefficients.q);
  else if (key == "kappa") real(cfg.coefficients.kappa);
  else if (key == "lambda") real(cfg.coefficients.lambda);
  else if (key == "alpha") real(cfg.coefficients.alpha);
  else if (key == "beta") real(cfg.coefficients.beta);
  else if (key == "forcing") {
    try {
      cfg.forcing_mode = mms::parse_forcing_mode(value);
    } catch (const InvalidArgument&) {
      throw TypeError("key 'forcing' at " + where + ": expected residual, paper or none, got '" + value + "'");
    }
  } else if (key == "initial") {
    try {
      cfg.initial = InitialData::parse(value);
    } catch (const InvalidArgument& e) {
      throw TypeError("key 'initial' at " + where + ": " + e.what());
    }
  } else if (key == "snapshot_every") {
    cfg.snapshot_every = integer();
    if (cfg.snapshot_every < 0) throw TypeError("key 'snapshot_every' at " + where + ": must be >= 0");
  } else if (key == "out_dir") cfg.out_dir = value;
  else throw UnknownKey("unknown key '" + key + "' at " + where);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// NaN and infinities have no JSON literal.
ordered_json json_number(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

ordered_json json_number(const std::optional<double>& v) {
  if (!v) return nullptr;
  return json_number(*v);
}

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["L0"] = c.L0;
  j["L1"] = c.L1;
  j["t0"] = c.t0;
  j["T"] = c.T;
  j["J"] = c.J;
  j["power"] = c.coupling_power;
  j["q"] = c.coefficients.q;
  j["kappa"] = c.coefficients.kappa;
  j["lambda"] = c.coefficients.lambda;
  j["alpha"] = c.coefficients.alpha;
  j["beta"] = c.coefficients.beta;
  j["forcing"] = mms::to_string(c.forcing_mode);
  j["initial"] = c.initial.to_string();
  j["snapshot_every"] = c.snapshot_every;
  j["out_dir"] = c.out_dir.string();
  return j;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::ios_base::failure("cannot open " + path.string() + " for writing");
  return f;
}

void write_json(const fs::path& path, const ordered_json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw std::ios_base::failure("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw std::ios_base::failure("cannot create directory " + dir.string());
}

std::string level_name(const char* prefix, long long n) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s_%06lld.csv", prefix, n);
  return buf;
}

int exit_for(RunStatus s) {
  switch (s) {
    case RunStatus::kCompleted: return kExitOk;
    case RunStatus::kNearSingular: return kExitNearSingular;
    case RunStatus::kNonFinite: return kExitNonFinite;
  }
  return kExitFailure;
}

}  // namespace

InitialData InitialData::parse(const std::string& text) {
  InitialData d;
  if (text == "manufactured") {
    d.kind = Kind::kManufactured;
  } else if (text == "zero") {
    d.kind = Kind::kZero;
  } else if (text.starts_with("constant:")) {
    const auto v = to_double(text.substr(9));
    if (!v || !std::isfinite(*v)) throw InvalidArgument("bad constant in '" + text + "'");
    d.kind = Kind::kConstant;
    d.constant = *v;
  } else if (text.starts_with("file:") && text.size() > 5) {
    d.kind = Kind::kFile;
    d.file = text.substr(5);
  } else {
    throw InvalidArgument("expected manufactured, zero, constant:<c> or file:<path>, got '" + text + "'");
  }
  return d;
}

std::string InitialData::to_string() const {
  switch (kind) {
    case Kind::kManufactured: return "manufactured";
    case Kind::kZero: return "zero";
    case Kind::kConstant: return "constant:" + format_double(constant);
    case Kind::kFile: return "file:" + file.string();
  }
  return {};
}

GridSpec RunConfig::grid() const { return build_grid(L0, L1, J, t0, T, coupling_power); }

SchemeParams RunConfig::params() const { return make_scheme_params(coefficients, grid()); }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"L0",    "L1",     "t0",    "T",       "J",       "power",
                                             "q",     "kappa",  "lambda", "alpha",  "beta",    "forcing",
                                             "initial", "snapshot_every", "out_dir"};
  return keys;
}

RunConfig parse_config_text(const std::string& text, const Overrides& overrides) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "line " + std::to_string(line_no);
    if (eq == std::string::npos) {
      throw MissingKey("expected 'key = value' at " + where + ", got '" + body + "'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw MissingKey("missing key name at " + where);
    apply_key(cfg, key, trim(std::string_view(body).substr(eq + 1)), where);
  }
  for (const auto& [key, value] : overrides) apply_key(cfg, key, trim(value), "flag --" + key);
  return cfg;
}

RunConfig parse_config(const std::optional<fs::path>& file, const Overrides& overrides) {
  if (!file) return parse_config_text("", overrides);
  std::ifstream in(*file, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + file->string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), overrides);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

void write_field_csv(const fs::path& path, const Matrix& field) {
  auto f = open_out(path);
  std::string line;
  for (std::size_t i = 0; i < field.rows(); ++i) {
    line.clear();
    for (std::size_t j = 0; j < field.cols(); ++j) {
      if (j) line += ',';
      line += format_double(field(i, j));
    }
    line += '\n';
    f << line;
  }
  if (!f) throw std::ios_base::failure("write failed: " + path.string());
}

Matrix read_field_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot read " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const auto v = to_double(trim(cell));
      if (!v) {
        throw InvalidArgument(path.string() + " line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(*v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ShapeMismatch(path.string() + " line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ShapeMismatch(path.string() + ": empty field");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// ---------------------------------------------------------------------------

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const GridSpec grid = config.grid();
  const SchemeParams params = make_scheme_params(config.coefficients, grid);
  ensure_dir(config.out_dir);

  mms::ManufacturedCase mcase;
  mcase.coefficients = config.coefficients;
  mcase.forcing_mode = config.forcing_mode;
  mcase.L0 = config.L0;
  mcase.L1 = config.L1;
  mcase.t0 = config.t0;
  mcase.T = config.T;
  const auto exact = mcase.solution();
  const Forcing forcing = mcase.forcing();
  const bool manufactured = config.initial.kind == InitialData::Kind::kManufactured;

  ordered_json report;
  report["config"] = config_json(config);
  report["timestamp"] = utc_timestamp();
  report["N"] = grid.N;
  report["h"] = grid.h;
  report["l"] = grid.l;
  report["sigma"] = params.sigma;

  RunResult result;
  try {
    const SchemeOperators ops(params, grid);
    report["min_abs_symbol"] = ops.solver().min_abs_symbol();

    StepperState init;
    switch (config.initial.kind) {
      case InitialData::Kind::kManufactured:
        init = bootstrap(exact.u, ops, forcing, sample_field(grid, exact.v, grid.t0));
        break;
      case InitialData::Kind::kZero:
        init = bootstrap(Field(grid.nodes(), grid.nodes()), ops, forcing);
        break;
      case InitialData::Kind::kConstant:
        init = bootstrap(Field::constant(grid.nodes(), grid.nodes(), config.initial.constant), ops, forcing);
        break;
      case InitialData::Kind::kFile: {
        const Matrix phi = read_field_csv(config.initial.file);
        if (phi.rows() != grid.nodes() || phi.cols() != grid.nodes()) {
          throw ShapeMismatch("initial field " + config.initial.file.string() + " is " + std::to_string(phi.rows()) +
                              "x" + std::to_string(phi.cols()) + ", grid needs " + std::to_string(grid.nodes()) +
                              "x" + std::to_string(grid.nodes()));
        }
        init = bootstrap(phi, ops, forcing);
        break;
      }
    }

    // In-memory snapshots feed Er; the files follow snapshot_every.
    const long long er_stride = manufactured ? mms::error_snapshot_stride(grid.N) : std::max<long long>(grid.N, 1);
    const long long file_every = config.snapshot_every;
    auto observer = [&](const StepperState& s) {
      if (s.n == 0 || s.n == grid.N || (file_every > 0 && s.n % file_every == 0)) {
        write_field_csv(config.out_dir / level_name("U", s.n), s.U_curr);
        write_field_csv(config.out_dir / level_name("V", s.n), s.V_curr);
      }
    };
    result = run(init, ops, forcing, er_stride, observer);
  } catch (const NearSingular& e) {
    result.report.grid = grid;
    result.report.params = params;
    result.report.status = RunStatus::kNearSingular;
    result.report.message = e.what();
  }

  const RunReport& rep = result.report;
  {
    auto f = open_out(config.out_dir / "norms.csv");
    f << "n,t,norm_U,norm_V\n";
    for (const auto& r : rep.norms) {
      f << r.n << ',' << format_double(r.t) << ',' << format_double(r.norm_U) << ',' << format_double(r.norm_V)
        << '\n';
    }
  }

  std::optional<double> Er;
  std::optional<double> C;
  if (manufactured && rep.status == RunStatus::kCompleted && !result.snapshots.empty()) {
    Er = mms::error_Er(result.snapshots, exact.u, grid);
    C = mms::rate_C(*Er, grid);
  }
  report["Er"] = json_number(Er);
  report["C"] = json_number(C);
  report["wall_ms"] = rep.wall_ms;
  report["status"] = to_string(rep.status);
  report["steps_taken"] = rep.steps_taken;
  report["failed_step"] = rep.failed_step ? ordered_json(*rep.failed_step) : ordered_json(nullptr);
  report["message"] = rep.message;
  if (!rep.norms.empty()) {
    report["max_pair_norm"] = json_number(rep.max_pair_norm());
    report["initial_pair_norm"] = json_number(rep.initial_pair_norm());
  }
  write_json(config.out_dir / "report.json", report);

  if (rep.status == RunStatus::kCompleted) {
    out << "completed " << rep.steps_taken << " steps (N=" << grid.N << ")";
    if (Er) out << ", Er=" << format_double(*Er) << ", C=" << format_double(*C);
    out << '\n';
  } else {
    err << "run stopped: " << to_string(rep.status);
    if (rep.failed_step) err << " at step " << *rep.failed_step;
    err << ": " << rep.message << '\n';
  }
  return exit_for(rep.status);
}

std::vector<int> default_table_J(int table) {
  std::vector<int> js;
  for (const auto& r : mms::reference_table(table).rows) js.push_back(r.J);
  return js;
}

int cmd_table(const RunConfig& config, int table, const std::vector<int>& J_list, unsigned threads,
              std::ostream& out, std::ostream& err) {
  if (table < 1 || table > 3) {
    err << "table must be 1, 2 or 3\n";
    return kExitUsage;
  }
  if (J_list.empty()) {
    err << "empty J list\n";
    return kExitUsage;
  }
  ensure_dir(config.out_dir);
  const mms::TableSpec& spec = mms::reference_table(table);
  mms::ManufacturedCase mcase;
  mcase.coefficients = config.coefficients;
  mcase.forcing_mode = config.forcing_mode;
  mcase.L0 = config.L0;
  mcase.L1 = config.L1;
  mcase.t0 = config.t0;
  mcase.T = config.T;

  const auto result = mms::table_run(mcase, J_list, spec.power, &spec, threads);

  const std::string stem = "table" + std::to_string(table);
  {
    // wall_ms is the only column that varies between identical reruns.
    auto f = open_out(config.out_dir / (stem + ".csv"));
    f << "J,N,computed_N,Er,C,wall_ms,status,h,l,reference_Er,stability_bound\n";
    for (const auto& r : result.rows) {
      const auto pr = mms::reference_row(spec, r.J);
      f << r.J << ',' << (r.reference_N ? std::to_string(*r.reference_N) : "") << ',' << r.computed_N << ','
        << format_double(r.Er) << ',' << format_double(r.C) << ',' << format_double(std::round(r.wall_ms * 1e3) / 1e3)
        << ',' << to_string(r.status) << ',' << format_double(r.h) << ',' << format_double(r.l) << ','
        << (pr ? format_double(pr->Er) : "") << ',' << (r.stability_bound_holds ? "holds" : "violated") << '\n';
    }
  }

  ordered_json meta;
  meta["table"] = table;
  meta["power"] = spec.power;
  meta["mode"] = mms::to_string(config.forcing_mode);
  meta["seed"] = nullptr;  // deterministic: no random draws
  meta["timestamp"] = utc_timestamp();
  meta["threads"] = threads;
  meta["config"] = config_json(config);
  ordered_json rows = ordered_json::array();
  for (const auto& r : result.rows) {
    ordered_json row;
    row["J"] = r.J;
    row["computed_N"] = r.computed_N;
    row["Er"] = json_number(r.Er);
    row["C"] = json_number(r.C);
    row["wall_ms"] = r.wall_ms;
    row["status"] = to_string(r.status);
    row["message"] = r.message;
    row["max_pair_norm"] = json_number(r.max_pair_norm);
    row["initial_pair_norm"] = json_number(r.initial_pair_norm);
    rows.push_back(std::move(row));
  }
  meta["rows"] = std::move(rows);
  write_json(config.out_dir / (stem + ".json"), meta);

  for (const auto& r : result.rows) {
    out << "J=" << r.J << " N=" << r.computed_N << " Er=" << format_double(r.Er) << " C=" << format_double(r.C)
        << " status=" << to_string(r.status) << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_verify(const VerifyOptions& options, std::ostream& out) {
  constexpr std::uint64_t kSeed = 20240611;
  const int j_max = std::max(2, options.size_limit);
  bool all_ok = true;
  auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << name << ": " << detail << '\n';
    all_ok = all_ok && ok;
  };

  // Eigenbasis residuals.
  {
    double worst = 0.0;
    for (int J : {2, 10, 30, 50}) {
      SpectralBasis basis = cosine_eigenbasis(J);
      if (options.corrupt_eigenvalue) basis.eigenvalues[basis.eigenvalues.size() / 2] *= 1.0 + 1e-6;
      const auto r = basis_residuals(basis);
      worst = std::max({worst, r.eigen, r.inverse});
    }
    report("eigen residual", worst <= 1e-12, "max residual " + format_double(worst) + " (tol 1e-12)");
  }

  // Spectral solve against the Kronecker oracle.
  {
    std::mt19937_64 rng(kSeed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    double worst = 0.0;
    int draws = 0;
    for (int J = 2; J <= std::min(j_max, 6); ++J) {
      const SpectralBasis basis = cosine_eigenbasis(J);
      const Matrix A = neumann_matrix(J);
      for (int d = 0; d < 50;) {
        SchemeParams p;
        p.q = 10.0 * unit(rng);
        p.kappa = 1.0 + unit(rng);
        p.alpha = unit(rng);
        p.sigma = 0.5 * (1.0 + unit(rng));
        p.delta = 0.5 + 2.0 * (1.0 + unit(rng));
        const Matrix k = spectral_symbol(p, basis);
        double min_k = INFINITY;
        for (double v : k.values()) min_k = std::min(min_k, std::abs(v));
        if (min_k <= 1e-6) continue;
        Matrix C(basis.P.rows(), basis.P.rows());
        for (double& v : C.values()) v = unit(rng);
        const Matrix fast = solve_k(p, basis, C);
        const Matrix slow = kron_solve({k_operator_terms(p, A), C});
        worst = std::max(worst, relative_frobenius_error(fast, slow));
        ++d;
        ++draws;
      }
    }
    report("oracle equivalence", worst <= 1e-9,
           std::to_string(draws) + " draws, J<=" + std::to_string(std::min(j_max, 6)) + ", max rel err " +
               format_double(worst) + " (tol 1e-9, seed " + std::to_string(kSeed) + ")");
  }

  // One step from a constant state must reproduce it.
  {
    double worst = 0.0;
    const Coefficients coeff = Coefficients::manufactured_defaults();
    for (const auto& [id, J] : std::vector<std::pair<int, int>>{{1, 10}, {2, 12}, {3, 10}, {3, 16}}) {
      const GridSpec grid = build_grid(-1.0, 1.0, J, 0.0, 1.0, mms::reference_table(id).power);
      const SchemeOperators ops(make_scheme_params(coeff, grid), grid);
      for (double c : {0.3, -2.7, 1.0}) {
        StepperState s;
        s.U_prev = s.U_curr = Field::constant(grid.nodes(), grid.nodes(), c);
        s.V_prev = s.V_curr = Field::constant(grid.nodes(), grid.nodes(), coeff.q * c);
        const StepperState next = advance(s, ops, Forcing{});
        const double du = max_abs(next.U_curr - s.U_curr) / std::abs(c);
        const double dv = max_abs(next.V_curr - s.V_curr) / std::abs(coeff.q * c);
        worst = std::max({worst, du, dv});
      }
    }
    report("steady state", worst <= 1e-12, "max relative one-step drift " + format_double(worst) + " (tol 1e-12)");
  }

  // Consistency order of the discrete residual.
  {
    const mms::ManufacturedCase mcase;
    try {
      const auto est = mms::truncation_order_check(mcase.solution(), mcase.coefficients, mcase.L0, mcase.L1);
      const bool ok = est.p_space >= 1.7 && est.p_space <= 2.3 && est.p_time >= 1.7 && est.p_time <= 2.3;
      report("truncation slopes", ok,
             "p_space " + format_double(est.p_space) + ", p_time " + format_double(est.p_time) + " (want [1.7, 2.3])");
    } catch (const mms::DegenerateFit& e) {
      report("truncation slopes", false, e.what());
    }
  }

  out << (all_ok ? "verify: all properties pass" : "verify: FAILED") << '\n';
  return all_ok ? kExitOk : kExitFailure;
}

int cmd_spectrum(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const GridSpec grid = config.grid();
  const SchemeParams params = make_scheme_params(config.coefficients, grid);
  const SpectralBasis basis = cosine_eigenbasis(grid.J);
  const Matrix k = spectral_symbol(params, basis);
  ensure_dir(config.out_dir);

  double min_k = INFINITY;
  std::size_t arg_i = 0;
  std::size_t arg_j = 0;
  auto f = open_out(config.out_dir / "spectrum.csv");
  f << "i,j,lambda_i,lambda_j,k\n";
  for (std::size_t i = 0; i < k.rows(); ++i) {
    for (std::size_t j = 0; j < k.cols(); ++j) {
      f << i << ',' << j << ',' << format_double(basis.eigenvalues[i]) << ',' << format_double(basis.eigenvalues[j])
        << ',' << format_double(k(i, j)) << '\n';
      if (std::abs(k(i, j)) < min_k) {
        min_k = std::abs(k(i, j));
        arg_i = i;
        arg_j = j;
      }
    }
  }
  f << "min," << arg_i << ',' << arg_j << ",," << format_double(min_k) << '\n';
  if (!f) throw std::ios_base::failure("write failed: spectrum.csv");

  out << "J=" << grid.J << " sigma=" << format_double(params.sigma) << " min|k|=" << format_double(min_k) << " at ("
      << arg_i << ", " << arg_j << ")\n";
  if (min_k < 1e-6) {
    err << "warning: min|k| = " << format_double(min_k) << " < 1e-6; the step operator is near-singular\n";
  }
  return kExitOk;
}

unsigned threads_from_env() {
  if (const char* env = std::getenv("KS2D_THREADS")) {
    if (const auto v = to_integer(trim(env)); v && *v >= 1) return static_cast<unsigned>(std::min<long long>(*v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------------------

namespace {

struct ConfigOptions {
  std::string file;
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App& app, ConfigOptions& opts) {
  app.add_option("--config", opts.file, "key = value config file");
  for (const auto& key : config_keys()) {
    app.add_option_function<std::string>("--" + key, [&opts, key](const std::string& v) { opts.flags[key] = v; },
                                         "override '" + key + "'");
  }
}

RunConfig resolve(const ConfigOptions& opts) {
  Overrides ov(opts.flags.begin(), opts.flags.end());
  return parse_config(opts.file.empty() ? std::nullopt : std::optional<fs::path>(opts.file), ov);
}

std::vector<int> parse_J_list(const std::string& text) {
  std::vector<int> js;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    const std::string t = trim(cell);
    if (t.empty()) continue;
    const auto v = to_integer(t);
    if (!v || *v < 2 || *v > 100000) throw TypeError("J list: bad entry '" + t + "'");
    js.push_back(static_cast<int>(*v));
  }
  return js;
}

}  // namespace

int main_entry(int argc, char** argv) {
  CLI::App app{"ks2d: 2D Kuramoto-Sivashinsky order-reduction solver"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "bootstrap and integrate one configuration");
  add_config_options(*run_cmd, run_opts);

  ConfigOptions table_opts;
  int table_id = 0;
  std::string J_text;
  auto* table_cmd = app.add_subcommand("table", "rerun one convergence table");
  add_config_options(*table_cmd, table_opts);
  table_cmd->add_option("--table", table_id, "table id (1, 2 or 3)")->required();
  auto* js_opt = table_cmd->add_option("--Js", J_text, "comma-separated J values (default: reference column)");

  VerifyOptions verify_opts;
  auto* verify_cmd = app.add_subcommand("verify", "run the solver property checks");
  verify_cmd->add_option("--size-limit", verify_opts.size_limit, "largest J for the Kronecker oracle");
  verify_cmd->add_flag("--corrupt-eigenvalue", verify_opts.corrupt_eigenvalue, "test hook: perturb one eigenvalue");

  ConfigOptions spec_opts;
  auto* spectrum_cmd = app.add_subcommand("spectrum", "dump the spectral symbol of the step operator");
  add_config_options(*spectrum_cmd, spec_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(resolve(run_opts), std::cout, std::cerr);
    if (table_cmd->parsed()) {
      const RunConfig cfg = resolve(table_opts);
      if (table_id < 1 || table_id > 3) {
        std::cerr << "table must be 1, 2 or 3\n";
        return kExitUsage;
      }
      const std::vector<int> js = js_opt->count() ? parse_J_list(J_text) : default_table_J(table_id);
      return cmd_table(cfg, table_id, js, threads_from_env(), std::cout, std::cerr);
    }
    if (verify_cmd->parsed()) return cmd_verify(verify_opts, std::cout);
    if (spectrum_cmd->parsed()) return cmd_spectrum(resolve(spec_opts), std::cout, std::cerr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ShapeMismatch& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace ks2d::cli
