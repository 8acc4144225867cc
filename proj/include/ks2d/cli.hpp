#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ks2d/errors.hpp"
#include "ks2d/grid.hpp"
#include "ks2d/mms.hpp"

namespace ks2d::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitNearSingular = 2,
  kExitNonFinite = 3,
  kExitUsage = 64,
  kExitIo = 74,
};

struct InitialData {
  enum class Kind { kManufactured, kZero, kConstant, kFile };
  Kind kind = Kind::kManufactured;
  double constant = 0.0;
  std::filesystem::path file;

  static InitialData parse(const std::string& text);
  std::string to_string() const;
};

struct RunConfig {
  double L0 = -1.0;
  double L1 = 1.0;
  double t0 = 0.0;
  double T = 1.0;
  int J = 10;
  double coupling_power = 3.01;
  Coefficients coefficients = Coefficients::manufactured_defaults();
  mms::ForcingMode forcing_mode = mms::ForcingMode::kResidual;
  InitialData initial;
  long long snapshot_every = 0;  ///< 0: only the first and last level are written
  std::filesystem::path out_dir = ".";

  GridSpec grid() const;
  SchemeParams params() const;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingKey : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class TypeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class UnknownKey : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Keys accepted in config files and as --key flags.
const std::vector<std::string>& config_keys();

using Overrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines ('#' starts a comment) from the file if given,
/// then applies the flag overrides in order. Missing keys keep the defaults
/// of the manufactured case.
RunConfig parse_config(const std::optional<std::filesystem::path>& file, const Overrides& overrides = {});
RunConfig parse_config_text(const std::string& text, const Overrides& overrides = {});

/// Shortest decimal string that round-trips to the same binary64.
std::string format_double(double v);

void write_field_csv(const std::filesystem::path& path, const Matrix& field);
Matrix read_field_csv(const std::filesystem::path& path);

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// J_list empty means "usage error"; callers wanting the reference J column
/// pass it explicitly (see default_table_J).
int cmd_table(const RunConfig& config, int table, const std::vector<int>& J_list, unsigned threads,
              std::ostream& out, std::ostream& err);
std::vector<int> default_table_J(int table);

struct VerifyOptions {
  int size_limit = 6;  ///< largest J used by the Kronecker oracle
  bool corrupt_eigenvalue = false;  ///< test hook: perturb one eigenvalue
};
int cmd_verify(const VerifyOptions& options, std::ostream& out);

int cmd_spectrum(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Row-parallelism cap from KS2D_THREADS, defaulting to the hardware count.
unsigned threads_from_env();

/// Entry point shared by the ks2d executable.
int main_entry(int argc, char** argv);

}  // namespace ks2d::cli
