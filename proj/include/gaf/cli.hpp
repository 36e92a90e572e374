#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "gaf/config.hpp"

namespace gaf {

enum ExitCode : int {
  kExitOk = 0,
  kExitUnexpected = 1,
  kExitConfig = 2,
  kExitResidual = 3,
  kExitFit = 4,
  kExitCondition = 5,
  kExitAudit = 6,
};

struct CliOptions {
  std::filesystem::path out_dir = "gaf_out";
  std::filesystem::path config_path;
  int workers = 1;
  bool no_timestamp = false;
  bool dump_basis = false;
  bool dump_coefficients = false;
  bool dump_divisors = false;
  int dump_limit = 10;  // samples per n in the coefficient / divisor dumps
};

int cmd_basis(const AppConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_kernel_check(const AppConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_clt(const AppConfig& cfg, const CliOptions& opt, std::ostream& log);
int cmd_conditions(const AppConfig& cfg, const CliOptions& opt, std::ostream& log);

/// Exit code for a kernel-check ladder: slope band and R^2 per n, and no
/// growth of the scaled off-diagonal maximum beyond the allowed factor.
int kernel_check_verdict(const std::vector<AsymptoticsReport>& reports, const Thresholds& t);

/// Exit code of a CLT report: audit first (6), then normality at the
/// largest n (5).
int clt_verdict(const CltReport& rep, const Thresholds& t);

/// Default worker count: GAF_WORKERS if set and valid, else the hardware.
int default_worker_count();

int run_cli(int argc, char** argv);

}  // namespace gaf
