#pragma once

// Verification suites shared by the command line tool, the acceptance runner
// and the Python module. Each check reports its worst residual against a
// tolerance; tolerances can be overridden by check name.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace susy {

struct VerifyOptions {
  std::uint64_t seed = 42;
  std::optional<int> beta, N, k;        // restrict the duality suite
  std::map<std::string, double> tol;    // per-check tolerance overrides
  int threads = 0;

  double tolerance(const std::string& check, double fallback) const;
};

struct CheckResult {
  std::string name;
  int cases = 0;
  double residual = 0.0;
  double tol = 0.0;
  bool pass = false;
  double seconds = 0.0;
  std::string note;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool pass() const;
  std::vector<std::string> failing() const;
};

// algebra, duality, genfun, ensembles, brownian, colorflavor, all
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const std::string& name, const VerifyOptions& opt = {});

// Check groups; the suites are unions of these.
std::vector<CheckResult> check_grassmann_algebra(const VerifyOptions& opt);
std::vector<CheckResult> check_supermatrix(const VerifyOptions& opt);
std::vector<CheckResult> check_trace_duality(const VerifyOptions& opt);
std::vector<CheckResult> check_keystone(const VerifyOptions& opt);
std::vector<CheckResult> check_hubbard_stratonovich(const VerifyOptions& opt);
std::vector<CheckResult> check_genfun_normalization(const VerifyOptions& opt);
std::vector<CheckResult> check_ingham_siegel(const VerifyOptions& opt);
std::vector<CheckResult> check_one_point(const VerifyOptions& opt);
std::vector<CheckResult> check_universality(const VerifyOptions& opt);
std::vector<CheckResult> check_diffusion(const VerifyOptions& opt);
std::vector<CheckResult> check_color_flavor(const VerifyOptions& opt);

}  // namespace susy
