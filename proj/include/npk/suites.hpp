#pragma once

#include "npk/modelio.hpp"
#include "npk/submersion.hpp"

namespace npk {

struct RunConfig {
  std::string target;  // builtin id, "builtin:<id>" or a file path
  std::vector<std::string> suites{"all"};
  double tol = 1e-10;
  unsigned seed = 7;
  std::string format = "text";  // text | json
  Backend backend = Backend::Exact;
  Convention convention = Convention::Gray;
};

struct CheckResult {
  std::string suite;
  IdentityReport report;
};

enum ExitCode { kExitOk = 0, kExitLoad = 2, kExitPrecondition = 3, kExitIdentity = 4 };

struct RunReport {
  std::string target;
  std::string kind;  // model, curvature_point, threeform
  std::vector<CheckResult> checks;
  std::map<std::string, std::string> fields;
  std::vector<std::string> errors;
  int exit_code = kExitOk;
};

const std::vector<std::string>& suite_names();

// Throws ParseError for an unknown suite or a nonpositive tolerance.
void validate_config(const RunConfig& cfg);

// Never throws for model or data problems; those land in exit_code/errors.
RunReport run_suites(const RunConfig& cfg);

Json report_to_json(const RunReport& r, const RunConfig& cfg);
std::string report_to_text(const RunReport& r);

}  // namespace npk
