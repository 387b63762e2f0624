#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "mpsm/batch.hpp"

namespace mpsm {

/// One measured quantity compared against its tolerance.
struct CheckResult {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation = "<";  // measured <relation> tolerance
  bool passed = false;
};

struct CriterionReport {
  int id = 0;
  std::string title;
  std::vector<CheckResult> checks;
  double seconds = 0.0;
  std::string note;

  bool passed() const;
  nlohmann::json to_json() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  Execution exec = Execution::parallel;
  std::optional<int> n_sites;        // identity suite geometry override
  std::optional<int> bond_dim;
  std::optional<std::size_t> samples;  // Monte Carlo sample override
  std::string scratch_dir;           // reproducibility runs; empty: a temp directory
};

CriterionReport check_environment_oracle(const VerifyOptions& o);
CriterionReport check_metric_determinant(const VerifyOptions& o);
CriterionReport check_jacobian(const VerifyOptions& o);
CriterionReport check_roundtrip(const VerifyOptions& o);
CriterionReport check_identity(const VerifyOptions& o);
CriterionReport check_mh_crosscheck(const VerifyOptions& o);
CriterionReport check_profiles(const VerifyOptions& o);
CriterionReport check_spectral_laws(const VerifyOptions& o);
CriterionReport check_stransform(const VerifyOptions& o);
CriterionReport check_reproducibility(const VerifyOptions& o);

using CriterionFn = std::function<CriterionReport(const VerifyOptions&)>;

/// Suites: identity, metric, jacobian, sampler, spectra, environment,
/// profiles, reproducibility, all (the fast ones) and acceptance (every check).
std::vector<CriterionFn> suite_checks(const std::string& suite);
std::vector<std::string> suite_names();

struct VerifyReport {
  std::string suite;
  std::vector<CriterionReport> criteria;

  bool passed() const;
  nlohmann::json to_json() const;
};

VerifyReport run_suite(const std::string& suite, const VerifyOptions& o,
                       const std::function<void(const CriterionReport&)>& on_result = {});

/// "PASS [3] title: name=measured (< tol), ..."
std::string summary_line(const CriterionReport& r);

}  // namespace mpsm
