#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qphase/scenario.hpp"

namespace qphase {

struct OracleComparison {
  std::string oracle;
  std::size_t compared = 0;   // samples where the closed form applies
  double max_total_dev = 0.0;      // mod 2 pi
  double max_geometric_dev = 0.0;  // mod 2 pi
};

struct InvariantCheck {
  std::string name;
  double value = 0.0;
  double limit = 0.0;
  bool ok() const { return value <= limit; }
};

struct VerifyReport {
  RunResult run;
  std::optional<OracleComparison> comparison;  // nullopt: no closed form covers the scenario
  double tolerance = 0.0;
  std::vector<InvariantCheck> invariants;

  bool oracle_ok() const;
  bool invariants_ok() const;
  /// 0 pass, 1 a tolerance exceeded, 4 no closed form.
  int exit_code() const;
  std::vector<std::string> lines() const;
};

/// Runs the scenario and compares it with the closed form that covers it,
/// sample by sample, skipping samples with |overlap| < 1e-6 and times where
/// a Bloch loop is open.
VerifyReport verify_scenario(const ScenarioConfig& config, double tolerance);

}  // namespace qphase
