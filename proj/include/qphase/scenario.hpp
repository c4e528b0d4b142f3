#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qphase/evolution.hpp"
#include "qphase/phase_engine.hpp"
#include "qphase/state_model.hpp"

namespace qphase {

/// A scenario file (or preset) that does not describe a valid run. The
/// message starts with "<source>:<line>:<col>: <field>:" when known.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateSpec {
  enum class Kind { kSchmidt, kAmplitudes, kNamed };
  Kind kind = Kind::kSchmidt;
  double q = 0.0;
  double theta = 0.0;
  CMatrix amplitudes;  // kAmplitudes
  std::string name;    // kNamed: psi2qubit, psiqubitqutrit, psiqubitqutrit2, 2qutritstate, 2qutritstate2
};

/// How per-level totals chi_T = chi_A + chi_B are shared between the qudits.
enum class Split { kAOnly, kHalf };

struct ScenarioConfig {
  std::string name;
  int d_A = 0;
  int d_B = 0;          // 0 for a single qudit
  StateSpec state;

  // Either explicit per-qudit paths, or totals that are split on build.
  std::vector<PathSegment> path_A;
  std::vector<PathSegment> path_B;
  std::optional<std::vector<PathSegment>> totals;
  Split split = Split::kAOnly;
  double phase_rate_A = 0.0;
  double phase_rate_B = 0.0;

  TimeGrid grid;
  Tolerances tol;
  std::vector<std::string> warnings;

  bool single() const { return d_B == 0; }
  /// Overrides the step count; odd counts are bumped by one with a warning.
  void set_steps(int steps);
};

/// Parses the YAML scenario format documented in the README.
ScenarioConfig parse_scenario(const std::string& text, const std::string& source = "<string>");
ScenarioConfig load_scenario(const std::string& path);

std::vector<std::string> preset_names();
/// Throws ConfigError listing the available names for an unknown preset.
ScenarioConfig make_preset(const std::string& name);

/// Everything a run needs. A single qudit rho0 is represented by
/// alpha = sqrt(rho0) with an idle partner, which gives Tr[rho0 U].
struct PreparedScenario {
  CoefficientMatrix alpha;
  PairEvolution pair;
  std::optional<QuditDensity> density;  // single-qudit runs
};

PreparedScenario prepare(const ScenarioConfig& config);

struct RunResult {
  ScenarioConfig config;
  PhaseTrace trace;
  EntanglementReport report;
  std::vector<CyclicEvent> cycles;
};

RunResult run_scenario(const ScenarioConfig& config);

/// The coefficient matrix of a named reference state.
CMatrix named_state(const std::string& name, double q, double theta);

}  // namespace qphase
