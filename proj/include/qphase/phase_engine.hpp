#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qphase/evolution.hpp"
#include "qphase/linalg.hpp"
#include "qphase/state_model.hpp"

namespace qphase {

/// Sampled phases along an evolution. All phase columns are continuous
/// (unwrapped) and start at zero; geometric = total - dynamical.
struct PhaseTrace {
  std::vector<double> t;
  std::vector<Complex> overlap;  // <psi(0)|psi(t)>
  std::vector<double> magnitude;
  std::vector<double> total_phase;
  std::vector<double> dynamical_phase;
  std::vector<double> geometric_phase;
  std::vector<bool> indeterminate;  // |overlap| too small for arg

  double max_unitarity_residual = 0.0;
  bool trapezoid_fallback = false;  // some quadrature piece had a single interval

  std::size_t size() const { return t.size(); }
};

struct TraceOptions {
  Tolerances tol;
  /// Largest phasor rotation allowed between consecutive samples.
  double max_step_rotation = kPi / 4.0;
  /// Below this |overlap| the arg is treated as undefined.
  double indeterminate_below = 1e-12;
};

/// Total phase from arg Tr[alpha(0)^dagger alpha(t)], dynamical phase from the
/// composite-Simpson integral of -i Tr[rho_A(0) U_A^dagger U_A_dot +
/// rho_B(0) U_B^dagger U_B_dot]. Segment boundaries must lie on the grid;
/// throws NumericalGuardError when the grid is too coarse to follow the
/// fastest phasor.
PhaseTrace run_trace(const CoefficientMatrix& alpha0, const PairEvolution& pair,
                     const TraceOptions& options = {});

/// Single (possibly mixed) qudit: total phase arg Tr[rho0 U(t)], dynamical
/// phase -i int Tr[rho0 U^dagger U_dot] dt.
PhaseTrace single_qudit_trace(const QuditDensity& rho0, const LocalEvolution& evo,
                              const TimeGrid& grid, const TraceOptions& options = {});

/// Running integral of samples on a uniform grid: composite Simpson within
/// each piece between consecutive `cuts` (grid indices, first 0, last n),
/// with a one-interval three-point rule for odd offsets. At a cut the
/// piece on the left uses `before[cut]`, the piece on the right `after[cut]`.
std::vector<double> cumulative_simpson(std::span<const double> after,
                                       std::span<const double> before, double h,
                                       std::span<const int> cuts, bool* trapezoid_used = nullptr);

struct CyclicEvent {
  double t_cycle = 0.0;
  double phase = 0.0;      // total phase, on the trace's unwrapped branch
  double magnitude = 0.0;  // |overlap| at t_cycle
  std::optional<int> n_A;
  std::optional<int> n_B;
  bool continuum = false;  // |overlap| == 1 over the whole trace
};

/// Local maxima of |overlap| reaching 1 - eps, refined by quadratic fits on
/// exact re-evaluations of the overlap. t = 0 is never reported, except as
/// the single flagged continuum event when every sample is cyclic.
std::vector<CyclicEvent> detect_cycles(const PhaseTrace& trace, const CoefficientMatrix& alpha0,
                                       const PairEvolution& pair, double eps = 1e-9);

/// {2 pi (n_A/d_A + n_B/d_B) mod 2 pi} = {2 pi m / L}, L = lcm(d_A, d_B).
struct FractionalLattice {
  int d_A = 0;
  int d_B = 0;
  int L = 0;
  std::vector<double> values;  // sorted, in [0, 2 pi)

  bool contains(double phase, double tol) const;
  /// Distance (mod 2 pi) from `phase` to the nearest lattice value.
  double distance(double phase) const;
  /// Values as multiples of pi: "0", "π/3", "2π/3", "π", ...
  std::vector<std::string> labels() const;
};

FractionalLattice fractional_lattice(int d_A, int d_B);

/// phi_g = 2 pi (n_A/d_A + n_B/d_B) - w_A * loop_A - w_B * loop_B, where
/// loop_j = oint q_hat_j . dx_j is the accumulated connection of qudit j
/// and w_A, w_B come from the entanglement report.
double master_phase_formula(const EntanglementReport& report, double loop_A, double loop_B,
                            int n_A, int n_B);

/// int q_hat . u dt over the grid, u the velocity vector of `evo`.
double connection_integral(const GeneratorBasis& basis, const RVector& q_hat,
                           const LocalEvolution& evo, const TimeGrid& grid);

}  // namespace qphase
