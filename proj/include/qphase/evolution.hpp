#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "qphase/linalg.hpp"
#include "qphase/sud_algebra.hpp"

namespace qphase {

/// Per-level phases advance linearly: chi_n += rate_n * tau. Rates sum to zero.
struct CartanLinear {
  RVector rates;
  double duration = 0.0;
};

/// Nothing moves for `duration`.
struct CartanHold {
  double duration = 0.0;
};

/// SU(2) coset motion on the Bloch sphere: theta moves linearly from
/// theta_start to theta_end while phi advances at phi_rate. The coset factor
/// is V(theta, phi) = [[cos(theta/2), i sin(theta/2) e^{-i phi}],
///                     [i sin(theta/2) e^{i phi}, cos(theta/2)]].
/// phi continues from where the previous Bloch segment left it (0 at start).
struct BlochLoop {
  double theta_start = 0.0;
  double theta_end = 0.0;
  double phi_rate = 0.0;
  double duration = 0.0;
};

/// Left-multiplies the coset factor by exp(i G tau); G traceless Hermitian.
struct GeneratorConst {
  CMatrix generator;
  double duration = 0.0;
};

using PathSegment = std::variant<CartanLinear, CartanHold, BlochLoop, GeneratorConst>;

double segment_duration(const PathSegment& s);

/// Which one-sided limit to take at a segment boundary.
enum class Side { kBefore, kAfter };

/// A time-parametrized path in SU(d) of the factorized form
///   Ubar(t) = V(t) exp(i h(t).H),  Ubar(0) = 1,
/// built from an ordered list of segments. Cartan segments move h, Bloch
/// and generator segments move the coset factor V.
class LocalEvolution {
 public:
  struct Sample {
    CMatrix U;
    CMatrix U_dot;
  };

  struct Factors {
    CMatrix V;
    CMatrix V_dot;
    RVector chi;      // accumulated per-level phases, not reduced mod 2 pi
    RVector chi_dot;
  };

  LocalEvolution(int d, std::vector<PathSegment> segments);
  static LocalEvolution identity(int d, double duration);

  int dim() const { return d_; }
  double duration() const { return starts_.empty() ? 0.0 : starts_.back(); }
  const std::vector<PathSegment>& segments() const { return segments_; }
  /// Interior segment boundaries (strictly between 0 and duration).
  std::vector<double> breakpoints() const;
  /// True when every segment is a Cartan segment.
  bool is_diagonal() const;

  Factors factors(double t, Side side = Side::kAfter) const;
  Sample synthesize(double t, Side side = Side::kAfter) const;

  /// Whether the coset factor equals the identity at t.
  bool coset_closed(double t, double tol = 1e-10) const;

  /// Accumulated Cartan angles at t; throws DomainError where the coset
  /// factor is not closed.
  CartanAngles cartan_at(double t, double tol = 1e-10) const;

  /// 2 * integral of sin^2(theta/2) dphi over the Bloch segments up to t.
  double bloch_area(double t) const;

 private:
  std::size_t locate(double t, Side side) const;

  int d_;
  std::vector<PathSegment> segments_;
  std::vector<double> starts_;  // size = segments + 1; starts_.back() = total duration
  std::vector<CMatrix> V_start_;
  std::vector<RVector> chi_start_;
  std::vector<double> phi_start_;
  std::vector<double> area_start_;
  std::vector<std::optional<HermitianExponential>> exps_;
};

/// Uniform sampling of [0, t_max] with `steps` intervals.
struct TimeGrid {
  double t_max = 0.0;
  int steps = 0;

  double dt() const { return steps > 0 ? t_max / steps : 0.0; }
  double at(int k) const { return k == steps ? t_max : t_max * k / steps; }
  /// Index of the grid point at time t, or nullopt when t is not on the grid.
  std::optional<int> index_of(double t, double rel_tol = 1e-9) const;
};

/// Local evolutions for both qudits. U_j(t) = e^{i omega_j t} Ubar_j(t) with
/// explicit global-phase rates omega_j (zero by default).
struct PairEvolution {
  LocalEvolution A;
  LocalEvolution B;
  TimeGrid grid;
  double phase_rate_A = 0.0;
  double phase_rate_B = 0.0;
};

/// Accumulated Cartan angles sampled at the given times.
std::vector<CartanAngles> cartan_trajectory(const LocalEvolution& evo,
                                            const std::vector<double>& times, double tol = 1e-10);

/// Enclosed solid angle 2 * oint sin^2(theta/2) dphi of a closed d = 2 path.
/// Throws DomainError when the coset factor does not close at the end.
double solid_angle(const LocalEvolution& loop, double tol = 1e-10);

/// n with exp(i h.H) = e^{2 pi i n/d} * 1, or nullopt when not scalar.
std::optional<int> lattice_condition_check(const CartanAngles& angles, double tol = 1e-9);

}  // namespace qphase
