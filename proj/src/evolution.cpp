#include "qphase/evolution.hpp"

#include <cmath>
#include <string>

namespace qphase {

namespace {

CMatrix bloch_factor(double theta, double phi) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  CMatrix V(2, 2);
  V << c, kI * s * std::polar(1.0, -phi), kI * s * std::polar(1.0, phi), c;
  return V;
}

CMatrix bloch_factor_dot(double theta, double phi, double theta_dot, double phi_dot) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  CMatrix dtheta(2, 2);
  dtheta << -s / 2.0, kI * (c / 2.0) * std::polar(1.0, -phi), kI * (c / 2.0) * std::polar(1.0, phi),
      -s / 2.0;
  CMatrix dphi(2, 2);
  dphi << 0.0, s * std::polar(1.0, -phi), -s * std::polar(1.0, phi), 0.0;
  return theta_dot * dtheta + phi_dot * dphi;
}

// 2 * int_0^tau sin^2(theta(s)/2) phi_rate ds for theta(s) = theta0 + theta_rate s.
double bloch_partial_area(double theta0, double theta_rate, double phi_rate, double tau) {
  if (phi_rate == 0.0 || tau == 0.0) return 0.0;
  if (std::abs(theta_rate * tau) < 1e-9) {
    const double mid = theta0 + 0.5 * theta_rate * tau;
    return phi_rate * tau * (1.0 - std::cos(mid));
  }
  const double theta1 = theta0 + theta_rate * tau;
  return phi_rate * (tau - (std::sin(theta1) - std::sin(theta0)) / theta_rate);
}

std::string segment_label(std::size_t k) { return "segment " + std::to_string(k); }

}  // namespace

double segment_duration(const PathSegment& s) {
  return std::visit([](const auto& seg) { return seg.duration; }, s);
}

LocalEvolution::LocalEvolution(int d, std::vector<PathSegment> segments)
    : d_(d), segments_(std::move(segments)) {
  if (d < 2) throw DomainError("local evolution needs d >= 2");
  CMatrix V = CMatrix::Identity(d, d);
  RVector chi = RVector::Zero(d);
  double phi = 0.0;
  double area = 0.0;
  double t = 0.0;

  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const auto& seg = segments_[k];
    const double D = segment_duration(seg);
    if (!(D >= 0.0) || !std::isfinite(D)) {
      throw DomainError(segment_label(k) + ": duration must be finite and non-negative");
    }
    starts_.push_back(t);
    V_start_.push_back(V);
    chi_start_.push_back(chi);
    phi_start_.push_back(phi);
    area_start_.push_back(area);
    exps_.emplace_back();

    if (const auto* lin = std::get_if<CartanLinear>(&seg)) {
      if (lin->rates.size() != d) {
        throw DimensionError(segment_label(k) + ": cartan_linear needs " + std::to_string(d) +
                             " rates, got " + std::to_string(lin->rates.size()));
      }
      const double scale = std::max(1.0, lin->rates.cwiseAbs().maxCoeff());
      if (std::abs(lin->rates.sum()) > 1e-12 * scale) {
        throw DomainError(segment_label(k) + ": cartan_linear rates must sum to zero (sum = " +
                          std::to_string(lin->rates.sum()) + ")");
      }
      chi += lin->rates * D;
    } else if (std::holds_alternative<CartanHold>(seg)) {
      // nothing moves
    } else if (const auto* bl = std::get_if<BlochLoop>(&seg)) {
      if (d != 2) throw DomainError(segment_label(k) + ": bloch_loop segments require d = 2");
      if (D == 0.0 && bl->theta_end != bl->theta_start) {
        throw DomainError(segment_label(k) + ": zero-duration bloch_loop cannot change theta");
      }
      const CMatrix expected = bloch_factor(bl->theta_start, phi);
      if ((expected - V).norm() > 1e-9) {
        throw DomainError(segment_label(k) + ": bloch_loop starts at theta = " +
                          std::to_string(bl->theta_start) +
                          " but the path's coset factor is elsewhere (discontinuous path)");
      }
      const double theta_rate = D > 0.0 ? (bl->theta_end - bl->theta_start) / D : 0.0;
      area += bloch_partial_area(bl->theta_start, theta_rate, bl->phi_rate, D);
      phi += bl->phi_rate * D;
      V = bloch_factor(bl->theta_end, phi);
    } else if (const auto* gen = std::get_if<GeneratorConst>(&seg)) {
      const CMatrix& G = gen->generator;
      if (G.rows() != d || G.cols() != d) {
        throw DimensionError(segment_label(k) + ": generator must be " + std::to_string(d) + "x" +
                             std::to_string(d) + ", got " + format_shape(G));
      }
      if (!is_hermitian(G, 1e-12 * std::max(1.0, G.norm()))) {
        throw DomainError(segment_label(k) + ": generator is not Hermitian");
      }
      if (std::abs(G.trace()) > 1e-12 * std::max(1.0, G.norm())) {
        throw DomainError(segment_label(k) + ": generator is not traceless");
      }
      exps_.back().emplace(G);
      V = exps_.back()->at(D) * V;
    }
    t += D;
  }
  starts_.push_back(t);
}

LocalEvolution LocalEvolution::identity(int d, double duration) {
  return LocalEvolution(d, {CartanHold{duration}});
}

std::vector<double> LocalEvolution::breakpoints() const {
  std::vector<double> out;
  for (std::size_t k = 1; k + 1 < starts_.size(); ++k) {
    if (starts_[k] > 0.0 && starts_[k] < duration()) out.push_back(starts_[k]);
  }
  return out;
}

bool LocalEvolution::is_diagonal() const {
  for (const auto& seg : segments_) {
    if (!std::holds_alternative<CartanLinear>(seg) && !std::holds_alternative<CartanHold>(seg)) {
      return false;
    }
  }
  return true;
}

std::size_t LocalEvolution::locate(double t, Side side) const {
  const double T = duration();
  const double slack = 1e-12 * std::max(1.0, T);
  if (t < -slack || t > T + slack) {
    throw DomainError("time " + std::to_string(t) + " outside [0, " + std::to_string(T) + "]");
  }
  std::size_t found = segments_.size();
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    const double a = starts_[k];
    const double b = starts_[k + 1];
    if (b <= a) continue;  // zero-length segment
    if (side == Side::kAfter) {
      if (t >= a && t < b) return k;
      if (t >= a) found = k;  // t at (or past) the final end
    } else {
      if (t > a && t <= b) return k;
      if (found == segments_.size() && t <= a) found = k;  // t at (or before) the start
    }
  }
  return found;
}

LocalEvolution::Factors LocalEvolution::factors(double t, Side side) const {
  const std::size_t k = locate(t, side);
  Factors f;
  if (k == segments_.size()) {
    f.V = CMatrix::Identity(d_, d_);  // only reachable when no segment has length
    f.V_dot = CMatrix::Zero(d_, d_);
    f.chi = RVector::Zero(d_);
    f.chi_dot = RVector::Zero(d_);
    return f;
  }
  const double tau = std::clamp(t - starts_[k], 0.0, starts_[k + 1] - starts_[k]);
  const auto& seg = segments_[k];
  f.V = V_start_[k];
  f.V_dot = CMatrix::Zero(d_, d_);
  f.chi = chi_start_[k];
  f.chi_dot = RVector::Zero(d_);

  if (const auto* lin = std::get_if<CartanLinear>(&seg)) {
    f.chi += lin->rates * tau;
    f.chi_dot = lin->rates;
  } else if (const auto* bl = std::get_if<BlochLoop>(&seg)) {
    const double theta_rate = (bl->theta_end - bl->theta_start) / bl->duration;
    const double theta = bl->theta_start + theta_rate * tau;
    const double phi = phi_start_[k] + bl->phi_rate * tau;
    f.V = bloch_factor(theta, phi);
    f.V_dot = bloch_factor_dot(theta, phi, theta_rate, bl->phi_rate);
  } else if (const auto* gen = std::get_if<GeneratorConst>(&seg)) {
    f.V = exps_[k]->at(tau) * V_start_[k];
    f.V_dot = kI * gen->generator * f.V;
  }
  return f;
}

LocalEvolution::Sample LocalEvolution::synthesize(double t, Side side) const {
  const Factors f = factors(t, side);
  const CMatrix E = diagonal_phases(f.chi);
  Sample s;
  s.U = f.V * E;
  CVector rate = kI * f.chi_dot.cast<Complex>();
  s.U_dot = f.V_dot * E + s.U * rate.asDiagonal();
  return s;
}

bool LocalEvolution::coset_closed(double t, double tol) const {
  const Factors f = factors(t);
  return (f.V - CMatrix::Identity(d_, d_)).norm() <= tol;
}

CartanAngles LocalEvolution::cartan_at(double t, double tol) const {
  const Factors f = factors(t);
  const double gap = (f.V - CMatrix::Identity(d_, d_)).norm();
  if (gap > tol) {
    throw DomainError("Cartan angles undefined at t = " + std::to_string(t) +
                      ": coset factor is open (|V - 1| = " + std::to_string(gap) + ")");
  }
  return CartanAngles::from_levels(f.chi);
}

double LocalEvolution::bloch_area(double t) const {
  const std::size_t k = locate(t, Side::kBefore);
  if (k == segments_.size()) return area_start_.empty() ? 0.0 : area_start_.back();
  double area = area_start_[k];
  if (const auto* bl = std::get_if<BlochLoop>(&segments_[k])) {
    const double tau = std::clamp(t - starts_[k], 0.0, bl->duration);
    const double theta_rate = (bl->theta_end - bl->theta_start) / bl->duration;
    area += bloch_partial_area(bl->theta_start, theta_rate, bl->phi_rate, tau);
  }
  return area;
}

std::optional<int> TimeGrid::index_of(double t, double rel_tol) const {
  if (steps <= 0) return std::nullopt;
  const double h = dt();
  const double k = std::round(t / h);
  if (k < 0 || k > steps) return std::nullopt;
  if (std::abs(t - k * h) > rel_tol * h) return std::nullopt;
  return static_cast<int>(k);
}

std::vector<CartanAngles> cartan_trajectory(const LocalEvolution& evo,
                                            const std::vector<double>& times, double tol) {
  std::vector<CartanAngles> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(evo.cartan_at(t, tol));
  return out;
}

double solid_angle(const LocalEvolution& loop, double tol) {
  if (loop.dim() != 2) throw DomainError("solid angle is defined for d = 2 paths only");
  for (const auto& seg : loop.segments()) {
    if (std::holds_alternative<GeneratorConst>(seg)) {
      throw DomainError("solid angle needs a path authored with bloch_loop segments");
    }
  }
  if (!loop.coset_closed(loop.duration(), tol)) {
    throw DomainError("solid angle of an open path: the Bloch path does not return to its start");
  }
  return loop.bloch_area(loop.duration());
}

std::optional<int> lattice_condition_check(const CartanAngles& angles, double tol) {
  const RVector& chi = angles.levels();
  const int d = angles.dim();
  const Complex z0 = std::polar(1.0, chi(0));
  for (int n = 1; n < d; ++n) {
    if (std::abs(std::polar(1.0, chi(n)) - z0) > tol) return std::nullopt;
  }
  const double turns = std::arg(z0) * d / kTwoPi;
  int n = static_cast<int>(std::lround(turns));
  if (std::abs(z0 - std::polar(1.0, kTwoPi * n / d)) > tol) return std::nullopt;
  n = ((n % d) + d) % d;
  return n;
}

}  // namespace qphase
