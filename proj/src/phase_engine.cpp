#include "qphase/phase_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qphase {

namespace {

struct LocalSample {
  CMatrix U;
  CMatrix U_dot;
};

// Full U = e^{i omega t} Ubar and its derivative.
LocalSample full_sample(const LocalEvolution& evo, double omega, double t, Side side) {
  auto s = evo.synthesize(t, side);
  if (omega == 0.0) return {std::move(s.U), std::move(s.U_dot)};
  const Complex g = std::polar(1.0, omega * t);
  LocalSample out;
  out.U = g * s.U;
  out.U_dot = g * (s.U_dot + kI * omega * s.U);
  return out;
}

Complex pair_overlap(const CMatrix& alpha0, const CMatrix& U_A, const CMatrix& U_B) {
  return (alpha0.adjoint() * U_A * alpha0 * U_B.transpose()).trace();
}

Complex evaluate_overlap(const CoefficientMatrix& alpha0, const PairEvolution& pair, double t) {
  const auto a = full_sample(pair.A, pair.phase_rate_A, t, Side::kAfter);
  const auto b = full_sample(pair.B, pair.phase_rate_B, t, Side::kAfter);
  return pair_overlap(alpha0.matrix(), a.U, b.U);
}

double dynamical_integrand(const CMatrix& rho_A, const CMatrix& rho_B, const LocalSample& a,
                           const LocalSample& b) {
  const Complex z = (rho_A * a.U.adjoint() * a.U_dot).trace() +
                    (rho_B * b.U.adjoint() * b.U_dot).trace();
  return z.imag();  // -i z for purely imaginary z
}

double generator_rate(const LocalSample& s) { return (s.U.adjoint() * s.U_dot).norm(); }

std::vector<int> grid_cuts(const PairEvolution& pair) {
  const TimeGrid& g = pair.grid;
  std::vector<int> cuts{0, g.steps};
  for (const LocalEvolution* evo : {&pair.A, &pair.B}) {
    for (double b : evo->breakpoints()) {
      if (b >= g.t_max) continue;
      const auto k = g.index_of(b);
      if (!k) {
        throw DomainError("segment boundary at t = " + std::to_string(b) +
                          " does not fall on the time grid (dt = " + std::to_string(g.dt()) +
                          "); choose steps so boundaries are grid points");
      }
      cuts.push_back(*k);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

CMatrix hermitian_sqrt(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
  const RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

int gcd_lcm(int a, int b) { return a / std::gcd(a, b) * b; }

}  // namespace

std::vector<double> cumulative_simpson(std::span<const double> after,
                                       std::span<const double> before, double h,
                                       std::span<const int> cuts, bool* trapezoid_used) {
  const std::size_t n = after.size();
  if (before.size() != n) throw DimensionError("cumulative_simpson: sample arrays differ in length");
  if (cuts.size() < 2 || cuts.front() != 0 || static_cast<std::size_t>(cuts.back()) + 1 != n) {
    throw DomainError("cumulative_simpson: cuts must start at 0 and end at the last sample");
  }
  if (trapezoid_used) *trapezoid_used = false;
  std::vector<double> cum(n, 0.0);
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const int a = cuts[p];
    const int b = cuts[p + 1];
    if (b <= a) throw DomainError("cumulative_simpson: cuts must be strictly increasing");
    auto f = [&](int j) { return j == a ? after[a] : (j == b ? before[b] : after[j]); };
    for (int j = a + 1; j <= b; ++j) {
      const int r = j - a;
      if (r % 2 == 0) {
        cum[j] = cum[j - 2] + h / 3.0 * (f(j - 2) + 4.0 * f(j - 1) + f(j));
      } else if (j + 1 <= b) {
        cum[j] = cum[j - 1] + h / 12.0 * (5.0 * f(j - 1) + 8.0 * f(j) - f(j + 1));
      } else if (r >= 2) {
        cum[j] = cum[j - 1] + h / 12.0 * (-f(j - 2) + 8.0 * f(j - 1) + 5.0 * f(j));
      } else {
        cum[j] = cum[j - 1] + h / 2.0 * (f(j - 1) + f(j));
        if (trapezoid_used) *trapezoid_used = true;
      }
    }
  }
  return cum;
}

PhaseTrace run_trace(const CoefficientMatrix& alpha0, const PairEvolution& pair,
                     const TraceOptions& options) {
  const TimeGrid& grid = pair.grid;
  if (pair.A.dim() != alpha0.d_A() || pair.B.dim() != alpha0.d_B()) {
    throw DimensionError("evolution dimensions (" + std::to_string(pair.A.dim()) + ", " +
                         std::to_string(pair.B.dim()) + ") do not match the state " +
                         format_shape(alpha0.matrix()));
  }
  if (grid.steps < 1 || !(grid.t_max > 0.0)) {
    throw DomainError("time grid needs t_max > 0 and at least one step");
  }
  const double slack = 1e-9 * grid.t_max;
  if (pair.A.duration() + slack < grid.t_max || pair.B.duration() + slack < grid.t_max) {
    throw DomainError("evolution is shorter than the time grid (t_max = " +
                      std::to_string(grid.t_max) + ")");
  }

  const std::vector<int> cuts = grid_cuts(pair);
  const auto [rho_A, rho_B] = reduced_densities(alpha0);
  const CMatrix& a0 = alpha0.matrix();
  const int n = grid.steps;
  const double h = grid.dt();

  PhaseTrace tr;
  tr.t.resize(n + 1);
  tr.overlap.resize(n + 1);
  tr.magnitude.resize(n + 1);
  tr.indeterminate.assign(n + 1, false);
  std::vector<double> f_after(n + 1), f_before(n + 1);

  std::size_t next_cut = 1;
  for (int k = 0; k <= n; ++k) {
    const double t = grid.at(k);
    tr.t[k] = t;
    const auto a = full_sample(pair.A, pair.phase_rate_A, t, Side::kAfter);
    const auto b = full_sample(pair.B, pair.phase_rate_B, t, Side::kAfter);
    tr.max_unitarity_residual =
        std::max({tr.max_unitarity_residual, unitarity_residual(a.U), unitarity_residual(b.U)});
    tr.overlap[k] = pair_overlap(a0, a.U, b.U);
    tr.magnitude[k] = std::abs(tr.overlap[k]);
    f_after[k] = dynamical_integrand(rho_A, rho_B, a, b);
    double rate = generator_rate(a) + generator_rate(b);

    const bool at_cut = next_cut < cuts.size() && cuts[next_cut] == k;
    if (at_cut) {
      ++next_cut;
      const auto ab = full_sample(pair.A, pair.phase_rate_A, t, Side::kBefore);
      const auto bb = full_sample(pair.B, pair.phase_rate_B, t, Side::kBefore);
      f_before[k] = dynamical_integrand(rho_A, rho_B, ab, bb);
      rate = std::max(rate, generator_rate(ab) + generator_rate(bb));
    } else {
      f_before[k] = f_after[k];
    }
    if (rate * h >= options.max_step_rotation) {
      throw NumericalGuardError(
          "time grid too coarse near t = " + std::to_string(t) + ": phasor rotation per step " +
          std::to_string(rate * h) + " rad exceeds " + std::to_string(options.max_step_rotation) +
          "; increase steps to at least " +
          std::to_string(static_cast<long long>(std::ceil(rate * grid.t_max / options.max_step_rotation)) + 1));
    }
  }
  if (tr.max_unitarity_residual > options.tol.unitarity * 1e3) {
    throw NumericalGuardError("local evolution lost unitarity (residual " +
                              std::to_string(tr.max_unitarity_residual) + ")");
  }

  tr.dynamical_phase = cumulative_simpson(f_after, f_before, h, cuts, &tr.trapezoid_fallback);

  tr.total_phase.resize(n + 1);
  double last = 0.0;
  for (int k = 0; k <= n; ++k) {
    if (tr.magnitude[k] < options.indeterminate_below) {
      tr.indeterminate[k] = true;
      last += k > 0 ? tr.dynamical_phase[k] - tr.dynamical_phase[k - 1] : 0.0;
    } else {
      last = nearest_branch(std::arg(tr.overlap[k]), last);
    }
    tr.total_phase[k] = last;
  }
  tr.geometric_phase.resize(n + 1);
  for (int k = 0; k <= n; ++k) tr.geometric_phase[k] = tr.total_phase[k] - tr.dynamical_phase[k];
  return tr;
}

PhaseTrace single_qudit_trace(const QuditDensity& rho0, const LocalEvolution& evo,
                              const TimeGrid& grid, const TraceOptions& options) {
  if (evo.dim() != rho0.d) {
    throw DimensionError("evolution dimension " + std::to_string(evo.dim()) +
                         " does not match the density matrix " + format_shape(rho0.rho));
  }
  // sqrt(rho0) as a d x d "two-qudit" state with the second factor idle:
  // Tr[sqrt(rho) U sqrt(rho)] = Tr[rho U], and rho_A = rho.
  const CoefficientMatrix alpha(hermitian_sqrt(rho0.rho), 1e-8);
  PairEvolution pair{evo, LocalEvolution::identity(evo.dim(), grid.t_max), grid};
  return run_trace(alpha, pair, options);
}

std::vector<CyclicEvent> detect_cycles(const PhaseTrace& trace, const CoefficientMatrix& alpha0,
                                       const PairEvolution& pair, double eps) {
  std::vector<CyclicEvent> events;
  const std::size_t n = trace.size();
  if (n < 2) return events;
  const double threshold = 1.0 - eps;

  if (std::all_of(trace.magnitude.begin(), trace.magnitude.end(),
                  [&](double m) { return m >= threshold; })) {
    CyclicEvent e;
    e.t_cycle = 0.0;
    e.phase = 0.0;
    e.magnitude = trace.magnitude.front();
    e.continuum = true;
    events.push_back(e);
    return events;
  }

  const double dt = trace.t[1] - trace.t[0];
  auto mag_at = [&](double t) { return std::abs(evaluate_overlap(alpha0, pair, t)); };

  auto annotate = [&](CyclicEvent& e, double branch_ref) {
    const Complex ov = evaluate_overlap(alpha0, pair, e.t_cycle);
    e.magnitude = std::abs(ov);
    e.phase = nearest_branch(std::arg(ov), branch_ref);
    if (pair.phase_rate_A == 0.0 && pair.phase_rate_B == 0.0 &&
        pair.A.coset_closed(e.t_cycle, 1e-8) && pair.B.coset_closed(e.t_cycle, 1e-8)) {
      e.n_A = lattice_condition_check(pair.A.cartan_at(e.t_cycle, 1e-8), 1e-6);
      e.n_B = lattice_condition_check(pair.B.cartan_at(e.t_cycle, 1e-8), 1e-6);
    }
  };

  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double m = trace.magnitude[k];
    if (m < 1.0 - 1e-3) continue;
    if (!(m >= trace.magnitude[k - 1] && m > trace.magnitude[k + 1])) continue;

    // Quadratic fit on the grid, then polish with fits on exact evaluations.
    double t_star = trace.t[k];
    double best = m;
    double y_m = trace.magnitude[k - 1], y_0 = m, y_p = trace.magnitude[k + 1];
    double step = dt;
    for (int iter = 0; iter < 4; ++iter) {
      const double denom = y_m - 2.0 * y_0 + y_p;
      if (denom < 0.0) {
        const double delta = std::clamp(0.5 * (y_m - y_p) / denom, -1.0, 1.0);
        const double cand = std::clamp(t_star + delta * step, trace.t[k - 1], trace.t[k + 1]);
        const double mc = mag_at(cand);
        if (mc >= best) {
          best = mc;
          t_star = cand;
        }
      }
      step *= 0.1;
      y_m = mag_at(t_star - step);
      y_0 = best;
      y_p = mag_at(t_star + step);
    }
    if (best < threshold) continue;
    CyclicEvent e;
    e.t_cycle = t_star;
    annotate(e, trace.total_phase[k]);
    events.push_back(e);
  }

  // The end of the trace counts when |overlap| is still rising into it.
  if (trace.magnitude[n - 1] >= threshold && trace.magnitude[n - 1] >= trace.magnitude[n - 2]) {
    CyclicEvent e;
    e.t_cycle = trace.t[n - 1];
    annotate(e, trace.total_phase[n - 1]);
    events.push_back(e);
  }

  // Merge detections of the same event.
  std::vector<CyclicEvent> merged;
  for (const auto& e : events) {
    if (!merged.empty() && e.t_cycle - merged.back().t_cycle < 2.0 * dt) {
      if (e.magnitude > merged.back().magnitude) merged.back() = e;
    } else {
      merged.push_back(e);
    }
  }
  return merged;
}

bool FractionalLattice::contains(double phase, double tol) const { return distance(phase) <= tol; }

double FractionalLattice::distance(double phase) const {
  double best = kPi;
  for (double v : values) best = std::min(best, std::abs(wrap_angle(phase - v)));
  return best;
}

std::vector<std::string> FractionalLattice::labels() const {
  std::vector<std::string> out;
  for (double v : values) {
    const int m = static_cast<int>(std::lround(v * L / kTwoPi));
    // v = 2 pi m / L = (2m/L) pi
    int num = 2 * m;
    int den = L;
    const int g = std::gcd(num, den);
    if (g > 0) {
      num /= g;
      den /= g;
    }
    std::string s;
    if (num == 0) {
      s = "0";
    } else {
      s = (num == 1 ? "" : std::to_string(num)) + "π";
      if (den != 1) s += "/" + std::to_string(den);
    }
    out.push_back(s);
  }
  return out;
}

FractionalLattice fractional_lattice(int d_A, int d_B) {
  if (d_A < 2 || d_B < 2) throw DomainError("fractional lattice needs d_A, d_B >= 2");
  FractionalLattice lat;
  lat.d_A = d_A;
  lat.d_B = d_B;
  lat.L = gcd_lcm(d_A, d_B);
  std::vector<int> ms;
  for (int nA = 0; nA < d_A; ++nA) {
    for (int nB = 0; nB < d_B; ++nB) {
      // 2 pi (nA/dA + nB/dB) = 2 pi m / L exactly in integers
      ms.push_back((nA * (lat.L / d_A) + nB * (lat.L / d_B)) % lat.L);
    }
  }
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  for (int m : ms) lat.values.push_back(kTwoPi * m / lat.L);
  return lat;
}

double master_phase_formula(const EntanglementReport& report, double loop_A, double loop_B,
                            int n_A, int n_B) {
  return kTwoPi * (static_cast<double>(n_A) / report.d_A + static_cast<double>(n_B) / report.d_B) -
         report.weight_A() * loop_A - report.weight_B() * loop_B;
}

double connection_integral(const GeneratorBasis& basis, const RVector& q_hat,
                           const LocalEvolution& evo, const TimeGrid& grid) {
  if (q_hat.size() != basis.size()) {
    throw DimensionError("q_hat has " + std::to_string(q_hat.size()) + " components, basis has " +
                         std::to_string(basis.size()));
  }
  PairEvolution pair{evo, LocalEvolution::identity(2, grid.t_max), grid};
  const std::vector<int> cuts = grid_cuts(pair);
  std::vector<double> after(grid.steps + 1), before(grid.steps + 1);
  std::size_t next_cut = 1;
  for (int k = 0; k <= grid.steps; ++k) {
    const double t = grid.at(k);
    auto s = evo.synthesize(t, Side::kAfter);
    after[k] = q_hat.dot(velocity_vector(basis, s.U, s.U_dot));
    if (next_cut < cuts.size() && cuts[next_cut] == k) {
      ++next_cut;
      s = evo.synthesize(t, Side::kBefore);
      before[k] = q_hat.dot(velocity_vector(basis, s.U, s.U_dot));
    } else {
      before[k] = after[k];
    }
  }
  return cumulative_simpson(after, before, grid.dt(), cuts).back();
}

}  // namespace qphase
