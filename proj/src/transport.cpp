#include "kqw/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kqw/errors.hpp"
#include "kqw/parallel.hpp"
#include "kqw/spectrum.hpp"

namespace kqw {

namespace {

constexpr cplx kI{0.0, 1.0};

ComplexMatrix resolvent_system(const BdgMatrix& H, std::span<const LeadConfig> leads, double omega,
                               const PropagatorOptions& opts) {
  const int n = H.n_sites();
  ComplexMatrix M = -H.entries();
  const ComplexVector d = damping_diagonal(omega, leads, n, opts.self_energy);
  for (int i = 0; i < 2 * n; ++i) M(i, i) += cplx(omega, opts.broadening) + kI * d(i);
  return M;
}

Eigen::PartialPivLU<ComplexMatrix> factorize(const ComplexMatrix& M, double omega, const PropagatorOptions& opts) {
  Eigen::PartialPivLU<ComplexMatrix> lu(M);
  // rcond() reports 1 when a pivot is exactly zero, so look at the pivots first
  const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double rc = pivots.minCoeff() > 0.0 && pivots.allFinite() ? lu.rcond() : 0.0;
  if (!(rc > 0.0) || 1.0 / rc > opts.max_condition) {
    std::ostringstream os;
    os.precision(17);
    os << "propagator singular at omega = " << omega << " (condition estimate "
       << (rc > 0.0 ? 1.0 / rc : std::numeric_limits<double>::infinity()) << ")";
    throw NumericalError(os.str());
  }
  return lu;
}

void require_two_leads(std::span<const LeadConfig> leads, int n_sites) {
  if (leads.size() != 2) {
    throw ConfigError("two-lead transport needs exactly 2 leads, got " + std::to_string(leads.size()));
  }
  for (const auto& l : leads) l.validate(n_sites);
}

ConductancePoint from_contacts(const ContactElements& c, double bias) {
  ConductancePoint p;
  p.bias = bias;
  p.breakdown[0] = std::norm(c.direct) * c.gamma_x * c.gamma_y;
  p.breakdown[1] = std::norm(c.crossed) * c.gamma_y * c.gamma_x;
  p.breakdown[2] = 2.0 * std::norm(c.local) * c.gamma_x * c.gamma_x;
  p.total = p.breakdown[0] + p.breakdown[1] + p.breakdown[2];
  return p;
}

}  // namespace

PropagatorSample propagator(const BdgMatrix& H, std::span<const LeadConfig> leads, double omega,
                            const PropagatorOptions& opts) {
  for (const auto& l : leads) l.validate(H.n_sites());
  const ComplexMatrix M = resolvent_system(H, leads, omega, opts);
  const auto lu = factorize(M, omega, opts);
  const ComplexMatrix id = ComplexMatrix::Identity(M.rows(), M.cols());
  return {omega, kI * lu.solve(id)};
}

ContactElements contact_elements(const BdgMatrix& H, std::span<const LeadConfig> leads, double omega,
                                 const PropagatorOptions& opts) {
  require_two_leads(leads, H.n_sites());
  const int n = H.n_sites();
  const int x = leads[0].contact_site - 1;
  const int y = leads[1].contact_site - 1;

  const auto lu = factorize(resolvent_system(H, leads, omega, opts), omega, opts);
  ComplexMatrix rhs = ComplexMatrix::Zero(2 * n, 3);
  rhs(y, 0) = 1.0;
  rhs(n + y, 1) = 1.0;
  rhs(n + x, 2) = 1.0;
  const ComplexMatrix cols = lu.solve(rhs);

  ContactElements c;
  c.direct = kI * cols(x, 0);
  c.crossed = kI * cols(x, 1);
  c.local = kI * cols(x, 2);
  c.gamma_x = coupling_spectrum(omega, leads[0]);
  c.gamma_y = coupling_spectrum(omega, leads[1]);
  return c;
}

ContactSolver::ContactSolver(const BdgMatrix& H, std::span<const LeadConfig> leads)
    : H_(H), leads_(leads.begin(), leads.end()) {
  require_two_leads(leads, H.n_sites());
  const int n = H.n_sites();
  for (const auto& l : leads_) {
    for (int r : {l.contact_site - 1, n + l.contact_site - 1}) {
      if (std::find(rows_.begin(), rows_.end(), r) == rows_.end()) rows_.push_back(r);
    }
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H.entries());
  evals_ = es.eigenvalues();
  amps_.resize(static_cast<Eigen::Index>(rows_.size()), evals_.size());
  for (std::size_t a = 0; a < rows_.size(); ++a) amps_.row(static_cast<Eigen::Index>(a)) = es.eigenvectors().row(rows_[a]);
}

ContactElements ContactSolver::at(double omega, const PropagatorOptions& opts) const {
  const int n = H_.n_sites();
  const int x = leads_[0].contact_site - 1;
  const int y = leads_[1].contact_site - 1;
  ContactElements c;
  c.gamma_x = coupling_spectrum(omega, leads_[0]);
  c.gamma_y = coupling_spectrum(omega, leads_[1]);

  const cplx z(omega, opts.broadening);
  const double nearest = (evals_.array() - omega).abs().minCoeff();
  if (opts.broadening == 0.0 && nearest < pole_guard * std::max(1.0, std::abs(omega))) {
    const ContactElements dense = contact_elements(H_, leads_, omega, opts);
    c.direct = dense.direct;
    c.crossed = dense.crossed;
    c.local = dense.local;
    return c;
  }

  const ComplexVector inv = (z - evals_.array().cast<cplx>()).inverse().matrix();
  const ComplexMatrix S = amps_ * inv.asDiagonal() * amps_.adjoint();
  const ComplexVector d = damping_diagonal(omega, leads_, n, opts.self_energy);
  const auto k = static_cast<Eigen::Index>(rows_.size());
  ComplexMatrix K = ComplexMatrix::Identity(k, k);
  for (Eigen::Index a = 0; a < k; ++a) K.row(a) += kI * d(rows_[static_cast<std::size_t>(a)]) * S.row(a);
  // G_CC = i S K^{-1}, solved as K^T X^T = S^T
  const ComplexMatrix G = kI * K.transpose().fullPivLu().solve(S.transpose()).transpose();
  if (!G.allFinite()) {
    std::ostringstream os;
    os.precision(17);
    os << "propagator singular at omega = " << omega;
    throw NumericalError(os.str());
  }
  auto pos = [&](int r) {
    return static_cast<Eigen::Index>(std::find(rows_.begin(), rows_.end(), r) - rows_.begin());
  };
  c.direct = G(pos(x), pos(y));
  c.crossed = G(pos(x), pos(n + y));
  c.local = G(pos(x), pos(n + x));
  return c;
}

TransportResult steady_current(const WireConfig& config, std::span<const LeadConfig> leads, const QuadratureSpec& quad,
                               const PropagatorOptions& opts) {
  const ContactSolver solver(build_bdg(config), leads);
  const LeadConfig& lx = leads[0];
  const LeadConfig& ly = leads[1];
  const Eigen::VectorXd& evals = solver.eigenvalues();
  double window = 4.0 * std::max(lx.omega_c, ly.omega_c);
  window = std::max(window, 1.2 * evals.cwiseAbs().maxCoeff());
  const double max_t = std::max(lx.temperature, ly.temperature);
  window = std::max(window, 1.2 * std::max(std::abs(lx.chem_potential), std::abs(ly.chem_potential)) + 40.0 * max_t);

  std::vector<double> breaks{lx.chem_potential, ly.chem_potential, 0.0};
  for (Eigen::Index i = 0; i < evals.size(); ++i) breaks.push_back(evals(i));
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  auto integrand = [&](double w, std::span<double> out) {
    const ContactElements c = solver.at(w, opts);
    const double fx = fermi(w, lx.chem_potential, lx.temperature);
    const double fy = fermi(w, ly.chem_potential, ly.temperature);
    const double fbar_x = fermi(lx.chem_potential, w, lx.temperature);
    const double fbar_y = fermi(ly.chem_potential, w, ly.temperature);
    out[0] = std::norm(c.direct) * c.gamma_x * c.gamma_y * (fx - fy);
    out[1] = std::norm(c.crossed) * c.gamma_y * c.gamma_x * (fx - fbar_y);
    out[2] = std::norm(c.local) * c.gamma_x * c.gamma_x * (fx - fbar_x);
  };

  const QuadratureResult q = integrate(integrand, 3, -window, window, breaks, quad);
  TransportResult r;
  for (int k = 0; k < 3; ++k) r.breakdown[k] = q.value[k];
  r.current = r.breakdown[0] + r.breakdown[1] + r.breakdown[2];
  r.error_estimate = q.error;
  r.evaluations = q.evaluations;
  return r;
}

ConductancePoint differential_conductance(const BdgMatrix& H, std::span<const LeadConfig> leads, double bias,
                                          const PropagatorOptions& opts) {
  require_two_leads(leads, H.n_sites());
  if (leads[0].temperature != 0.0) {
    throw ConfigError("differential_conductance is the zero-temperature formula; lead x has T > 0");
  }
  return from_contacts(contact_elements(H, leads, bias, opts), bias);
}

ConductancePoint differential_conductance(const ContactSolver& solver, double bias, const PropagatorOptions& opts) {
  if (solver.leads()[0].temperature != 0.0) {
    throw ConfigError("differential_conductance is the zero-temperature formula; lead x has T > 0");
  }
  return from_contacts(solver.at(bias, opts), bias);
}

ConductancePoint differential_conductance(const WireConfig& config, std::span<const LeadConfig> leads, double bias,
                                          const PropagatorOptions& opts) {
  return differential_conductance(build_bdg(config), leads, bias, opts);
}

namespace {

struct CurveFunction {
  const ContactSolver& solver;
  const PropagatorOptions& opts;

  double operator()(double v) const {
    try {
      return differential_conductance(solver, v, opts).total;
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  }
};

std::vector<double> build_grid(const std::vector<EigenMode>& modes, std::span<const LeadConfig> leads, double v_min,
                               double v_max, int points, const SweepOptions& opts) {
  const double step = (v_max - v_min) / (points - 1);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = v_min + step * i;
  grid.back() = v_max;

  const double finest = opts.min_peak_width / 4.0;
  for (const auto& m : modes) {
    if (m.energy < v_min || m.energy > v_max) continue;
    double width = 0.0;
    for (const auto& l : leads) {
      const int s = l.contact_site - 1;
      width += coupling_spectrum(m.energy, l) * (std::norm(m.electron_amp(s)) + std::norm(m.hole_amp(s)));
    }
    const double center = std::abs(m.energy) < finest ? 0.0 : m.energy;
    if (width == 0.0) continue;
    const double spacing = std::clamp(width / 4.0, finest, step / 4.0);
    for (int j = -opts.refine_points; j <= opts.refine_points; ++j) {
      const double v = center + j * spacing;
      if (v >= v_min && v <= v_max) grid.push_back(v);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
             grid.end());
  return grid;
}

/// Golden-section maximization on [a, b].
std::pair<double, double> polish_max(const CurveFunction& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  const double tol = 1e-13 * std::max(1.0, std::abs(a) + std::abs(b));
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Distance from the apex to the half-maximum crossing on one side.
/// `dir` is +1 or -1; returns NaN if the curve turns upward first.
double half_width(const CurveFunction& f, const std::vector<ConductancePoint>& pts, std::size_t i, double apex,
                  double height, int dir) {
  const double half = 0.5 * height;
  double inside = apex;
  double prev_val = height;
  std::size_t j = i;
  while (true) {
    if (dir > 0 ? j + 1 >= pts.size() : j == 0) return std::numeric_limits<double>::quiet_NaN();
    j = dir > 0 ? j + 1 : j - 1;
    const double v = pts[j].total;
    if (!std::isfinite(v)) return std::numeric_limits<double>::quiet_NaN();
    if (dir * (pts[j].bias - apex) <= 0.0) continue;
    if (v < half) {
      double lo = inside, hi = pts[j].bias;
      for (int it = 0; it < 200 && std::abs(hi - lo) > 1e-15 * std::max(1.0, std::abs(apex)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= half ? lo : hi) = mid;
      }
      return std::abs(0.5 * (lo + hi) - apex);
    }
    if (v > prev_val) return std::numeric_limits<double>::quiet_NaN();
    prev_val = v;
    inside = pts[j].bias;
  }
}

}  // namespace

ConductanceCurve conductance_sweep(const WireConfig& config, std::span<const LeadConfig> leads, double v_min,
                                   double v_max, int points, const SweepOptions& opts) {
  if (points < 2) throw ConfigError("conductance sweep needs at least 2 points");
  if (!(v_max > v_min)) throw ConfigError("conductance sweep needs v_max > v_min");
  const BdgMatrix H = build_bdg(config);
  const ContactSolver solver(H, leads);
  if (leads[0].temperature != 0.0) {
    throw ConfigError("differential_conductance is the zero-temperature formula; lead x has T > 0");
  }

  const auto modes = diagonalize(H);
  const std::vector<double> grid = build_grid(modes, leads, v_min, v_max, points, opts);

  ConductanceCurve curve;
  curve.points.resize(grid.size());
  std::vector<char> singular(grid.size(), 0);
  parallel_for(grid.size(), opts.threads, [&](std::size_t i) {
    try {
      curve.points[i] = differential_conductance(solver, grid[i], opts.propagator);
    } catch (const NumericalError&) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      curve.points[i] = {grid[i], nan, {nan, nan, nan}};
      singular[i] = 1;
    }
  });
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (singular[i]) curve.singular_biases.push_back(grid[i]);
  }

  const double gap = bulk_gap(config.hopping, config.pairing, config.chem_potential);
  const CurveFunction f{solver, opts.propagator};
  const auto& pts = curve.points;
  std::vector<std::size_t> maxima;
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double v = pts[i].total;
    if (!std::isfinite(v) || v < opts.min_peak_height) continue;
    const double l = pts[i - 1].total, r = pts[i + 1].total;
    if (std::isfinite(l) && std::isfinite(r) && v > l && v >= r) maxima.push_back(i);
  }

  std::vector<Peak> peaks(maxima.size());
  parallel_for(maxima.size(), opts.threads, [&](std::size_t k) {
    const std::size_t i = maxima[k];
    auto [x, h] = polish_max(f, pts[i - 1].bias, pts[i + 1].bias);
    if (!(h >= pts[i].total)) {
      x = pts[i].bias;
      h = pts[i].total;
    }
    Peak p;
    p.location = x;
    p.height = h;
    const double left = half_width(f, pts, i, x, h, -1);
    const double right = half_width(f, pts, i, x, h, +1);
    p.fwhm = left + right;
    p.resolved = !(p.fwhm < opts.min_peak_width);
    p.in_gap = std::abs(x) < 0.9 * gap;
    peaks[k] = p;
  });

  for (const auto& p : peaks) {
    const bool dup = std::any_of(curve.peaks.begin(), curve.peaks.end(), [&](const Peak& q) {
      return std::abs(q.location - p.location) < 1e-9 * std::max(1.0, std::abs(p.location));
    });
    if (!dup) curve.peaks.push_back(p);
  }
  return curve;
}

}  // namespace kqw
