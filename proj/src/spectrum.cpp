#include "kqw/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "kqw/errors.hpp"

namespace kqw {

const char* to_string(ModeClass c) {
  switch (c) {
    case ModeClass::in_gap:
      return "in_gap";
    case ModeClass::bulk:
      return "bulk";
    case ModeClass::defect_byproduct:
      return "defect_byproduct";
  }
  return "unknown";
}

ComplexVector EigenMode::stacked() const {
  ComplexVector v(electron_amp.size() + hole_amp.size());
  v << electron_amp, hole_amp;
  return v;
}

namespace {

void fix_phase(ComplexVector& v) {
  Eigen::Index imax = 0;
  v.cwiseAbs2().maxCoeff(&imax);
  const double a = std::abs(v(imax));
  if (a > 0.0) v *= std::conj(v(imax)) / a;
  v(imax) = std::abs(v(imax));
}

EigenMode make_mode(double energy, const ComplexVector& v) {
  const Eigen::Index n = v.size() / 2;
  EigenMode m;
  m.energy = energy;
  m.electron_amp = v.head(n);
  m.hole_amp = v.tail(n);
  return m;
}

double energy_scale(const std::vector<EigenMode>& modes) {
  double s = 1.0;
  for (const auto& m : modes) s = std::max(s, std::abs(m.energy));
  return s;
}

/// Rotates a cluster of (numerically) zero-energy modes into conjugate-swap
/// partners. The self-conjugate (Majorana) vectors spanning the cluster are
/// localized by diagonalizing the site-position operator, then paired
/// outermost-first.
std::vector<ModePair> pair_zero_cluster(const std::vector<const EigenMode*>& cluster) {
  const Eigen::Index dim = cluster.front()->electron_amp.size() * 2;
  const Eigen::Index n = dim / 2;

  // Real Gram-Schmidt over the self-conjugate candidates v + Cv, i(v - Cv).
  std::vector<ComplexVector> basis;
  const cplx I(0.0, 1.0);
  for (const EigenMode* m : cluster) {
    const ComplexVector v = m->stacked();
    const ComplexVector cv = conjugate_swap(v);
    for (ComplexVector c : {ComplexVector(v + cv), ComplexVector(I * (v - cv))}) {
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& b : basis) c -= b.dot(c).real() * b;
      }
      const double nrm = c.norm();
      if (nrm > 1e-6) basis.push_back(c / nrm);
    }
  }
  if (basis.size() != cluster.size()) {
    std::ostringstream os;
    os << "zero-energy cluster of " << cluster.size() << " modes spans " << basis.size()
       << " self-conjugate directions";
    throw SymmetryError(os.str());
  }

  const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
  ComplexMatrix A(dim, k);
  for (Eigen::Index j = 0; j < k; ++j) A.col(j) = basis[j];

  Eigen::VectorXd position(dim);
  for (Eigen::Index i = 0; i < n; ++i) position(i) = position(n + i) = static_cast<double>(i);
  const RealMatrix X = (A.adjoint() * position.asDiagonal() * A).real();
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(X);
  const ComplexMatrix localized = A * es.eigenvectors().cast<cplx>();

  // Spectral representation of H restricted to the cluster.
  ComplexMatrix V(dim, k);
  Eigen::VectorXd e(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    V.col(j) = cluster[j]->stacked();
    e(j) = cluster[j]->energy;
  }

  std::vector<ModePair> pairs;
  for (Eigen::Index j = 0; j < k / 2; ++j) {
    ComplexVector psi = (localized.col(j) + I * localized.col(k - 1 - j)) / std::sqrt(2.0);
    const ComplexVector proj = V.adjoint() * psi;
    double energy = (proj.cwiseAbs2().array() * e.array()).sum();
    if (energy < 0.0) {
      psi = conjugate_swap(psi);
      energy = -energy;
    }
    fix_phase(psi);
    pairs.push_back({make_mode(energy, psi), make_mode(-energy, conjugate_swap(psi))});
  }
  return pairs;
}

}  // namespace

std::vector<EigenMode> diagonalize(const BdgMatrix& H) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H.entries());
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge (dimension " << H.dimension() << ", norm bound " << H.norm() << ")";
    throw NumericalError(os.str());
  }
  const auto& evals = es.eigenvalues();
  const Eigen::Index dim = evals.size();
  const double tol = 1e-10 * std::max(1.0, H.norm());
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::abs(evals(i) + evals(dim - 1 - i)) > tol) {
      std::ostringstream os;
      os << "spectrum not symmetric about zero: " << evals(i) << " vs " << evals(dim - 1 - i);
      throw SymmetryError(os.str());
    }
  }

  std::vector<EigenMode> modes;
  modes.reserve(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    ComplexVector v = es.eigenvectors().col(i);
    fix_phase(v);
    modes.push_back(make_mode(evals(i), v));
  }
  return modes;
}

std::vector<ModePair> pair_modes(const std::vector<EigenMode>& modes, const PairingOptions& opts) {
  if (modes.empty() || modes.size() % 2 != 0) {
    throw SymmetryError("particle-hole pairing needs an even, non-empty mode list");
  }
  const double tol = opts.degeneracy_tol * energy_scale(modes);

  std::vector<std::size_t> order(modes.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(modes[a].energy) < std::abs(modes[b].energy); });

  std::vector<const EigenMode*> zero, positive, negative;
  for (std::size_t idx : order) {
    const EigenMode& m = modes[idx];
    if (std::abs(m.energy) <= tol) {
      zero.push_back(&m);
    } else if (m.energy > 0.0) {
      positive.push_back(&m);
    } else {
      negative.push_back(&m);
    }
  }
  // An odd zero cluster means one partner sits just outside the tolerance.
  if (zero.size() % 2 == 1) {
    const EigenMode* next = nullptr;
    auto& pool = (!positive.empty() && (negative.empty() || positive.front()->energy < -negative.front()->energy))
                     ? positive
                     : negative;
    if (!pool.empty()) {
      next = pool.front();
      pool.erase(pool.begin());
      zero.push_back(next);
    }
  }
  if (positive.size() != negative.size()) {
    throw SymmetryError("unequal numbers of positive and negative modes");
  }

  std::vector<ModePair> pairs;
  if (!zero.empty()) pairs = pair_zero_cluster(zero);

  for (const EigenMode* p : positive) {
    const ComplexVector partner = conjugate_swap(p->stacked());
    double captured = 0.0;
    for (const EigenMode* q : negative) {
      if (std::abs(q->energy + p->energy) > std::max(tol, 1e-9 * std::abs(p->energy)) * 10.0) continue;
      captured += std::norm(q->stacked().dot(partner));
    }
    const double overlap = std::sqrt(captured);
    if (overlap < opts.min_overlap) {
      std::ostringstream os;
      os << "mode at energy " << p->energy << " has no particle-hole partner (best overlap " << overlap << ")";
      throw SymmetryError(os.str());
    }
    pairs.push_back({*p, make_mode(-p->energy, partner)});
  }

  std::sort(pairs.begin(), pairs.end(), [](const ModePair& a, const ModePair& b) { return a.energy() < b.energy(); });
  return pairs;
}

void classify_modes(std::vector<ModePair>& pairs, const WireConfig& config, const ClassifyOptions& opts) {
  const double gap = bulk_gap(config.hopping, config.pairing, config.chem_potential);
  for (auto& pr : pairs) {
    const double e = pr.energy();
    ModeClass c = ModeClass::bulk;
    if (e < opts.gap_fraction * gap) {
      c = ModeClass::in_gap;
    } else {
      for (const auto& d : config.defects) {
        const double mp = std::abs(d.potential);
        if (mp > 0.0 && std::abs(e - mp) < opts.byproduct_fraction * mp) {
          c = ModeClass::defect_byproduct;
          break;
        }
      }
    }
    pr.positive.mode_class = c;
    pr.negative.mode_class = c;
  }
}

MajoranaPair majorana_rep(const EigenMode& mode) {
  return {mode.electron_amp + mode.hole_amp.conjugate(), mode.electron_amp - mode.hole_amp.conjugate()};
}

std::vector<Coupling> low_energy_couplings(const std::vector<ModePair>& pairs) {
  std::vector<Coupling> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].mode_class() == ModeClass::in_gap) out.push_back({static_cast<int>(i), pairs[i].energy()});
  }
  return out;
}

std::vector<ModePair> solve_spectrum(const WireConfig& config, const ClassifyOptions& opts) {
  auto pairs = pair_modes(diagonalize(build_bdg(config)));
  classify_modes(pairs, config, opts);
  return pairs;
}

}  // namespace kqw
