#include "kqw/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <set>

#include "kqw/errors.hpp"
#include "kqw/format.hpp"

namespace kqw {

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::open:
      return "open";
    case Boundary::closed:
      return "closed";
    case Boundary::twisted:
      return "twisted";
  }
  return "unknown";
}

void WireConfig::validate() const {
  if (n_sites < 2) {
    throw ConfigError("wire needs at least 2 sites, got " + std::to_string(n_sites));
  }
  if (!std::isfinite(hopping) || !std::isfinite(chem_potential) || !std::isfinite(pairing.real()) ||
      !std::isfinite(pairing.imag())) {
    throw ConfigError("wire parameters must be finite");
  }
  std::set<int> seen;
  for (const auto& d : defects) {
    if (d.site < 1 || d.site > n_sites) {
      throw ConfigError("defect site " + std::to_string(d.site) + " outside 1.." + std::to_string(n_sites));
    }
    if (!seen.insert(d.site).second) {
      throw ConfigError("duplicate defect at site " + std::to_string(d.site));
    }
    if (!std::isfinite(d.potential)) throw ConfigError("defect potential must be finite");
  }
}

HamiltonianBlocks build_blocks(const WireConfig& config) {
  config.validate();
  const int n = config.n_sites;
  const double J = config.hopping;
  const cplx delta = config.pairing;

  HamiltonianBlocks b{RealMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
  for (int i = 0; i < n; ++i) b.h(i, i) = -config.chem_potential;
  for (const auto& d : config.defects) b.h(d.site - 1, d.site - 1) = -d.potential;

  for (int i = 0; i + 1 < n; ++i) {
    b.h(i, i + 1) = J;
    b.h(i + 1, i) = J;
    b.p(i, i + 1) = -delta;
    b.p(i + 1, i) = delta;
  }
  // Ring closure. For N = 2 the corner entries are the open bond itself,
  // which is left as is.
  if (config.boundary != Boundary::open && n > 2) {
    // closed: the bond N -> 1 oriented like every i -> i+1 bond.
    // twisted: reversed pairing on that bond (a pi flux through the ring).
    const cplx d = config.boundary == Boundary::closed ? delta : -delta;
    b.h(0, n - 1) = J;
    b.h(n - 1, 0) = J;
    b.p(n - 1, 0) = -d;
    b.p(0, n - 1) = d;
  }
  return b;
}

BdgMatrix::BdgMatrix(HamiltonianBlocks blocks) : h_(std::move(blocks.h)), p_(std::move(blocks.p)) {
  const Eigen::Index n = h_.rows();
  entries_.resize(2 * n, 2 * n);
  entries_.topLeftCorner(n, n) = h_.cast<cplx>();
  entries_.topRightCorner(n, n) = p_;
  entries_.bottomLeftCorner(n, n) = p_.adjoint();
  entries_.bottomRightCorner(n, n) = -h_.cast<cplx>();
  norm_ = entries_.cwiseAbs().rowwise().sum().maxCoeff();
}

BdgMatrix build_bdg(const WireConfig& config) { return BdgMatrix(build_blocks(config)); }

ComplexMatrix particle_hole_image(const ComplexMatrix& H) {
  const Eigen::Index n = H.rows() / 2;
  ComplexMatrix out(H.rows(), H.cols());
  // (S H^* S)_{ij} = H^*_{s(i), s(j)}
  out.topLeftCorner(n, n) = -H.bottomRightCorner(n, n).conjugate();
  out.topRightCorner(n, n) = -H.bottomLeftCorner(n, n).conjugate();
  out.bottomLeftCorner(n, n) = -H.topRightCorner(n, n).conjugate();
  out.bottomRightCorner(n, n) = -H.topLeftCorner(n, n).conjugate();
  return out;
}

ComplexVector conjugate_swap(const ComplexVector& v) {
  const Eigen::Index n = v.size() / 2;
  ComplexVector out(v.size());
  out.head(n) = v.tail(n).conjugate();
  out.tail(n) = v.head(n).conjugate();
  return out;
}

namespace {

double dispersion(double k, double J, double abs_delta, double mu) {
  const double a = 2.0 * J * std::cos(k) - mu;
  const double b = 2.0 * abs_delta * std::sin(k);
  return std::hypot(a, b);
}

}  // namespace

double bulk_gap(double hopping, cplx pairing, double chem_potential) {
  constexpr int kGrid = 4096;
  constexpr double kTol = 1e-13;
  const double pi = std::numbers::pi;
  const double ad = std::abs(pairing);
  auto e = [&](double k) { return dispersion(k, hopping, ad, chem_potential); };

  std::vector<double> vals(kGrid + 1);
  for (int i = 0; i <= kGrid; ++i) vals[i] = e(pi * i / kGrid);

  double best = *std::min_element(vals.begin(), vals.end());
  // Golden-section polish on every grid-local minimum.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i <= kGrid; ++i) {
    const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
    const bool right_ok = i == kGrid || vals[i] <= vals[i + 1];
    if (!left_ok || !right_ok) continue;
    double a = pi * std::max(i - 1, 0) / kGrid;
    double b = pi * std::min(i + 1, kGrid) / kGrid;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = e(c), fd = e(d);
    while (b - a > kTol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = e(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = e(d);
      }
    }
    best = std::min({best, fc, fd, e(0.5 * (a + b))});
  }
  return best;
}

void write_matrix_tsv(std::ostream& out, const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << '\t';
      out << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    out << '\n';
  }
}

}  // namespace kqw
