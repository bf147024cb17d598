#include "kqw/analysis.hpp"

#include <cmath>
#include <sstream>

#include "kqw/errors.hpp"

namespace kqw {

namespace {

constexpr double kOriginTol = 1e-12;
constexpr cplx kI{0.0, 1.0};

void check_causal(const PoleTerm& t) {
  if (t.pole.imag() > 0.0) {
    std::ostringstream os;
    os << "pole " << t.pole << " lies in the upper half plane";
    throw ConfigError(os.str());
  }
  if (t.order < 1) throw ConfigError("pole order must be >= 1");
}

}  // namespace

PoleSum::PoleSum(std::vector<PoleTerm> terms) : terms_(std::move(terms)) {
  for (const auto& t : terms_) check_causal(t);
}

void PoleSum::add(PoleTerm term) {
  check_causal(term);
  terms_.push_back(term);
}

cplx PoleSum::operator()(cplx omega) const {
  cplx sum = 0.0;
  for (const auto& t : terms_) sum += t.residue / std::pow(omega - t.pole, t.order);
  return sum;
}

cplx PoleSum::at_time(double t) const {
  cplx sum = 0.0;
  for (const auto& term : terms_) {
    if (term.order != 1) throw NumericalError("time-domain evaluation supports simple poles only");
    sum += -kI * term.residue * std::exp(-kI * term.pole * t);
  }
  return sum;
}

PoleSum PoleSum::operator+(const PoleSum& other) const {
  PoleSum out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

PoleSum PoleSum::operator*(cplx scale) const {
  PoleSum out = *this;
  for (auto& t : out.terms_) t.residue *= scale;
  return out;
}

cplx steady_limit(const PoleSum& f) {
  cplx residue = 0.0;
  for (const auto& t : f.terms()) {
    if (std::abs(t.pole) > kOriginTol || t.residue == 0.0) continue;
    if (t.order != 1) {
      std::ostringstream os;
      os << "pole of order " << t.order << " at the origin: the signal has no steady limit";
      throw NumericalError(os.str());
    }
    residue += t.residue;
  }
  return -kI * residue;
}

double landauer_oracle(const WireConfig& config, std::span<const LeadConfig> leads, double bias, SelfEnergyMode mode) {
  if (config.pairing != 0.0) throw ConfigError("landauer_oracle applies to Delta = 0 chains only");
  if (leads.size() != 2) throw ConfigError("landauer_oracle needs exactly 2 leads");
  const int n = config.n_sites;
  for (const auto& l : leads) l.validate(n);

  const RealMatrix h = build_blocks(config).h;
  ComplexMatrix m = -h.cast<cplx>();
  for (int i = 0; i < n; ++i) m(i, i) += bias;
  for (const auto& l : leads) m(l.contact_site - 1, l.contact_site - 1) += kI * damping(bias, l, mode);

  const int x = leads[0].contact_site - 1;
  const int y = leads[1].contact_site - 1;
  Eigen::FullPivLU<ComplexMatrix> lu(m);
  if (!lu.isInvertible()) throw NumericalError("electron-block resolvent singular");
  ComplexVector e = ComplexVector::Zero(n);
  e(y) = 1.0;
  const cplx gxy = lu.solve(e)(x);
  return coupling_spectrum(bias, leads[0]) * coupling_spectrum(bias, leads[1]) * std::norm(gxy);
}

}  // namespace kqw
