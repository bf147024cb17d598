#include "kqw/leads.hpp"

#include <cmath>
#include <string>

#include "kqw/errors.hpp"

namespace kqw {

const char* to_string(SelfEnergyMode m) { return m == SelfEnergyMode::none ? "none" : "exact"; }

SelfEnergyMode self_energy_from_string(const std::string& s) {
  if (s == "none") return SelfEnergyMode::none;
  if (s == "exact") return SelfEnergyMode::exact;
  throw ConfigError("self-energy mode must be 'none' or 'exact', got '" + s + "'");
}

void LeadConfig::validate(int n_sites) const {
  if (contact_site < 1 || contact_site > n_sites) {
    throw ConfigError("lead contact site " + std::to_string(contact_site) + " outside 1.." + std::to_string(n_sites));
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lead lambda must be finite and >= 0");
  if (!(omega_c > 0.0) || !std::isfinite(omega_c)) throw ConfigError("lead omega_c must be finite and > 0");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ConfigError("lead temperature must be finite and >= 0");
  }
  if (!std::isfinite(chem_potential)) throw ConfigError("lead chemical potential must be finite");
}

double coupling_spectrum(double omega, const LeadConfig& lead) {
  const double oc2 = lead.omega_c * lead.omega_c;
  return lead.lambda * oc2 / (omega * omega + oc2);
}

cplx damping(double omega, const LeadConfig& lead, SelfEnergyMode mode) {
  const double gamma = coupling_spectrum(omega, lead);
  if (mode == SelfEnergyMode::none) return {0.5 * gamma, 0.0};
  // Transform of Theta(t) (lambda Omega_c / 2) exp(-Omega_c t); its real
  // part equals Gamma/2 exactly, so reuse it.
  const double oc = lead.omega_c;
  return {0.5 * gamma, 0.5 * lead.lambda * oc * omega / (oc * oc + omega * omega)};
}

DampingSample damping_sample(double omega, const LeadConfig& lead, SelfEnergyMode mode) {
  return {omega, coupling_spectrum(omega, lead), damping(omega, lead, mode)};
}

ComplexVector damping_diagonal(double omega, std::span<const LeadConfig> leads, int n_sites, SelfEnergyMode mode) {
  ComplexVector d = ComplexVector::Zero(2 * n_sites);
  for (const auto& lead : leads) {
    const int x = lead.contact_site - 1;
    d(x) += damping(omega, lead, mode);
    d(n_sites + x) += std::conj(damping(-omega, lead, mode));
  }
  return d;
}

RealMatrix dissipation_matrix(double omega, std::span<const LeadConfig> leads, int n_sites, SelfEnergyMode mode) {
  const ComplexVector d = damping_diagonal(omega, leads, n_sites, mode);
  return (2.0 * d.real()).asDiagonal();
}

double fermi(double omega, double mu, double temperature) {
  const double x = omega - mu;
  if (x == 0.0) return 0.5;
  if (temperature == 0.0) return x < 0.0 ? 1.0 : 0.0;
  const double z = x / temperature;
  // exp of a large positive argument overflows; use the mirrored form.
  if (z > 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace kqw
