#pragma once

#include <span>
#include <string>
#include <vector>

#include "kqw/model.hpp"

namespace kqw {

/// How the lead damping kernel enters the propagator.
///  - none: D(w) = Gamma(w)/2, the principal-value self-energy is dropped.
///  - exact: closed-form transform of the Lorentzian kernel, with the
///    principal-value part lambda*Omega_c*w / (2(Omega_c^2 + w^2)).
enum class SelfEnergyMode { none, exact };

const char* to_string(SelfEnergyMode m);
SelfEnergyMode self_energy_from_string(const std::string& s);

/// A normal lead with a Lorentzian coupling spectrum attached to one site.
struct LeadConfig {
  int contact_site = 1;  // 1-based
  double lambda = 0.0;
  double omega_c = 1.0;
  double chem_potential = 0.0;
  double temperature = 0.0;

  void validate(int n_sites) const;
};

struct DampingSample {
  double omega = 0.0;
  double gamma = 0.0;
  cplx damping;
};

/// Gamma(w) = lambda Omega_c^2 / (w^2 + Omega_c^2).
double coupling_spectrum(double omega, const LeadConfig& lead);

cplx damping(double omega, const LeadConfig& lead, SelfEnergyMode mode = SelfEnergyMode::none);

DampingSample damping_sample(double omega, const LeadConfig& lead, SelfEnergyMode mode = SelfEnergyMode::none);

/// Diagonal of the 2N x 2N damping matrix D(w): lead x contributes D_x(w)
/// at x and conj(D_x(-w)) at N + x. Overlapping contacts add.
ComplexVector damping_diagonal(double omega, std::span<const LeadConfig> leads, int n_sites,
                               SelfEnergyMode mode = SelfEnergyMode::none);

/// Gamma(w) = D + D^dagger, returned as a dense real diagonal matrix.
RealMatrix dissipation_matrix(double omega, std::span<const LeadConfig> leads, int n_sites,
                              SelfEnergyMode mode = SelfEnergyMode::none);

/// Fermi function 1/(exp((w - mu)/T) + 1); T == 0 gives the step with 1/2
/// at w == mu.
double fermi(double omega, double mu, double temperature);

}  // namespace kqw
