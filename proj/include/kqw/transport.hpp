#pragma once

#include <array>
#include <span>
#include <vector>

#include "kqw/leads.hpp"
#include "kqw/model.hpp"
#include "kqw/quadrature.hpp"

namespace kqw {

struct PropagatorOptions {
  SelfEnergyMode self_energy = SelfEnergyMode::none;
  /// Extra i*eta added to omega; guards decoupled sites in hand checks.
  double broadening = 0.0;
  /// Largest acceptable condition-number estimate of omega - H + iD.
  double max_condition = 1e14;
};

struct PropagatorSample {
  double omega = 0.0;
  ComplexMatrix matrix;  // G(w) = i [w - H + i D(w)]^{-1}
};

/// Full 2N x 2N propagator by dense LU. Throws NumericalError naming omega
/// when the system is singular or too ill-conditioned.
PropagatorSample propagator(const BdgMatrix& H, std::span<const LeadConfig> leads, double omega,
                            const PropagatorOptions& opts = {});

/// The propagator elements the two-lead current needs: G_{x,y}, G_{x,y+N}
/// and G_{x,x+N} (x = first lead, y = second lead), plus both Gammas.
struct ContactElements {
  cplx direct;
  cplx crossed;
  cplx local;
  double gamma_x = 0.0;
  double gamma_y = 0.0;
};

ContactElements contact_elements(const BdgMatrix& H, std::span<const LeadConfig> leads, double omega,
                                 const PropagatorOptions& opts = {});

/// Repeated contact-element evaluation for one wire and lead pair. H is
/// diagonalized once; D is nonzero only on the contact rows, so G restricted
/// to them is S (1 + i D S)^{-1} with S the bare resolvent on those rows.
/// Falls back to dense LU within `pole_guard` of an eigenvalue of H.
class ContactSolver {
 public:
  ContactSolver(const BdgMatrix& H, std::span<const LeadConfig> leads);

  ContactElements at(double omega, const PropagatorOptions& opts = {}) const;

  const BdgMatrix& hamiltonian() const { return H_; }
  std::span<const LeadConfig> leads() const { return leads_; }
  const Eigen::VectorXd& eigenvalues() const { return evals_; }

  double pole_guard = 1e-6;

 private:
  BdgMatrix H_;
  std::vector<LeadConfig> leads_;
  std::vector<int> rows_;  // distinct contact indices into the 2N basis
  Eigen::VectorXd evals_;
  ComplexMatrix amps_;  // eigenvector components on rows_
};

/// The three Andreev-resolved terms, in order: direct (electron x -> electron
/// y), crossed Andreev (electron x -> hole y), local Andreev (electron x ->
/// hole x).
using TermBreakdown = std::array<double, 3>;

struct TransportResult {
  /// Steady current out of lead x in units of e * energy / h.
  double current = 0.0;
  TermBreakdown breakdown{};
  double error_estimate = 0.0;
  int evaluations = 0;
};

/// Steady current from the frequency integral of the three propagator terms,
/// weighted by f_x - f_y, f_x - fbar_y and f_x - fbar_x. Integrates over
/// [-W, W], W = max(4 max Omega_c, 1.2 max|eigenvalue|, 1.2 max|mu_lead| +
/// 10 max T), breaking panels at lead chemical potentials and eigenvalues.
TransportResult steady_current(const WireConfig& config, std::span<const LeadConfig> leads,
                               const QuadratureSpec& quad = {}, const PropagatorOptions& opts = {});

struct ConductancePoint {
  double bias = 0.0;
  double total = 0.0;
  TermBreakdown breakdown{};
};

/// Zero-temperature dI/dV (units e^2/h) with the bias taken as the lead-x
/// chemical potential:
///   |G_xy|^2 Gx Gy + |G_{x,y+N}|^2 Gx Gy + 2 |G_{x,x+N}|^2 Gx^2   at w = bias.
ConductancePoint differential_conductance(const BdgMatrix& H, std::span<const LeadConfig> leads, double bias,
                                          const PropagatorOptions& opts = {});
ConductancePoint differential_conductance(const WireConfig& config, std::span<const LeadConfig> leads, double bias,
                                          const PropagatorOptions& opts = {});
ConductancePoint differential_conductance(const ContactSolver& solver, double bias, const PropagatorOptions& opts = {});

struct Peak {
  double location = 0.0;
  double height = 0.0;
  /// Full width at half maximum; NaN when the half-maximum is not reached
  /// before a neighbouring minimum.
  double fwhm = 0.0;
  /// False for zero-width resonances narrower than SweepOptions::min_peak_width.
  bool resolved = true;
  bool in_gap = false;
};

struct SweepOptions {
  PropagatorOptions propagator;
  int threads = 1;
  /// Local maxima lower than this are ignored.
  double min_peak_height = 1e-3;
  /// Instrument resolution in energy units: narrower peaks are reported
  /// but flagged unresolved.
  double min_peak_width = 1e-5;
  /// Points on each side of every mode energy in the refinement grid.
  int refine_points = 60;
};

struct ConductanceCurve {
  std::vector<ConductancePoint> points;
  std::vector<Peak> peaks;
  /// Biases where the propagator was singular; their points hold NaN.
  std::vector<double> singular_biases;
};

/// Uniform bias grid plus local refinement around the mode energies inside
/// [v_min, v_max]; each grid-local maximum is polished by golden-section
/// search on the continuous curve. Mode energies closer to zero than the
/// finest refinement spacing are placed exactly at zero bias.
ConductanceCurve conductance_sweep(const WireConfig& config, std::span<const LeadConfig> leads, double v_min,
                                   double v_max, int points, const SweepOptions& opts = {});

}  // namespace kqw
