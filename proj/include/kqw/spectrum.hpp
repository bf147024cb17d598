#pragma once

#include <vector>

#include "kqw/model.hpp"

namespace kqw {

enum class ModeClass { in_gap, bulk, defect_byproduct };

const char* to_string(ModeClass c);

/// One BdG eigenmode psi = sum_i electron_i d_i + hole_i d_i^dagger.
struct EigenMode {
  double energy = 0.0;
  ComplexVector electron_amp;
  ComplexVector hole_amp;
  ModeClass mode_class = ModeClass::bulk;

  /// Stacked (electron, hole) eigenvector.
  ComplexVector stacked() const;
  double electron_weight() const { return electron_amp.squaredNorm(); }
};

/// A positive-energy mode and its particle-hole partner at -energy.
struct ModePair {
  EigenMode positive;
  EigenMode negative;

  double energy() const { return positive.energy; }
  ModeClass mode_class() const { return positive.mode_class; }
};

/// Site coefficients of the Majorana combinations psi + psi^dagger (g)
/// and -i(psi - psi^dagger) (h).
struct MajoranaPair {
  ComplexVector g;
  ComplexVector h;
};

/// Full spectrum, ascending. Eigenvector phases are fixed so that the
/// largest-magnitude component is real and positive.
std::vector<EigenMode> diagonalize(const BdgMatrix& H);

struct PairingOptions {
  /// Minimum |<C v_+ | P_- C v_+>| for a positive mode to count as matched.
  double min_overlap = 0.99;
  /// Energies closer than this (relative to max(1, ||H||)) form a cluster.
  double degeneracy_tol = 1e-9;
};

/// Groups the 2N modes into N particle-hole pairs. The negative member of
/// each pair is the conjugate swap of the positive one. Clusters of modes
/// at (numerically) zero energy are rotated into a basis of conjugate-swap
/// partners before pairing. Throws SymmetryError when a positive mode has
/// no partner.
std::vector<ModePair> pair_modes(const std::vector<EigenMode>& modes, const PairingOptions& opts = {});

struct ClassifyOptions {
  double gap_fraction = 0.9;
  double byproduct_fraction = 0.5;
};

/// Labels each pair in place: in_gap below gap_fraction * bulk_gap of the
/// background parameters, defect_byproduct near some |mu_p|, bulk otherwise.
void classify_modes(std::vector<ModePair>& pairs, const WireConfig& config, const ClassifyOptions& opts = {});

MajoranaPair majorana_rep(const EigenMode& mode);

struct Coupling {
  int pair_index = 0;
  double energy = 0.0;
};

/// Energies of the in-gap pairs: the Majorana coupling strengths of the
/// low-energy effective Hamiltonian.
std::vector<Coupling> low_energy_couplings(const std::vector<ModePair>& pairs);

/// Diagonalize, pair and classify in one call.
std::vector<ModePair> solve_spectrum(const WireConfig& config, const ClassifyOptions& opts = {});

}  // namespace kqw
