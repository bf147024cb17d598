#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace kqw {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;

/// closed: translation-invariant ring, p(N,1) = -Delta, p(1,N) = Delta.
/// twisted: ring with the pairing on the closing bond reversed,
/// p(1,N) = -Delta, p(N,1) = Delta.
enum class Boundary { open, closed, twisted };

const char* to_string(Boundary b);

/// On-site defect. `site` is 1-based; `potential` replaces the background
/// chemical potential on that site.
struct Defect {
  int site = 1;
  double potential = 0.0;
};

/// Kitaev chain: N sites, real hopping J, complex p-wave pairing Delta,
/// real chemical potential mu, open or ring boundary, site defects.
struct WireConfig {
  int n_sites = 2;
  double hopping = 1.0;
  cplx pairing = 0.0;
  double chem_potential = 0.0;
  Boundary boundary = Boundary::open;
  std::vector<Defect> defects;

  /// Throws ConfigError on N < 2, duplicate or out-of-range defect sites.
  void validate() const;
};

/// Electron block h (real symmetric) and pairing block p (antisymmetric).
struct HamiltonianBlocks {
  RealMatrix h;
  ComplexMatrix p;
};

HamiltonianBlocks build_blocks(const WireConfig& config);

/// The 2N x 2N Bogoliubov-de Gennes matrix [[h, p], [p^dagger, -h]] acting
/// on (d_1..d_N, d_1^dagger..d_N^dagger).
class BdgMatrix {
 public:
  explicit BdgMatrix(HamiltonianBlocks blocks);

  int n_sites() const { return static_cast<int>(h_.rows()); }
  int dimension() const { return 2 * n_sites(); }
  const ComplexMatrix& entries() const { return entries_; }
  const RealMatrix& block_h() const { return h_; }
  const ComplexMatrix& block_p() const { return p_; }
  /// Spectral norm estimate (max absolute row sum, an upper bound).
  double norm() const { return norm_; }

 private:
  RealMatrix h_;
  ComplexMatrix p_;
  ComplexMatrix entries_;
  double norm_ = 0.0;
};

BdgMatrix build_bdg(const WireConfig& config);

/// -S H^* S, with S the swap of the electron and hole halves. Equals H for
/// every matrix produced by build_bdg.
ComplexMatrix particle_hole_image(const ComplexMatrix& H);

/// (v, w) -> (w^*, v^*): maps an eigenvector at energy e to one at -e.
ComplexVector conjugate_swap(const ComplexVector& v);

/// Minimum over k in [0, pi] of the bulk dispersion
/// sqrt((2J cos k - mu)^2 + 4|Delta|^2 sin^2 k).
double bulk_gap(double hopping, cplx pairing, double chem_potential);

/// Dense dump, one row per line, tab-separated "re,im" cells.
void write_matrix_tsv(std::ostream& out, const ComplexMatrix& m);

}  // namespace kqw
