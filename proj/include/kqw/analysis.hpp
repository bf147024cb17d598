#pragma once

#include <span>
#include <initializer_list>
#include <vector>

#include "kqw/leads.hpp"
#include "kqw/model.hpp"
#include "kqw/transport.hpp"

namespace kqw {

/// One term residue / (w - pole)^order of a rational transform. A pole with
/// zero imaginary part stands for pole - i0+.
struct PoleTerm {
  cplx residue;
  cplx pole;
  int order = 1;
};

/// I(w) = sum_k residue_k / (w - pole_k)^order_k, the Fourier transform of a
/// causal signal (every pole in the closed lower half plane).
class PoleSum {
 public:
  PoleSum() = default;
  explicit PoleSum(std::vector<PoleTerm> terms);
  PoleSum(std::initializer_list<PoleTerm> terms) : PoleSum(std::vector<PoleTerm>(terms)) {}

  void add(PoleTerm term);
  const std::vector<PoleTerm>& terms() const { return terms_; }

  cplx operator()(cplx omega) const;
  /// Time-domain signal at t > 0 by closing the contour in the lower plane
  /// (simple poles only).
  cplx at_time(double t) const;

  PoleSum operator+(const PoleSum& other) const;
  PoleSum operator*(cplx scale) const;

 private:
  std::vector<PoleTerm> terms_;
};

/// Long-time limit -i lim_{w->0} w I(w), i.e. -i times the residue at the
/// origin (0 when there is none). Poles within 1e-12 of the origin count.
/// Throws NumericalError if the origin pole is not simple.
cplx steady_limit(const PoleSum& f);

/// Tight-binding (Delta = 0) conductance Gx Gy |G_xy|^2 from the N x N
/// electron block alone. Throws ConfigError if Delta != 0.
double landauer_oracle(const WireConfig& config, std::span<const LeadConfig> leads, double bias,
                       SelfEnergyMode mode = SelfEnergyMode::none);

}  // namespace kqw
