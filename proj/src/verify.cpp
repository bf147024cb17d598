#include "kqw/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "kqw/analysis.hpp"
#include "kqw/errors.hpp"
#include "kqw/leads.hpp"
#include "kqw/model.hpp"
#include "kqw/spectrum.hpp"
#include "kqw/transport.hpp"

namespace kqw {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int uniform_int(Rng& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

WireConfig random_wire(Rng& rng, int max_n, bool pairing) {
  WireConfig w;
  w.n_sites = uniform_int(rng, 2, max_n);
  w.hopping = uniform(rng, -1.5, 1.5);
  if (pairing) w.pairing = std::polar(uniform(rng, 0.0, 1.5), uniform(rng, -3.14159, 3.14159));
  w.chem_potential = uniform(rng, -2.0, 2.0);
  w.boundary = static_cast<Boundary>(uniform_int(rng, 0, 2));
  if (uniform_int(rng, 0, 1)) w.defects.push_back({uniform_int(rng, 1, w.n_sites), uniform(rng, -20.0, 20.0)});
  return w;
}

std::vector<LeadConfig> random_leads(Rng& rng, int n) {
  std::vector<LeadConfig> leads(2);
  for (auto& l : leads) {
    l.contact_site = uniform_int(rng, 1, n);
    l.lambda = uniform(rng, 0.05, 1.0);
    l.omega_c = uniform(rng, 0.5, 30.0);
  }
  return leads;
}

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

CheckResult timed(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r{name, false, ""};
  try {
    auto [ok, detail] = body();
    r.passed = ok;
    r.detail = detail;
  } catch (const std::exception& e) {
    r.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.detail += " (" + sci(secs) + " s)";
  return r;
}

}  // namespace

std::vector<CheckResult> run_verification(int threads, std::uint64_t seed) {
  (void)threads;
  std::vector<CheckResult> out;

  out.push_back(timed("sweet-spot zero modes (J = Delta = 1, mu = 0, N = 2..8)", [] {
    double worst_zero = 0.0;
    for (int n = 2; n <= 8; ++n) {
      WireConfig w{n, 1.0, 1.0, 0.0, Boundary::open, {}};
      const auto modes = diagonalize(build_bdg(w));
      int zeros = 0;
      for (const auto& m : modes) {
        if (std::abs(m.energy) <= 1e-12) {
          ++zeros;
          worst_zero = std::max(worst_zero, std::abs(m.energy));
        }
      }
      if (zeros != 2) return std::pair{false, "N = " + std::to_string(n) + ": " + std::to_string(zeros) + " zero modes"};
    }
    return std::pair{true, "max |eps| of zero modes " + sci(worst_zero)};
  }));

  out.push_back(timed("particle-hole symmetry on 300 random wires", [seed] {
    Rng rng(seed);
    double worst_spec = 0.0, worst_map = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
      const WireConfig w = random_wire(rng, 12, true);
      const BdgMatrix H = build_bdg(w);
      if ((particle_hole_image(H.entries()) - H.entries()).cwiseAbs().maxCoeff() != 0.0) {
        return std::pair{false, "construction identity broken at trial " + std::to_string(trial)};
      }
      const auto modes = diagonalize(H);
      const std::size_t d = modes.size();
      for (std::size_t k = 0; k < d; ++k) {
        worst_spec = std::max(worst_spec, std::abs(modes[k].energy + modes[d - 1 - k].energy) / std::max(1.0, H.norm()));
        const ComplexVector c = conjugate_swap(modes[k].stacked());
        worst_map = std::max(worst_map, (H.entries() * c + modes[k].energy * c).norm());
      }
    }
    return std::pair{worst_spec <= 1e-10 && worst_map <= 1e-8,
                     "spectral asymmetry " + sci(worst_spec) + ", eigenvector map residual " + sci(worst_map)};
  }));

  out.push_back(timed("propagator identity G + G^dagger = G Gamma G^dagger", [seed] {
    Rng rng(seed + 1);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const WireConfig w = random_wire(rng, 10, true);
      const auto leads = random_leads(rng, w.n_sites);
      const double omega = uniform(rng, -3.0, 3.0);
      const auto mode = trial % 2 ? SelfEnergyMode::exact : SelfEnergyMode::none;
      const BdgMatrix H = build_bdg(w);
      const ComplexMatrix G = propagator(H, leads, omega, {mode}).matrix;
      const RealMatrix gamma = dissipation_matrix(omega, leads, w.n_sites, mode);
      const ComplexMatrix lhs = G + G.adjoint();
      const ComplexMatrix rhs = G * gamma.cast<cplx>() * G.adjoint();
      const double gnorm = G.cwiseAbs().rowwise().sum().maxCoeff();
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff() / (gnorm * gnorm));
    }
    return std::pair{worst <= 1e-8, "max residual / |G|^2 " + sci(worst)};
  }));

  out.push_back(timed("Landauer reduction on 100 random Delta = 0 chains", [seed] {
    Rng rng(seed + 2);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      WireConfig w = random_wire(rng, 16, false);
      auto leads = random_leads(rng, w.n_sites);
      while (leads[1].contact_site == leads[0].contact_site) leads[1].contact_site = uniform_int(rng, 1, w.n_sites);
      const double bias = uniform(rng, -3.0, 3.0);
      const double oracle = landauer_oracle(w, leads, bias);
      const ConductancePoint p = differential_conductance(w, leads, bias);
      if (p.breakdown[1] != 0.0 || p.breakdown[2] != 0.0) {
        return std::pair{false, "nonzero Andreev term at trial " + std::to_string(trial)};
      }
      const double scale = std::max(std::abs(oracle), 1e-300);
      worst = std::max(worst, std::abs(p.total - oracle) / scale);
    }
    return std::pair{worst <= 1e-10, "max relative deviation " + sci(worst)};
  }));

  out.push_back(timed("steady limit of the exponentially decaying current", [] {
    const cplx i{0.0, 1.0};
    const PoleSum f({{i, 0.0}, {i, {1.0, -0.5}}});
    const cplx limit = steady_limit(f);
    const cplx scaled = steady_limit(PoleSum({{3.0 * i, 0.0}}));
    const bool ok = limit == cplx(1.0, 0.0) && scaled == cplx(3.0, 0.0);
    std::ostringstream os;
    os << "I(inf) = " << limit.real() << (limit.imag() >= 0 ? "+" : "") << limit.imag() << "i, scaled = "
       << scaled.real();
    return std::pair{ok, os.str()};
  }));

  return out;
}

}  // namespace kqw
