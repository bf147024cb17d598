#include <doctest.h>

#include <cmath>
#include <random>

#include "kqw/analysis.hpp"
#include "kqw/errors.hpp"
#include "kqw/spectrum.hpp"
#include "kqw/transport.hpp"
#include "oracles.hpp"

using namespace kqw;

namespace {

std::vector<LeadConfig> ends(int n, double lambda, double omega_c, int left = 1, int right = 0) {
  return {{left, lambda, omega_c, 0.0, 0.0}, {right ? right : n, lambda, omega_c, 0.0, 0.0}};
}

// Independent propagator: plain matrix inverse of w - H + iD built here.
ComplexMatrix reference_propagator(const WireConfig& w, std::span<const LeadConfig> leads, double omega,
                                   SelfEnergyMode mode) {
  const int n = w.n_sites;
  ComplexMatrix M = -oracle::bdg(w);
  for (int i = 0; i < 2 * n; ++i) M(i, i) += omega;
  for (const auto& l : leads) {
    const int x = l.contact_site - 1;
    const double g = l.lambda * l.omega_c * l.omega_c / (omega * omega + l.omega_c * l.omega_c);
    const double s = mode == SelfEnergyMode::exact ? l.lambda * l.omega_c * omega / (2 * (l.omega_c * l.omega_c + omega * omega)) : 0.0;
    M(x, x) += cplx(0, 1) * cplx(g / 2, s);
    M(n + x, n + x) += cplx(0, 1) * cplx(g / 2, s);
  }
  return cplx(0, 1) * M.inverse();
}

}  // namespace

TEST_CASE("propagator against a direct inverse") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const WireConfig w = oracle::random_wire(rng, 10);
    const auto leads = oracle::random_leads(rng, w.n_sites);
    const double omega = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto mode = trial % 2 ? SelfEnergyMode::exact : SelfEnergyMode::none;
    const BdgMatrix H = build_bdg(w);
    const PropagatorSample s = propagator(H, leads, omega, {mode});
    const ComplexMatrix ref = reference_propagator(w, leads, omega, mode);
    const double scale = ref.cwiseAbs().maxCoeff();
    REQUIRE((s.matrix - ref).cwiseAbs().maxCoeff() <= 1e-9 * scale);

    // defining relation G (-i)(w - H + iD) = 1
    ComplexMatrix M = -H.entries();
    const ComplexVector d = damping_diagonal(omega, leads, w.n_sites, mode);
    for (int i = 0; i < H.dimension(); ++i) M(i, i) += omega + cplx(0, 1) * d(i);
    REQUIRE((s.matrix * cplx(0, -1) * M - ComplexMatrix::Identity(H.dimension(), H.dimension())).cwiseAbs().maxCoeff() <= 1e-9);

    // dissipation identity in both orders
    const ComplexMatrix G = s.matrix;
    const ComplexMatrix Gam = dissipation_matrix(omega, leads, w.n_sites, mode).cast<cplx>();
    const double g2 = std::pow(G.cwiseAbs().rowwise().sum().maxCoeff(), 2);
    REQUIRE((G + G.adjoint() - G * Gam * G.adjoint()).cwiseAbs().maxCoeff() <= 1e-8 * g2);
    REQUIRE((G + G.adjoint() - G.adjoint() * Gam * G).cwiseAbs().maxCoeff() <= 1e-8 * g2);

    const ContactElements c = contact_elements(H, leads, omega, {mode});
    const int x = leads[0].contact_site - 1, y = leads[1].contact_site - 1, n = w.n_sites;
    REQUIRE(std::abs(c.direct - G(x, y)) <= 1e-10 * scale);
    REQUIRE(std::abs(c.crossed - G(x, y + n)) <= 1e-10 * scale);
    REQUIRE(std::abs(c.local - G(x, x + n)) <= 1e-10 * scale);
  }
}

TEST_CASE("contact solver matches the full inverse") {
  const WireConfig open{60, 1.0, 0.4, 0.1, Boundary::open, {}};
  const WireConfig ring{60, 1.0, 0.4, 0.1, Boundary::closed, {{20, 15.0}}};
  const std::vector<std::pair<WireConfig, std::vector<LeadConfig>>> cases{
      {open, ends(60, 0.3, 20.0, 1)}, {open, ends(60, 0.3, 20.0, 30)},
      {ring, ends(60, 0.3, 20.0, 21, 50)}, {ring, ends(60, 0.3, 20.0, 35, 50)},
      {{60, 1.0, 0.0, 0.3, Boundary::open, {}}, ends(60, 0.2, 20.0)}, {open, ends(60, 0.3, 20.0, 7, 7)}};
  std::mt19937_64 rng(5);
  for (const auto& [w, leads] : cases) {
    const ContactSolver solver(build_bdg(w), leads);
    std::vector<double> omegas;
    for (int i = 0; i < 50; ++i) omegas.push_back(std::uniform_real_distribution<double>(-3, 3)(rng));
    // close to the bare poles, on both sides of the dense fallback
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); k += 7) {
      for (double d : {-2e-6, 1.1e-6, 5e-7, 1e-4}) omegas.push_back(solver.eigenvalues()(k) + d);
    }
    for (const auto mode : {SelfEnergyMode::none, SelfEnergyMode::exact}) {
      for (double om : omegas) {
        const ComplexMatrix G = reference_propagator(w, leads, om, mode);
        const ContactElements c = solver.at(om, {mode});
        const int n = w.n_sites, x = leads[0].contact_site - 1, y = leads[1].contact_site - 1;
        const double scale = G.cwiseAbs().maxCoeff();
        CHECK(std::abs(c.direct - G(x, y)) <= 1e-9 * scale);
        CHECK(std::abs(c.crossed - G(x, n + y)) <= 1e-9 * scale);
        CHECK(std::abs(c.local - G(x, n + x)) <= 1e-9 * scale);
        const ConductancePoint a = differential_conductance(solver, om, {mode});
        const ConductancePoint b = differential_conductance(w, leads, om, {mode});
        for (int t = 0; t < 3; ++t) CHECK(std::abs(a.breakdown[t] - b.breakdown[t]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("decoupled two-site wire with one lead") {
  const WireConfig w{2, 0.0, 0.0, 0.0, Boundary::open, {}};
  const std::vector<LeadConfig> lead{{1, 0.4, 10.0, 0.0, 0.0}};
  PropagatorOptions opts;
  opts.broadening = 1e-9;  // site 2 has no lead: guard its 1/0 entry
  const ComplexMatrix G = propagator(build_bdg(w), lead, 0.0, opts).matrix;
  CHECK(std::abs(G(0, 0) - 2.0 / 0.4) < 1e-6);
  CHECK(std::abs(G(2, 2) - 2.0 / 0.4) < 1e-6);
  CHECK_THROWS_AS(propagator(build_bdg(w), lead, 0.0), NumericalError);
}

TEST_CASE("propagator decays like i/w at large frequency") {
  const WireConfig w{8, 1.0, 0.4, 0.2, Boundary::open, {}};
  const BdgMatrix H = build_bdg(w);
  const double omega = 1e3 * H.norm();
  const ComplexMatrix G = propagator(H, ends(8, 0.3, 20.0), omega).matrix;
  const ComplexMatrix asym = ComplexMatrix::Identity(16, 16) * cplx(0, 1.0 / omega);
  CHECK((G - asym).cwiseAbs().maxCoeff() <= 0.01 / omega);
}

TEST_CASE("tight-binding chain: no Andreev blocks") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 50; ++trial) {
    const WireConfig w = oracle::random_wire(rng, 12, false);
    const auto leads = oracle::random_leads(rng, w.n_sites);
    const double omega = std::uniform_real_distribution<double>(-3, 3)(rng);
    const ComplexMatrix G = propagator(build_bdg(w), leads, omega).matrix;
    const int n = w.n_sites;
    REQUIRE(G.topRightCorner(n, n).cwiseAbs().maxCoeff() <= 1e-12);
    REQUIRE(G.bottomLeftCorner(n, n).cwiseAbs().maxCoeff() <= 1e-12);
    const ConductancePoint p = differential_conductance(w, leads, omega);
    REQUIRE(p.breakdown[1] == 0.0);
    REQUIRE(p.breakdown[2] == 0.0);
  }
}

TEST_CASE("conductance terms are non-negative and vanish without coupling") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 200; ++trial) {
    const WireConfig w = oracle::random_wire(rng, 10);
    auto leads = oracle::random_leads(rng, w.n_sites);
    const double v = std::uniform_real_distribution<double>(-3, 3)(rng);
    const ConductancePoint p = differential_conductance(w, leads, v);
    for (double t : p.breakdown) REQUIRE(t >= 0.0);
    leads[0].lambda = 0.0;
    const ConductancePoint z = differential_conductance(w, leads, v);
    REQUIRE(z.total == 0.0);
  }
}

TEST_CASE("bias reversal symmetry") {
  SUBCASE("local Andreev term for any real pairing") {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 100; ++trial) {
      WireConfig w = oracle::random_wire(rng, 10);
      w.pairing = w.pairing.real();
      const auto leads = oracle::random_leads(rng, w.n_sites);
      const double v = std::uniform_real_distribution<double>(0.01, 3)(rng);
      const double a = differential_conductance(w, leads, v).breakdown[2];
      const double b = differential_conductance(w, leads, -v).breakdown[2];
      REQUIRE(std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)));
    }
  }
  SUBCASE("local Andreev term for the figure scenarios") {
    // the total is not bias-symmetric with two leads (only one is biased);
    // the local Andreev term is
    const WireConfig open{60, 1.0, 0.4, 0.1, Boundary::open, {}};
    const WireConfig ring{60, 1.0, 0.4, 0.1, Boundary::closed, {{20, 15.0}}};
    const std::vector<std::pair<WireConfig, std::vector<LeadConfig>>> cases{
        {open, ends(60, 0.3, 20.0, 1)}, {open, ends(60, 0.3, 20.0, 30)},
        {ring, ends(60, 0.3, 20.0, 21, 50)}, {ring, ends(60, 0.3, 20.0, 35, 50)}};
    for (const auto& [w, leads] : cases) {
      for (double v : {0.013, 0.1, 0.10574, 0.37, 0.9, 1.7}) {
        const double a = differential_conductance(w, leads, v).breakdown[2];
        const double b = differential_conductance(w, leads, -v).breakdown[2];
        REQUIRE(std::abs(a - b) <= 1e-8 * std::max(1.0, a));
      }
    }
  }
  SUBCASE("edge-coupled open wire is symmetric inside the gap") {
    const WireConfig open{60, 1.0, 0.4, 0.1, Boundary::open, {}};
    for (double v : {0.013, 0.1, 0.37}) {
      const double a = differential_conductance(open, ends(60, 0.3, 20.0, 1), v).total;
      const double b = differential_conductance(open, ends(60, 0.3, 20.0, 1), -v).total;
      CHECK(std::abs(a - b) <= 1e-8);
    }
  }
}

TEST_CASE("tight-binding peaks at the electron mode energies") {
  const WireConfig w{60, 1.0, 0.0, 0.3, Boundary::open, {}};
  const auto leads = ends(60, 0.2, 20.0);
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(build_blocks(w).h);
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); k += 7) {
    const double e = es.eigenvalues()(k);
    const double g = differential_conductance(w, leads, e).total;
    CHECK(g == doctest::Approx(1.0).epsilon(0.05));
    CHECK(g == doctest::Approx(landauer_oracle(w, leads, e)).epsilon(1e-10));
  }
}

TEST_CASE("defect-mode peaks of height 2") {
  const WireConfig w{60, 1.0, 0.4, 0.1, Boundary::closed, {{20, 15.0}}};
  const auto c = low_energy_couplings(solve_spectrum(w));
  REQUIRE(c.size() == 1);
  const auto leads = ends(60, 0.3, 20.0, 21, 50);
  for (double s : {1.0, -1.0}) CHECK(differential_conductance(w, leads, s * c[0].energy).total == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("finite temperature needs the current integral") {
  const WireConfig w{6, 1.0, 0.4, 0.1, Boundary::open, {}};
  auto leads = ends(6, 0.3, 20.0);
  leads[0].temperature = 0.01;
  CHECK_THROWS_AS(differential_conductance(w, leads, 0.1), ConfigError);
  CHECK_THROWS_AS(differential_conductance(w, std::vector<LeadConfig>{leads[0]}, 0.1), ConfigError);
}

TEST_CASE("steady current") {
  QuadratureSpec quad;
  quad.rel_tol = 1e-10;
  SUBCASE("tight-binding chain carries no Andreev current") {
    const WireConfig w{10, 1.0, 0.0, 0.3, Boundary::open, {}};
    auto leads = ends(10, 0.2, 20.0);
    leads[0].chem_potential = 0.4;
    const TransportResult r = steady_current(w, leads, quad);
    CHECK(r.breakdown[1] == 0.0);
    CHECK(r.breakdown[2] == 0.0);
    CHECK(r.current > 0.0);
    CHECK(r.current == doctest::Approx(r.breakdown[0] + r.breakdown[1] + r.breakdown[2]));
  }
  SUBCASE("equilibrium") {
    const WireConfig w{20, 1.0, 0.4, 0.1, Boundary::open, {}};
    const TransportResult r = steady_current(w, ends(20, 0.3, 20.0), quad);
    CHECK(std::abs(r.current) <= 1e-8);
  }
  SUBCASE("finite temperature equilibrium") {
    const WireConfig w{12, 1.0, 0.4, 0.1, Boundary::open, {}};
    auto leads = ends(12, 0.3, 20.0);
    leads[0].temperature = leads[1].temperature = 0.05;
    CHECK(std::abs(steady_current(w, leads, quad).current) <= 1e-8);
  }
  SUBCASE("small-bias slope gives the zero-bias conductance") {
    const WireConfig w{30, 1.0, 0.4, 0.1, Boundary::open, {}};
    auto leads = ends(30, 0.3, 20.0);
    const double d = 1e-4;
    leads[0].chem_potential = d;
    const double ip = steady_current(w, leads, quad).current;
    leads[0].chem_potential = -d;
    const double im = steady_current(w, leads, quad).current;
    const double g0 = differential_conductance(w, ends(30, 0.3, 20.0), 0.0).total;
    CHECK((ip - im) / (2 * d) == doctest::Approx(g0).epsilon(1e-3));
    CHECK(g0 == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("conductance sweep") {
  SweepOptions opts;
  SUBCASE("peaks match the electron modes of a short chain") {
    const WireConfig w{12, 1.0, 0.0, 0.3, Boundary::open, {}};
    const auto leads = ends(12, 0.2, 20.0);
    const auto curve = conductance_sweep(w, leads, -2.5, 2.5, 501, opts);
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(build_blocks(w).h);
    REQUIRE(curve.peaks.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) {
      const double e = es.eigenvalues()(static_cast<Eigen::Index>(k));
      // oracle apex: dense scan of the Landauer formula near the mode
      double best = -1.0, where = 0.0;
      for (int i = -20000; i <= 20000; ++i) {
        const double v = e + i * 1e-6;
        const double g = landauer_oracle(w, leads, v);
        if (g > best) best = g, where = v;
      }
      CHECK(std::abs(curve.peaks[k].location - where) <= 2e-6);
      CHECK(curve.peaks[k].height == doctest::Approx(best).epsilon(1e-6));
      CHECK(std::abs(curve.peaks[k].location - e) <= 5e-3);
      CHECK(curve.peaks[k].height == doctest::Approx(1.0).epsilon(0.05));
      CHECK(curve.peaks[k].resolved);
    }
    for (const auto& p : curve.points) CHECK(p.breakdown[1] + p.breakdown[2] == 0.0);
    for (std::size_t i = 1; i < curve.points.size(); ++i) CHECK(curve.points[i - 1].bias < curve.points[i].bias);
  }
  SUBCASE("weak coupling is flat away from the modes") {
    const WireConfig w{12, 1.0, 0.4, 0.1, Boundary::open, {}};
    const auto curve = conductance_sweep(w, ends(12, 1e-9, 20.0), 0.05, 0.5, 101, opts);
    double mx = 0.0;
    for (const auto& p : curve.points) mx = std::max(mx, p.total);
    CHECK(mx < 1e-6);
  }
  SUBCASE("threads give identical results") {
    const WireConfig w{20, 1.0, 0.4, 0.1, Boundary::closed, {{5, 15.0}}};
    const auto leads = ends(20, 0.3, 20.0, 6, 15);
    const auto a = conductance_sweep(w, leads, -1, 1, 201, opts);
    SweepOptions par = opts;
    par.threads = 4;
    const auto b = conductance_sweep(w, leads, -1, 1, 201, par);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) REQUIRE(a.points[i].total == b.points[i].total);
  }
  SUBCASE("bad grids") {
    const WireConfig w{4, 1.0, 0.4, 0.1, Boundary::open, {}};
    CHECK_THROWS_AS(conductance_sweep(w, ends(4, 0.3, 20.0), -1, 1, 1, opts), ConfigError);
    CHECK_THROWS_AS(conductance_sweep(w, ends(4, 0.3, 20.0), 1, -1, 10, opts), ConfigError);
  }
}
