#include <doctest.h>

#include <algorithm>
#include <random>

#include "kqw/errors.hpp"
#include "kqw/spectrum.hpp"
#include "oracles.hpp"

using namespace kqw;

namespace {

std::vector<double> energies(const std::vector<EigenMode>& modes) {
  std::vector<double> e;
  for (const auto& m : modes) e.push_back(m.energy);
  return e;
}

int count_class(const std::vector<ModePair>& pairs, ModeClass c) {
  return static_cast<int>(std::count_if(pairs.begin(), pairs.end(), [&](const ModePair& p) { return p.mode_class() == c; }));
}

// Fraction of sum |x_i|^2 on sites [from, to] (1-based, inclusive).
double weight(const ComplexVector& x, int from, int to) {
  double s = 0.0;
  for (int i = from; i <= to; ++i) s += std::norm(x(i - 1));
  return s / x.squaredNorm();
}

}  // namespace

TEST_CASE("sweet-spot N = 2 spectrum and pairs") {
  const WireConfig w{2, 1.0, 1.0, 0.0, Boundary::open, {}};
  const auto modes = diagonalize(build_bdg(w));
  const auto e = energies(modes);
  REQUIRE(e.size() == 4);
  CHECK(e[0] == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(std::abs(e[1]) < 1e-14);
  CHECK(std::abs(e[2]) < 1e-14);
  CHECK(e[3] == doctest::Approx(2.0).epsilon(1e-14));

  const auto pairs = pair_modes(modes);
  REQUIRE(pairs.size() == 2);
  CHECK(std::abs(pairs[0].energy()) < 1e-14);
  CHECK(pairs[1].energy() == doctest::Approx(2.0));

  // Zero mode: one Majorana per site.
  const MajoranaPair m = majorana_rep(pairs[0].positive);
  const double g1 = weight(m.g, 1, 1), h2 = weight(m.h, 2, 2);
  const double g2 = weight(m.g, 2, 2), h1 = weight(m.h, 1, 1);
  const bool split = (g1 >= 1 - 1e-10 && h2 >= 1 - 1e-10) || (g2 >= 1 - 1e-10 && h1 >= 1 - 1e-10);
  CHECK(split);
  CHECK(m.g.squaredNorm() + m.h.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("decoupled sites") {
  const WireConfig w{2, 0.0, 0.0, 0.3, Boundary::open, {}};
  const auto modes = diagonalize(build_bdg(w));
  const auto e = energies(modes);
  CHECK(e == std::vector<double>{-0.3, -0.3, 0.3, 0.3});
  const auto pairs = pair_modes(modes);
  REQUIRE(pairs.size() == 2);
  for (const auto& p : pairs) CHECK(p.energy() == doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("open topological wire has two zero modes") {
  const WireConfig w{30, 1.0, 0.5, 0.1, Boundary::open, {}};
  const double gap = bulk_gap(1.0, 0.5, 0.1);
  const auto modes = diagonalize(build_bdg(w));

  // independent oracle: general complex eigensolver on the bond-list assembly
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> ces(oracle::bdg(w));
  std::vector<double> ref;
  for (Eigen::Index k = 0; k < ces.eigenvalues().size(); ++k) ref.push_back(std::abs(ces.eigenvalues()(k).real()));
  std::sort(ref.begin(), ref.end());
  // edge splitting decays like ((J - Delta)/(J + Delta))^(N/2) = 3^-15 ~ 7e-8
  REQUIRE(ref[0] < 1e-7);
  REQUIRE(ref[2] > 0.9 * gap);

  int zeros = 0;
  for (const auto& m : modes) {
    if (std::abs(m.energy) < 1e-7) {
      ++zeros;
      CHECK(std::abs(m.energy) == doctest::Approx(ref[0]).epsilon(1e-6));
    } else {
      CHECK(std::abs(m.energy) >= 0.9 * gap);
    }
  }
  CHECK(zeros == 2);
  const auto couplings = low_energy_couplings(solve_spectrum(w));
  REQUIRE(couplings.size() == 1);
  CHECK(couplings[0].energy == doctest::Approx(ref[0]).epsilon(1e-6));
}

TEST_CASE("eigenmode invariants on random wires") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const WireConfig w = oracle::random_wire(rng, 12);
    const BdgMatrix H = build_bdg(w);
    const auto modes = diagonalize(H);
    const int d = H.dimension();
    REQUIRE(static_cast<int>(modes.size()) == d);
    ComplexMatrix U(d, d);
    for (int k = 0; k < d; ++k) {
      const ComplexVector v = modes[k].stacked();
      U.col(k) = v;
      REQUIRE(v.squaredNorm() == doctest::Approx(1.0).epsilon(1e-12));
      REQUIRE((H.entries() * v - modes[k].energy * v).norm() <= 1e-10 * std::max(1.0, H.norm()));
      REQUIRE(std::abs(modes[k].energy + modes[d - 1 - k].energy) <= 1e-10 * std::max(1.0, H.norm()));
      const ComplexVector c = conjugate_swap(v);
      REQUIRE((H.entries() * c + modes[k].energy * c).norm() <= 1e-8);
      if (k > 0) REQUIRE(modes[k - 1].energy <= modes[k].energy);
    }
    REQUIRE((U.adjoint() * U - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("pairing: negative member is the conjugate swap of the positive one") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    WireConfig w = oracle::random_wire(rng, 8);
    if (trial < 100) w.n_sites = 8, w.defects.clear();
    const BdgMatrix H = build_bdg(w);
    const auto pairs = pair_modes(diagonalize(H));
    REQUIRE(static_cast<int>(pairs.size()) == w.n_sites);
    for (const auto& p : pairs) {
      REQUIRE(p.positive.energy >= 0.0);
      REQUIRE(p.negative.energy == doctest::Approx(-p.positive.energy).epsilon(1e-9).scale(1.0));
      const ComplexVector c = conjugate_swap(p.positive.stacked());
      const ComplexVector n = p.negative.stacked();
      const cplx phase = n.dot(c);  // <n|c>
      REQUIRE(std::abs(phase) == doctest::Approx(1.0).epsilon(1e-8));
      REQUIRE((c - phase * n).norm() <= 1e-8);
      const ComplexVector v = p.positive.stacked();
      REQUIRE((H.entries() * v - p.positive.energy * v).norm() <= 1e-8 * std::max(1.0, H.norm()));
    }
  }
}

TEST_CASE("degenerate zero cluster of decoupled Kitaev chains") {
  // Isolated sites at zero energy: an eightfold-degenerate zero cluster
  // that must still split into conjugate-swap pairs.
  const WireConfig w{5, 0.0, 0.0, 0.0, Boundary::open, {{2, 0.7}}};
  const auto pairs = pair_modes(diagonalize(build_bdg(w)));
  REQUIRE(pairs.size() == 5);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(pairs[k].energy()) < 1e-12);
  CHECK(pairs[4].energy() == doctest::Approx(0.7));
  for (const auto& p : pairs) {
    const ComplexVector c = conjugate_swap(p.positive.stacked());
    CHECK(std::abs(p.negative.stacked().dot(c)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("pairing rejects a spectrum without particle-hole partners") {
  auto modes = diagonalize(build_bdg({6, 1.0, 0.4, 0.3, Boundary::open, {}}));
  // Replace the top mode by a vector that is not the partner of anything.
  EigenMode& top = modes.back();
  top.electron_amp.setConstant(cplx(1.0, 0.5));
  top.hole_amp.setConstant(cplx(-0.25, 1.0));
  const double norm = top.stacked().norm();
  top.electron_amp /= norm;
  top.hole_amp /= norm;
  CHECK_THROWS_AS(pair_modes(modes), SymmetryError);
}

TEST_CASE("classification") {
  SUBCASE("closed wire with a strong defect") {
    const WireConfig w{30, 1.0, 0.5, 0.1, Boundary::closed, {{10, 10.0}}};
    const auto pairs = solve_spectrum(w);
    CHECK(count_class(pairs, ModeClass::in_gap) == 1);
    CHECK(count_class(pairs, ModeClass::defect_byproduct) == 1);
    CHECK(count_class(pairs, ModeClass::bulk) == 28);
    for (const auto& p : pairs) {
      if (p.mode_class() == ModeClass::defect_byproduct) CHECK(std::abs(p.energy() - 10.0) / 10.0 < 0.05);
      if (p.mode_class() == ModeClass::in_gap) {
        CHECK(p.energy() > 0.0);
        CHECK(p.energy() < bulk_gap(1.0, 0.5, 0.1));
      }
    }
  }
  SUBCASE("homogeneous closed wire has no in-gap pair") {
    CHECK(count_class(solve_spectrum({30, 1.0, 0.5, 0.1, Boundary::closed, {}}), ModeClass::in_gap) == 0);
  }
  SUBCASE("gapless chain is all bulk") {
    const auto pairs = solve_spectrum({20, 1.0, 0.0, 0.3, Boundary::open, {}});
    CHECK(count_class(pairs, ModeClass::bulk) == 20);
    CHECK(low_energy_couplings(pairs).empty());
  }
  SUBCASE("thresholds are configurable") {
    const WireConfig w{30, 1.0, 0.5, 0.1, Boundary::closed, {{10, 10.0}}};
    CHECK(count_class(solve_spectrum(w, {0.0, 0.5}), ModeClass::in_gap) == 0);
    CHECK(count_class(solve_spectrum(w, {0.9, 0.0}), ModeClass::defect_byproduct) == 0);
  }
}

TEST_CASE("defect-mode energy falls with defect strength") {
  double prev = INFINITY;
  double e10 = 0.0;
  for (double mu_p : {2.0, 5.0, 10.0, 20.0, 50.0, 100.0}) {
    const auto c = low_energy_couplings(solve_spectrum({30, 1.0, 0.6, 0.1, Boundary::closed, {{10, mu_p}}}));
    REQUIRE(c.size() == 1);
    CHECK(c[0].energy < prev);
    prev = c[0].energy;
    if (mu_p == 10.0) e10 = c[0].energy;
  }
  CHECK(prev < e10 / 5.0);
}

TEST_CASE("defect splitting exceeds the open-wire edge splitting") {
  const double open = low_energy_couplings(solve_spectrum({30, 1.0, 0.5, 0.1, Boundary::open, {}}))[0].energy;
  const auto c = low_energy_couplings(solve_spectrum({30, 1.0, 0.5, 0.1, Boundary::closed, {{10, 10.0}}}));
  REQUIRE(c.size() == 1);
  CHECK(open < 1e-7);
  CHECK(c[0].energy > open);
  CHECK(c[0].energy < bulk_gap(1.0, 0.5, 0.1));
}

TEST_CASE("Majorana representation") {
  SUBCASE("pure electron mode") {
    EigenMode m;
    m.electron_amp = ComplexVector::Zero(3);
    m.electron_amp(0) = 1.0;
    m.hole_amp = ComplexVector::Zero(3);
    const MajoranaPair p = majorana_rep(m);
    CHECK(p.g == m.electron_amp);
    CHECK(p.h == m.electron_amp);
  }
  SUBCASE("formulas and norm on random modes") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
      const auto pairs = solve_spectrum(oracle::random_wire(rng, 10));
      for (const auto& pr : pairs) {
        const EigenMode& m = pr.positive;
        const MajoranaPair p = majorana_rep(m);
        REQUIRE((p.g - (m.electron_amp + m.hole_amp.conjugate())).norm() == 0.0);
        REQUIRE((p.h - (m.electron_amp - m.hole_amp.conjugate())).norm() == 0.0);
        REQUIRE(p.g.squaredNorm() + p.h.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("defect-mode Majoranas sit on opposite sides of the defect") {
    const auto pairs = solve_spectrum({30, 1.0, 0.5, 0.1, Boundary::closed, {{10, 10.0}}});
    const auto it = std::find_if(pairs.begin(), pairs.end(),
                                 [](const ModePair& p) { return p.mode_class() == ModeClass::in_gap; });
    REQUIRE(it != pairs.end());
    const MajoranaPair p = majorana_rep(it->positive);
    // Ten sites on each side of the defect at site 10 (ring: 30 wraps to 1).
    const double g_left = weight(p.g, 1, 9) + weight(p.g, 30, 30);
    const double g_right = weight(p.g, 11, 20);
    const double h_left = weight(p.h, 1, 9) + weight(p.h, 30, 30);
    const double h_right = weight(p.h, 11, 20);
    const bool opposite = (g_left >= 0.8 && h_right >= 0.8) || (g_right >= 0.8 && h_left >= 0.8);
    CHECK(opposite);
  }
}
