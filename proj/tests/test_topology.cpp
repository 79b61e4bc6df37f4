#include <algorithm>
#include <cmath>

#include "defectline/errors.hpp"
#include "defectline/matrix.hpp"
#include "defectline/rng.hpp"
#include "defectline/topology.hpp"
#include "doctest.h"

using namespace defectline;

namespace {

int binomial(int n, int k) {
  double r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return static_cast<int>(std::lround(r));
}

GenMultiset ms(int v, int vs, int s, int e) {
  GenMultiset m;
  m.count = {v, vs, s, e};
  return m;
}

}  // namespace

TEST_CASE("winding numbers of the pure-vortex field") {
  EvolutionLaw law{ginibre_standard(5, 1212), cplx(1, 0)};
  WaveField f(law, 5);
  const auto evs = eigenvalues(law.m0);
  const auto slice = f.slice(0.0);

  // Around one eigenvalue: +1.
  double nearest = 1e300;
  for (std::size_t i = 1; i < evs.size(); ++i) nearest = std::min(nearest, std::abs(evs[i] - evs[0]));
  CHECK(winding_number(*slice, evs[0].real(), evs[0].imag(), 0.4 * nearest) == 1);

  // Around all of them: N.
  double rmax = 0;
  for (const auto& ev : evs) rmax = std::max(rmax, std::abs(ev));
  CHECK(winding_number(*slice, 0, 0, rmax + 1.5) == 5);
}

TEST_CASE("winding of the conjugate-pair field around all zeros is 0") {
  EvolutionLaw law{ginibre_standard(6, 77), cplx(1, 0)};
  WaveField f(law, 3);  // Psi_{6,0}
  const auto slice = f.slice(0.0);
  CHECK(winding_number(*slice, 0, 0, 6.0) == 0);
}

TEST_CASE("winding is additive over subcontours") {
  EvolutionLaw law{ginibre_standard(4, 999), cplx(1, 0)};
  WaveField f(law, 4);
  const auto evs = eigenvalues(law.m0);
  const auto slice = f.slice(0.0);
  double rmax = 0;
  for (const auto& ev : evs) rmax = std::max(rmax, std::abs(ev));
  int sum = 0;
  for (const auto& ev : evs) {
    double nearest = 1e300;
    for (const auto& other : evs)
      if (&other != &ev) nearest = std::min(nearest, std::abs(other - ev));
    sum += winding_number(*slice, ev.real(), ev.imag(), 0.4 * nearest);
  }
  CHECK(winding_number(*slice, 0, 0, rmax + 1.2) == sum);
}

TEST_CASE("index numbers on the phase surface") {
  const double eps = 0.3;
  PhaseSurfaceField f(eps);
  const auto slice = f.slice(0.0);
  const double xc = std::sqrt(eps / 3.0);
  CHECK(index_number(*slice, -xc, 0, 0.1) == -1);  // saddle
  CHECK(index_number(*slice, xc, 0, 0.1) == 1);    // maximum
}

TEST_CASE("index around a vortex is +1") {
  EvolutionLaw law{ginibre_standard(3, 31), cplx(1, 0)};
  WaveField f(law, 3);
  const auto evs = eigenvalues(law.m0);
  const auto slice = f.slice(0.0);
  double nearest = 1e300;
  for (std::size_t i = 1; i < evs.size(); ++i) nearest = std::min(nearest, std::abs(evs[i] - evs[0]));
  CHECK(index_number(*slice, evs[0].real(), evs[0].imag(), 0.3 * nearest) == 1);
}

TEST_CASE("index around the full bubble cross-section is 0") {
  BubbleField f(1.0);
  // The coincident v, v*, s, s complex at (X0, 0) sums to (0, 0).
  CHECK(index_number(*f.slice(0.0), 1.0, 0.0, 0.5) == 0);
  CHECK(winding_number(*f.slice(0.0), 1.0, 0.0, 0.5) == 0);
}

TEST_CASE("contour with a zero on it is rejected") {
  EvolutionLaw law{ComplexMatrix(2), cplx(1, 0)};
  WaveField f(law, 2);  // zeros at (+-t, 0)
  CHECK_THROWS_AS(winding_number(*f.slice(1.0), 0.0, 0.0, 1.0), ContourUnsafeError);
}

TEST_CASE("classify: eigenvalues of the characteristic field are vortices") {
  EvolutionLaw law{ginibre_standard(5, 47), cplx(1, 0)};
  WaveField f(law, 5);
  const auto evs = eigenvalues(law.m0);
  const auto slice = f.slice(0.0);
  for (const auto& ev : evs) {
    double nearest = 1e300;
    for (const auto& other : evs)
      if (&other != &ev) nearest = std::min(nearest, std::abs(other - ev));
    const Defect d = classify(*slice, ev.real(), ev.imag(), PointKind::Nodal,
                              std::min(0.1, 0.4 * nearest));
    CHECK(d.species == Species::Vortex);
    CHECK(d.m == 1);
    CHECK(d.n_index == 1);
  }
}

TEST_CASE("classify: Jacobian at a zero matches the pairwise product formula") {
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + rep % 7;
    EvolutionLaw law{ginibre_standard(n, 5000 + rep), cplx(1, 0)};
    WaveField f(law, n);
    const auto evs = eigenvalues(law.m0);
    const auto slice = f.slice(0.0);
    for (const auto& ev : evs) {
      const Derivs2 d = slice->derivs(ev.real(), ev.imag(), 1);
      const double jac = std::imag(std::conj(d.px) * d.py);
      double want = 1;
      for (const auto& other : evs) {
        if (&other == &ev) continue;
        const double dr = ev.real() - other.real(), di = ev.imag() - other.imag();
        want *= dr * dr + di * di;
      }
      CHECK(jac > 0);
      CHECK(std::abs(jac - want) < 1e-8 * want);
    }
  }
}

TEST_CASE("classify: N=2 zeros share the same Jacobian") {
  const auto m0 = sample_ginibre(2, 1.0, 8080);
  EvolutionLaw law{m0, cplx(1, 0)};
  WaveField f(law, 2);
  const auto evs = eigenvalues(m0);
  const auto slice = f.slice(0.0);
  const double dr = evs[0].real() - evs[1].real(), di = evs[0].imag() - evs[1].imag();
  const double want = dr * dr + di * di;
  for (const auto& ev : evs) {
    const Derivs2 d = slice->derivs(ev.real(), ev.imag(), 1);
    const double jac = std::imag(std::conj(d.px) * d.py);
    CHECK(std::abs(jac - want) < 1e-10 * want);
  }
}

TEST_CASE("classify: conjugate-slot zeros are anti-vortices") {
  ComplexMatrix m(2);
  m(0, 0) = 1;
  m(1, 1) = 2;  // Psi_{2,0} = (1 - lambda)(2 - lambda*)
  EvolutionLaw law{m, cplx(0, 0)};
  WaveField f(law, 1);
  const auto slice = f.slice(0.0);
  const Defect v = classify(*slice, 1.0, 0.0, PointKind::Nodal, 0.1);
  const Defect av = classify(*slice, 2.0, 0.0, PointKind::Nodal, 0.1);
  CHECK(v.species == Species::Vortex);
  CHECK(av.species == Species::AntiVortex);
  CHECK(av.m == -1);
  CHECK(av.n_index == 1);
}

TEST_CASE("classify: line-ellipse extrema split into minimum and maximum") {
  for (double eps : {-0.1, -0.5}) {
    LineEllipseField f(eps);
    const auto slice = f.slice(0.0);
    const double root = std::sqrt(eps * eps - 2 * eps);
    const Defect hi = classify(*slice, 0.0, eps + root, PointKind::Critical, 0.05);
    const Defect lo = classify(*slice, 0.0, eps - root, PointKind::Critical, 0.05);
    CHECK(hi.species == Species::Minimum);
    CHECK(lo.species == Species::Maximum);
    CHECK(hi.n_index == 1);
    CHECK(lo.n_index == 1);
    CHECK(hi.m == 0);
  }
}

TEST_CASE("classify: phase-surface saddle and maximum") {
  const double eps = 0.3;
  PhaseSurfaceField f(eps);
  const auto slice = f.slice(0.0);
  const double xc = std::sqrt(eps / 3.0);
  CHECK(classify(*slice, -xc, 0.0, PointKind::Critical, 0.08).species == Species::Saddle);
  CHECK(classify(*slice, xc, 0.0, PointKind::Critical, 0.08).species == Species::Maximum);
}

TEST_CASE("classify rejects the degenerate bubble point") {
  BubbleField f(1.0);
  CHECK_THROWS_AS(classify(*f.slice(0.0), 1.0, 0.0, PointKind::Nodal, 0.1), UnstableDefectError);
}

TEST_CASE("totals") {
  std::vector<Defect> four_v(4, make_defect(0, 0, 0, Species::Vortex));
  CHECK(totals(four_v) == std::pair<int, int>(4, 4));

  std::vector<Defect> mix{make_defect(0, 0, 0, Species::Vortex),
                          make_defect(0, 0, 0, Species::AntiVortex),
                          make_defect(0, 0, 0, Species::Saddle),
                          make_defect(0, 0, 0, Species::Saddle)};
  CHECK(totals(mix) == std::pair<int, int>(0, 0));

  std::vector<Defect> ee{make_defect(0, 0, 0, Species::Maximum),
                         make_defect(0, 0, 0, Species::Minimum)};
  std::vector<Defect> vv{make_defect(0, 0, 0, Species::Vortex),
                         make_defect(0, 0, 0, Species::AntiVortex)};
  CHECK(totals(ee) == std::pair<int, int>(0, 2));
  CHECK(totals(vv) == std::pair<int, int>(0, 2));
}

TEST_CASE("group_reduce relations") {
  const auto vv = group_reduce(ms(1, 1, 0, 0));
  const auto ee = group_reduce(ms(0, 0, 0, 2));
  CHECK(vv.m == 0);
  CHECK(vv.n_index == 2);
  CHECK(vv.m == ee.m);
  CHECK(vv.n_index == ee.n_index);

  const auto es = group_reduce(ms(0, 0, 1, 1));
  CHECK(es.m == 0);
  CHECK(es.n_index == 0);

  // -v* = v + 2s
  const auto v2s = group_reduce(ms(1, 0, 2, 0));
  const auto vstar = group_reduce(ms(0, 1, 0, 0));
  CHECK(v2s.m == -vstar.m);
  CHECK(v2s.n_index == -vstar.n_index);
}

TEST_CASE("group_reduce is additive over multiset union") {
  Xoshiro256pp rng(10101);
  for (int rep = 0; rep < 1000; ++rep) {
    GenMultiset a, b;
    for (int i = 0; i < 4; ++i) {
      a.count[i] = static_cast<int>(rng.next() % 5);
      b.count[i] = static_cast<int>(rng.next() % 5);
    }
    const auto ra = group_reduce(a);
    const auto rb = group_reduce(b);
    const auto rab = group_reduce(a.merged(b));
    CHECK(rab.m == ra.m + rb.m);
    CHECK(rab.n_index == ra.n_index + rb.n_index);
  }
}

TEST_CASE("multiplet sizes are C(p+3, 3)") {
  CHECK(enumerate_multiplet(1).size() == 4);
  CHECK(enumerate_multiplet(2).size() == 10);
  CHECK(enumerate_multiplet(3).size() == 20);
  for (int p = 1; p <= 8; ++p)
    CHECK(enumerate_multiplet(p).size() == static_cast<std::size_t>(binomial(p + 3, 3)));
  for (const auto& c : enumerate_multiplet(3)) {
    CHECK(c.p == 3);
    const auto r = group_reduce(c.members);
    CHECK(r.m == c.w);
    CHECK(r.n_index == c.chi);
  }
}

TEST_CASE("vertex legality") {
  CHECK(vertex_legal(parse_multiset("v"), parse_multiset("v+v+v*+s+s")));
  CHECK(vertex_legal(parse_multiset("0"), parse_multiset("v+v*+s+s")));
  CHECK(vertex_legal(parse_multiset("e+e"), parse_multiset("v+v*")));
  CHECK(vertex_legal(parse_multiset("e+s"), parse_multiset("0")));
  CHECK_FALSE(vertex_legal(parse_multiset("v"), parse_multiset("v*")));
  CHECK_FALSE(vertex_legal(parse_multiset("v"), parse_multiset("e")));
  CHECK_FALSE(vertex_legal(parse_multiset("v+v*"), parse_multiset("0")));
}

TEST_CASE("multiset parsing and printing") {
  const auto m = parse_multiset(" v + v* + s+s ");
  CHECK(m[Generator::V] == 1);
  CHECK(m[Generator::Vstar] == 1);
  CHECK(m[Generator::S] == 2);
  CHECK(m[Generator::E] == 0);
  CHECK(multiset_to_string(m) == "v+v*+s+s");
  CHECK(multiset_to_string(parse_multiset("0")) == "0");
  CHECK_THROWS_AS(parse_multiset("v+q"), std::invalid_argument);
}

TEST_CASE("species <-> generator mapping") {
  CHECK(generator_of_species(Species::Vortex) == Generator::V);
  CHECK(generator_of_species(Species::AntiVortex) == Generator::Vstar);
  CHECK(generator_of_species(Species::Saddle) == Generator::S);
  CHECK(generator_of_species(Species::Maximum) == Generator::E);
  CHECK(generator_of_species(Species::Minimum) == Generator::E);
}

TEST_CASE("classify_all splits a mixed detection") {
  LineEllipseField f(0.5);
  const auto slice = f.slice(0.0);
  SearchWindow w{-2, 2, -1.5, 2.5, 24};
  const auto zeros = find_plane_zeros(*slice, w);
  const auto crits = find_phase_critical_points(*slice, w);
  const auto cls = classify_all(*slice, zeros.roots, crits.roots);
  REQUIRE(cls.defects.size() == 2);
  int v = 0, av = 0;
  for (const auto& d : cls.defects) {
    if (d.species == Species::Vortex) ++v;
    if (d.species == Species::AntiVortex) ++av;
  }
  CHECK(v == 1);
  CHECK(av == 1);
  CHECK(cls.suspects.empty());
}
