#include <algorithm>
#include <cmath>

#include "defectline/matrix.hpp"
#include "defectline/rng.hpp"
#include "defectline/rootfind.hpp"
#include "doctest.h"

using namespace defectline;

namespace {

double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  REQUIRE(a.size() == b.size());
  double worst = 0;
  for (const auto& x : a) {
    double best = 1e300;
    std::size_t bi = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
      if (std::abs(x - b[i]) < best) {
        best = std::abs(x - b[i]);
        bi = i;
      }
    worst = std::max(worst, best);
    b.erase(b.begin() + static_cast<long>(bi));
  }
  return worst;
}

SearchWindow window_for(const std::vector<cplx>& pts, double pad) {
  SearchWindow w;
  w.x_min = w.y_min = 1e300;
  w.x_max = w.y_max = -1e300;
  for (const auto& p : pts) {
    w.x_min = std::min(w.x_min, p.real());
    w.x_max = std::max(w.x_max, p.real());
    w.y_min = std::min(w.y_min, p.imag());
    w.y_max = std::max(w.y_max, p.imag());
  }
  w.x_min -= pad;
  w.x_max += pad;
  w.y_min -= pad;
  w.y_max += pad;
  return w;
}

// Dense-grid sign-change oracle: cells where both components of
// Im(psi^* grad psi) change sign across the cell corners.
std::vector<std::array<double, 2>> sign_change_cells(const FieldSlice& s, const SearchWindow& w,
                                                     int res) {
  std::vector<std::array<double, 2>> hits;
  std::vector<double> g1((res + 1) * (res + 1)), g2((res + 1) * (res + 1));
  for (int i = 0; i <= res; ++i)
    for (int j = 0; j <= res; ++j) {
      const double x = w.x_min + (w.x_max - w.x_min) * i / res;
      const double y = w.y_min + (w.y_max - w.y_min) * j / res;
      const auto g = s.grad_num(x, y);
      g1[i * (res + 1) + j] = g[0];
      g2[i * (res + 1) + j] = g[1];
    }
  for (int i = 0; i < res; ++i)
    for (int j = 0; j < res; ++j) {
      const int c[4] = {i * (res + 1) + j, (i + 1) * (res + 1) + j, i * (res + 1) + j + 1,
                        (i + 1) * (res + 1) + j + 1};
      auto changes = [&](const std::vector<double>& g) {
        double lo = 1e300, hi = -1e300;
        for (int k : c) {
          lo = std::min(lo, g[k]);
          hi = std::max(hi, g[k]);
        }
        return lo <= 0 && hi >= 0;
      };
      if (changes(g1) && changes(g2))
        hits.push_back({w.x_min + (w.x_max - w.x_min) * (i + 0.5) / res,
                        w.y_min + (w.y_max - w.y_min) * (j + 0.5) / res});
    }
  return hits;
}

// Independent R^4 oracle: coarse residual grid, local minima refined by a
// shrinking pattern search. No Newton, no Jacobians.
std::vector<std::array<double, 4>> dense_grid_quartet_roots(const ComplexMatrix& m, double L,
                                                            int res) {
  auto resid = [&](const std::array<double, 4>& p) {
    const auto f = quartet_value(m, p);
    return std::abs(f[0]) + std::abs(f[1]) + std::abs(f[2]) + std::abs(f[3]);
  };
  std::vector<std::array<double, 4>> candidates;
  const double h = 2 * L / res;
  for (int a = 0; a <= res; ++a)
    for (int b = 0; b <= res; ++b)
      for (int c = 0; c <= res; ++c)
        for (int d = 0; d <= res; ++d) {
          std::array<double, 4> p{-L + a * h, -L + b * h, -L + c * h, -L + d * h};
          if (resid(p) < 3.0 * h * (1.0 + 4 * L)) candidates.push_back(p);
        }
  std::vector<std::array<double, 4>> roots;
  for (auto p : candidates) {
    double step = h;
    double best = resid(p);
    for (int it = 0; it < 400 && step > 1e-12; ++it) {
      bool improved = false;
      for (int dim = 0; dim < 4; ++dim)
        for (double sgn : {-1.0, 1.0}) {
          auto q = p;
          q[dim] += sgn * step;
          const double r = resid(q);
          if (r < best) {
            best = r;
            p = q;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
    }
    if (best < 1e-9) {
      bool dup = false;
      for (const auto& r : roots) {
        double d = 0;
        for (int k = 0; k < 4; ++k) d = std::max(d, std::abs(r[k] - p[k]));
        if (d < 1e-5) dup = true;
      }
      if (!dup) roots.push_back(p);
    }
  }
  return roots;
}

}  // namespace

TEST_CASE("xi = N zeros are the eigenvalues") {
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 7;
    EvolutionLaw law{ginibre_standard(n, 500 + rep), cplx(1, 0)};
    WaveField f(law, n);
    const auto evs = eigenvalues(f.matrix_at(0.3));
    SearchWindow w = window_for(evs, 0.8);
    const auto r = find_plane_zeros(f, 0.3, w);
    REQUIRE(r.roots.size() == evs.size());
    std::vector<cplx> got;
    for (const auto& z : r.roots) got.emplace_back(z.x, z.y);
    CHECK(multiset_distance(got, evs) < 1e-8);
    for (const auto& z : r.roots) CHECK(z.residual < 1e-9);
  }
}

TEST_CASE("root count equals N for xi = N over many Ginibre draws") {
  int checked = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = 2 + rep % 7;  // N in {2..8}
    EvolutionLaw law{ginibre_standard(n, 9000 + rep), cplx(1, 0)};
    WaveField f(law, n);
    const auto evs = eigenvalues(law.m0);
    SearchWindow w = window_for(evs, 0.7);
    w.grid_density = 24;
    const auto r = find_plane_zeros(f, 0.0, w);
    CHECK(r.roots.size() == static_cast<std::size_t>(n));
    ++checked;
  }
  CHECK(checked == 200);
}

TEST_CASE("2x2 worked example has no plane zeros") {
  ComplexMatrix m(2);
  m(0, 0) = 1;
  m(0, 1) = -2;
  m(1, 0) = 1;
  m(1, 1) = 2;
  EvolutionLaw law{m, cplx(0, 0)};
  WaveField f(law, 1);
  SearchWindow w{-4, 4, -4, 4, 32};
  const auto r = find_plane_zeros(f, 0.0, w);
  CHECK(r.roots.empty());
  const auto sol = solve_line_circle(coeffs_2x2_of_matrix(m));
  CHECK(sol.count == 0);
  CHECK(sol.discriminant < 0);
}

TEST_CASE("line-ellipse field: zeros at (+-sqrt(2 eps - eps^2), eps)") {
  for (double eps : {0.1, 0.5, 1.0}) {
    LineEllipseField f(eps);
    SearchWindow w{-2, 2, -1.5, 2.5, 24};
    const auto r = find_plane_zeros(f, 0.0, w);
    REQUIRE(r.roots.size() == 2);
    const double xs = std::sqrt(2 * eps - eps * eps);
    std::vector<double> got{r.roots[0].x, r.roots[1].x};
    std::sort(got.begin(), got.end());
    CHECK(got[0] == doctest::Approx(-xs).epsilon(1e-8));
    CHECK(got[1] == doctest::Approx(xs).epsilon(1e-8));
    CHECK(r.roots[0].y == doctest::Approx(eps).epsilon(1e-8));
    CHECK(r.roots[1].y == doctest::Approx(eps).epsilon(1e-8));
  }
}

TEST_CASE("line-ellipse field: critical points for eps < 0") {
  for (double eps : {-0.1, -0.5}) {
    LineEllipseField f(eps);
    SearchWindow w{-1.5, 1.5, -2.5, 2.5, 24};
    const auto r = find_phase_critical_points(f, 0.0, w);
    REQUIRE(r.roots.size() == 2);
    const double root = std::sqrt(eps * eps - 2 * eps);
    std::vector<double> ys{r.roots[0].y, r.roots[1].y};
    std::sort(ys.begin(), ys.end());
    CHECK(ys[0] == doctest::Approx(eps - root).epsilon(1e-8));
    CHECK(ys[1] == doctest::Approx(eps + root).epsilon(1e-8));
    CHECK(std::abs(r.roots[0].x) < 1e-8);
    CHECK(std::abs(r.roots[1].x) < 1e-8);
  }
}

TEST_CASE("phase-surface stationary points at +-sqrt(eps/3)") {
  const double eps = 0.27;
  PhaseSurfaceField f(eps);
  SearchWindow w{-1.2, 1.2, -1.2, 1.2, 24};
  const auto r = find_phase_critical_points(f, 0.0, w);
  REQUIRE(r.roots.size() == 2);
  const double xc = std::sqrt(eps / 3.0);
  std::vector<double> xs{r.roots[0].x, r.roots[1].x};
  std::sort(xs.begin(), xs.end());
  CHECK(xs[0] == doctest::Approx(-xc).epsilon(1e-9));
  CHECK(xs[1] == doctest::Approx(xc).epsilon(1e-9));
}

TEST_CASE("pure-vortex 4x4 field: critical points agree with the grid oracle") {
  EvolutionLaw law{ginibre_standard(4, 321), cplx(1, 0)};
  WaveField f(law, 4);
  const auto evs = eigenvalues(law.m0);
  SearchWindow w = window_for(evs, 0.6);
  w.grid_density = 32;
  const auto slice = f.slice(0.0);
  const auto r = find_phase_critical_points(*slice, w);
  // Gauss-Lucas: N-1 critical points of the polynomial inside the hull.
  CHECK(r.roots.size() >= 3);
  const auto cells = sign_change_cells(*slice, w, 160);
  // Every found critical point is near a sign-change cell and vice versa.
  for (const auto& root : r.roots) {
    double best = 1e300;
    for (const auto& c : cells) best = std::min(best, std::hypot(root.x - c[0], root.y - c[1]));
    CHECK(best < 0.1);
  }
}

TEST_CASE("discriminant sign decides existence for the 2x2 field") {
  for (int rep = 0; rep < 300; ++rep) {
    const auto m = sample_ginibre(2, 1.0, 40000 + rep);
    const auto sol = solve_line_circle(coeffs_2x2_of_matrix(m));
    EvolutionLaw law{m, cplx(0, 0)};
    WaveField f(law, 1);
    SearchWindow w{-30, 30, -30, 30, 16};
    const auto r = find_plane_zeros(f, 0.0, w);
    if (sol.degenerate_line || sol.inconsistent_line) continue;
    CHECK((sol.discriminant >= 0) == !r.roots.empty());
  }
}

TEST_CASE("quaternion golden roots (3/2, 0, +-sqrt(7)/2, 0)") {
  ComplexMatrix m(2);
  m(0, 0) = 1;
  m(0, 1) = -2;
  m(1, 0) = 1;
  m(1, 1) = 2;
  Box4 box;
  box.lo = {-3, -3, -3, -3};
  box.hi = {3, 3, 3, 3};
  const auto r = find_quaternion_roots(m, box);
  REQUIRE(r.roots.size() == 2);
  const double sq7h = std::sqrt(7.0) / 2.0;
  for (const auto& root : r.roots) {
    CHECK(std::abs(root.x - 1.5) < 1e-9);
    CHECK(std::abs(root.y) < 1e-9);
    CHECK(std::abs(std::abs(root.z) - sq7h) < 1e-9);
    CHECK(std::abs(root.w) < 1e-9);
    CHECK(root.residual < 1e-9);
  }
  CHECK(r.roots[0].z == doctest::Approx(-r.roots[1].z));
}

TEST_CASE("diagonal matrix gives planar quaternion roots at the eigenvalues") {
  ComplexMatrix m(2);
  m(0, 0) = 1;
  m(1, 1) = 2;
  Box4 box;
  box.lo = {-3, -3, -3, -3};
  box.hi = {3, 3, 3, 3};
  const auto r = find_quaternion_roots(m, box);
  REQUIRE(r.roots.size() == 2);
  for (const auto& root : r.roots) {
    CHECK(root.planar);
    CHECK(std::abs(root.y) < 1e-9);
    CHECK(std::abs(root.z) < 1e-9);
    CHECK(std::abs(root.w) < 1e-9);
    CHECK((std::abs(root.x - 1) < 1e-9 || std::abs(root.x - 2) < 1e-9));
  }
}

TEST_CASE("off-plane quaternion roots pair as (z,w) <-> (-z,-w)") {
  int tested = 0;
  for (int rep = 0; rep < 40 && tested < 10; ++rep) {
    const auto m = sample_ginibre(2, 1.0, 7770 + rep);
    if (solve_line_circle(coeffs_2x2_of_matrix(m)).count > 0) continue;
    const auto box = default_box4(1.0, 2, cplx(0, 0), 0.0);
    const auto r = find_quaternion_roots(m, box);
    REQUIRE(r.roots.size() >= 2);
    // Find the extreme off-plane root and its partner.
    const QuaternionRoot* best = nullptr;
    for (const auto& root : r.roots)
      if (!root.planar && (!best || std::abs(root.z) > std::abs(best->z))) best = &root;
    REQUIRE(best != nullptr);
    bool paired = false;
    for (const auto& root : r.roots)
      if (&root != best && std::abs(root.x - best->x) < 1e-9 &&
          std::abs(root.y - best->y) < 1e-9 && std::abs(root.z + best->z) < 1e-9 &&
          std::abs(root.w + best->w) < 1e-9)
        paired = true;
    CHECK(paired);
    ++tested;
  }
  CHECK(tested == 10);
}

TEST_CASE("quaternion roots agree with the dense-grid refinement oracle") {
  const auto m = sample_ginibre(2, 1.0, 424242);
  const double L = 4.0;
  Box4 box;
  box.lo = {-L, -L, -L, -L};
  box.hi = {L, L, L, L};
  const auto newton = find_quaternion_roots(m, box);
  const auto oracle = dense_grid_quartet_roots(m, L, 14);
  REQUIRE(!newton.roots.empty());
  CHECK(newton.roots.size() == oracle.size());
  for (const auto& o : oracle) {
    double best = 1e300;
    for (const auto& r : newton.roots) {
      double d = std::max({std::abs(r.x - o[0]), std::abs(r.y - o[1]), std::abs(r.z - o[2]),
                           std::abs(r.w - o[3])});
      best = std::min(best, d);
    }
    CHECK(best < 1e-6);
  }
}

TEST_CASE("quartet residuals vanish at returned roots") {
  const auto m = sample_ginibre(2, 2.0, 31415);
  const auto box = default_box4(2.0, 2, cplx(1, 0), 0.5);
  ComplexMatrix mt = m;
  mt(0, 0) += 0.5;
  mt(1, 1) -= 0.5;
  const auto r = find_quaternion_roots(mt, box);
  REQUIRE(!r.roots.empty());
  for (const auto& root : r.roots) {
    const auto f = quartet_value(mt, {root.x, root.y, root.z, root.w});
    for (double v : f) CHECK(std::abs(v) < 1e-7);
  }
}

TEST_CASE("degenerate double zero is reported, not dropped") {
  BubbleField f(1.0);
  SearchWindow w{0.2, 1.8, -0.8, 0.8, 24};
  const auto r = find_plane_zeros(*f.slice(0.0), w);
  // The coincident pair at (1, 0) must surface either as a root or as a
  // suspect; silence would hide the defect complex entirely.
  bool reported = false;
  for (const auto& z : r.roots)
    if (std::hypot(z.x - 1, z.y) < 1e-3) reported = true;
  for (const auto& z : r.suspects)
    if (std::hypot(z.x - 1, z.y) < 1e-3) reported = true;
  CHECK(reported);
}

TEST_CASE("window validation") {
  SearchWindow w{1, -1, 0, 1, 32};
  CHECK_THROWS_AS(w.validate(), std::invalid_argument);
  SearchWindow w2{-1, 1, -1, 1, 4};
  CHECK_THROWS_AS(w2.validate(), std::invalid_argument);
}
