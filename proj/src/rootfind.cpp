#include "defectline/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace defectline {

void SearchWindow::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max))
    throw std::invalid_argument("SearchWindow: degenerate bounds");
  if (grid_density < 8) throw std::invalid_argument("SearchWindow: grid_density must be >= 8");
}

namespace {

struct NewtonOutcome {
  bool converged = false;
  bool suspect = false;
  double x = 0, y = 0;
  double residual = 0;
};

// Damped Newton on F = (Re psi, Im psi). Fast derivatives inside the loop,
// final residual through the spec evaluation route.
NewtonOutcome newton_plane(const FieldSlice& s, double x0, double y0, const SearchWindow& win,
                           const RootfindOptions& opts) {
  NewtonOutcome out;
  double x = x0, y = y0;
  const double escape = 1.5 * win.span();
  double fnorm = std::abs(s.newton_derivs(x, y, 0).psi);
  bool ill_conditioned = false;
  for (int it = 0; it < opts.max_iter; ++it) {
    const Derivs2 d = s.newton_derivs(x, y, 1);
    const double j11 = d.px.real(), j12 = d.py.real();
    const double j21 = d.px.imag(), j22 = d.py.imag();
    const double det = j11 * j22 - j12 * j21;
    const double jn = std::abs(j11) + std::abs(j12) + std::abs(j21) + std::abs(j22);
    if (std::abs(det) < 1e-14 * jn * jn + 1e-300) {
      ill_conditioned = true;
      // Levenberg nudge along the gradient of |F|^2.
      const double gx = d.psi.real() * j11 + d.psi.imag() * j21;
      const double gy = d.psi.real() * j12 + d.psi.imag() * j22;
      const double gn = std::hypot(gx, gy) + 1e-300;
      x -= 0.25 * std::abs(d.psi) / gn * gx / gn;
      y -= 0.25 * std::abs(d.psi) / gn * gy / gn;
      continue;
    }
    if (std::abs(det) < jn * jn / opts.cond_limit) ill_conditioned = true;
    const double fr = d.psi.real(), fi = d.psi.imag();
    double dx = -(j22 * fr - j12 * fi) / det;
    double dy = -(-j21 * fr + j11 * fi) / det;
    double step = 1.0;
    double nx = x, ny = y, nf = fnorm;
    for (int b = 0; b < 8; ++b) {
      const double cx = x + step * dx, cy = y + step * dy;
      const double cf = std::abs(s.newton_derivs(cx, cy, 0).psi);
      if (cf < fnorm || b == 7) {
        nx = cx;
        ny = cy;
        nf = cf;
        break;
      }
      step *= 0.5;
    }
    const double moved = std::hypot(nx - x, ny - y);
    x = nx;
    y = ny;
    fnorm = nf;
    if (!win.contains(x, y, escape)) return out;
    const Derivs2 dv = s.newton_derivs(x, y, 1);
    const double res = std::abs(dv.psi) / (1.0 + std::hypot(std::abs(dv.px), std::abs(dv.py)));
    if (res < opts.zero_tol || moved < 1e-14 * (1.0 + std::hypot(x, y))) {
      // Polish and verify through the spec route (LU + Jacobi minors).
      for (int p = 0; p < 2; ++p) {
        const Derivs2 e = s.derivs(x, y, 1);
        const double a11 = e.px.real(), a12 = e.py.real();
        const double a21 = e.px.imag(), a22 = e.py.imag();
        const double dd = a11 * a22 - a12 * a21;
        if (std::abs(dd) < 1e-300) break;
        x -= (a22 * e.psi.real() - a12 * e.psi.imag()) / dd;
        y -= (-a21 * e.psi.real() + a11 * e.psi.imag()) / dd;
      }
      out.residual = s.len_residual(x, y);
      out.x = x;
      out.y = y;
      if (out.residual < opts.zero_tol) {
        out.converged = true;
        return out;
      }
      if (ill_conditioned && out.residual < 1e3 * opts.zero_tol) {
        out.suspect = true;
        return out;
      }
    }
  }
  // Ran out of iterations: near-degenerate leftovers become suspects.
  out.x = x;
  out.y = y;
  out.residual = s.len_residual(x, y);
  if (ill_conditioned && out.residual < 1e3 * opts.zero_tol) out.suspect = true;
  return out;
}

void merge_sorted(std::vector<PlaneZero>& pts, double tol) {
  std::sort(pts.begin(), pts.end(), [](const PlaneZero& a, const PlaneZero& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  });
  std::vector<PlaneZero> out;
  for (const auto& p : pts) {
    bool dup = false;
    for (auto it = out.rbegin(); it != out.rend(); ++it) {
      if (p.x - it->x > tol) break;
      if (std::abs(p.x - it->x) <= tol && std::abs(p.y - it->y) <= tol) {
        if (p.residual < it->residual) *it = p;
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(p);
  }
  pts = std::move(out);
}

std::vector<std::array<double, 2>> grid_seeds(const SearchWindow& win) {
  std::vector<std::array<double, 2>> seeds;
  const int dens = win.grid_density;
  seeds.reserve(static_cast<std::size_t>(dens) * dens);
  for (int i = 0; i < dens; ++i)
    for (int j = 0; j < dens; ++j) {
      const double fx = (i + 0.5) / dens;
      const double fy = (j + 0.5) / dens;
      seeds.push_back({win.x_min + fx * (win.x_max - win.x_min),
                       win.y_min + fy * (win.y_max - win.y_min)});
    }
  return seeds;
}

}  // namespace

LineCircleSolution solve_line_circle(const Coeffs2x2& c) {
  LineCircleSolution sol;
  const double A = c.quadratic[3], B = c.quadratic[4], C = c.quadratic[5];
  const double D = c.linear[0], E = c.linear[1], F = c.linear[2];
  const double scale = std::max({1.0, std::abs(A), std::abs(B), std::abs(C)});
  const double line_scale = std::max(std::abs(D), std::abs(E));
  if (line_scale < 1e-13 * scale) {
    if (std::abs(F) > 1e-13 * scale) {
      sol.inconsistent_line = true;
      return sol;
    }
    // Whole imaginary part vanishes: zeros are the real circle, if it is one.
    const double radius2 = 0.25 * (A * A + B * B) - C;
    sol.discriminant = radius2;
    if (radius2 >= 0)
      sol.degenerate_line = true;  // nodal circle: domain wall
    else
      sol.inconsistent_line = true;
    return sol;
  }
  double qa, qb, qc;
  bool solve_x;
  if (std::abs(D) >= std::abs(E)) {
    // y = -(E x + F) / D
    solve_x = true;
    qa = 1.0 + (E / D) * (E / D);
    qb = A + 2 * E * F / (D * D) - B * E / D;
    qc = C + F * F / (D * D) - B * F / D;
  } else {
    // x = -(D y + F) / E
    solve_x = false;
    qa = 1.0 + (D / E) * (D / E);
    qb = B + 2 * D * F / (E * E) - A * D / E;
    qc = C + F * F / (E * E) - A * F / E;
  }
  sol.discriminant = qb * qb - 4 * qa * qc;
  if (sol.discriminant < 0) return sol;
  const double sq = std::sqrt(sol.discriminant);
  const double r1 = (-qb + sq) / (2 * qa);
  const double r2 = (-qb - sq) / (2 * qa);
  auto emit = [&](double r) {
    double x, y;
    if (solve_x) {
      x = r;
      y = -(E * x + F) / D;
    } else {
      y = r;
      x = -(D * y + F) / E;
    }
    sol.pts[sol.count++] = {x, y};
  };
  emit(r1);
  if (sol.discriminant > 0) emit(r2);
  return sol;
}

PlaneResult find_plane_zeros(const FieldSlice& slice, const SearchWindow& window,
                             const RootfindOptions& opts,
                             const std::vector<std::array<double, 2>>& extra_seeds) {
  window.validate();
  PlaneResult result;

  // Closed-form route for the 2x2 vortex-anti-vortex field.
  if (const auto* wf = dynamic_cast<const WaveFieldSlice*>(&slice);
      wf && wf->matrix().n == 2 && wf->xi() == 1) {
    const auto sol = solve_line_circle(coeffs_2x2_of_matrix(wf->matrix()));
    if (sol.degenerate_line)
      result.warnings.push_back("degenerate nodal segment (domain wall): line equation vanishes");
    for (int i = 0; i < sol.count; ++i) {
      const auto [x, y] = sol.pts[i];
      if (!window.contains(x, y)) continue;
      result.roots.push_back({x, y, slice.len_residual(x, y)});
    }
    merge_sorted(result.roots, opts.dedup_tol);
    return result;
  }

  auto seeds = grid_seeds(window);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  std::vector<PlaneZero> hits, suspects;
  for (const auto& s : seeds) {
    const NewtonOutcome o = newton_plane(slice, s[0], s[1], window, opts);
    if (o.converged && window.contains(o.x, o.y))
      hits.push_back({o.x, o.y, o.residual});
    else if (o.suspect && window.contains(o.x, o.y))
      suspects.push_back({o.x, o.y, o.residual});
  }
  merge_sorted(hits, opts.dedup_tol);
  merge_sorted(suspects, opts.dedup_tol * 10);
  // A suspect within dedup distance of a converged root is just its shadow.
  std::vector<PlaneZero> real_suspects;
  for (const auto& s : suspects) {
    bool shadowed = false;
    for (const auto& r : hits)
      if (std::abs(s.x - r.x) < 10 * opts.dedup_tol && std::abs(s.y - r.y) < 10 * opts.dedup_tol)
        shadowed = true;
    if (!shadowed) real_suspects.push_back(s);
  }
  result.roots = std::move(hits);
  result.suspects = std::move(real_suspects);
  return result;
}

PlaneResult find_plane_zeros(const FieldView& field, double t, const SearchWindow& window,
                             const RootfindOptions& opts) {
  return find_plane_zeros(*field.slice(t), window, opts);
}

namespace {

// Newton on g = Im(psi^* grad psi) with the exact Jacobian from second
// partials.
NewtonOutcome newton_critical(const FieldSlice& s, double x0, double y0, const SearchWindow& win,
                              const RootfindOptions& opts) {
  NewtonOutcome out;
  double x = x0, y = y0;
  const double escape = 1.5 * win.span();
  auto gval = [&](double px, double py, const Derivs2& d, double& g1, double& g2) {
    const cplx pc = std::conj(d.psi);
    g1 = std::imag(pc * d.px);
    g2 = std::imag(pc * d.py);
    (void)px;
    (void)py;
  };
  bool ill_conditioned = false;
  double g1, g2;
  {
    const Derivs2 d0 = s.newton_derivs(x, y, 1);
    gval(x, y, d0, g1, g2);
  }
  double fnorm = std::hypot(g1, g2);
  for (int it = 0; it < opts.max_iter; ++it) {
    const Derivs2 d = s.newton_derivs(x, y, 2);
    gval(x, y, d, g1, g2);
    const cplx pc = std::conj(d.psi);
    const double j11 = std::imag(pc * d.pxx);
    const double j12 = std::imag(std::conj(d.py) * d.px + pc * d.pxy);
    const double j21 = std::imag(std::conj(d.px) * d.py + pc * d.pxy);
    const double j22 = std::imag(pc * d.pyy);
    const double det = j11 * j22 - j12 * j21;
    const double jn = std::abs(j11) + std::abs(j12) + std::abs(j21) + std::abs(j22);
    if (std::abs(det) < 1e-14 * jn * jn + 1e-300) {
      ill_conditioned = true;
      const double gn = std::hypot(g1, g2) + 1e-300;
      const double gx = g1 * j11 + g2 * j21, gy = g1 * j12 + g2 * j22;
      const double gg = std::hypot(gx, gy) + 1e-300;
      x -= 0.25 * gn / gg * gx / gg;
      y -= 0.25 * gn / gg * gy / gg;
      continue;
    }
    if (std::abs(det) < jn * jn / opts.cond_limit) ill_conditioned = true;
    double dx = -(j22 * g1 - j12 * g2) / det;
    double dy = -(-j21 * g1 + j11 * g2) / det;
    double step = 1.0;
    double nx = x, ny = y, nf = fnorm;
    for (int b = 0; b < 8; ++b) {
      const double cx = x + step * dx, cy = y + step * dy;
      const Derivs2 dc = s.newton_derivs(cx, cy, 1);
      double c1, c2;
      gval(cx, cy, dc, c1, c2);
      const double cf = std::hypot(c1, c2);
      if (cf < fnorm || b == 7) {
        nx = cx;
        ny = cy;
        nf = cf;
        break;
      }
      step *= 0.5;
    }
    const double moved = std::hypot(nx - x, ny - y);
    x = nx;
    y = ny;
    fnorm = nf;
    if (!win.contains(x, y, escape)) return out;
    const double res = fnorm / (1.0 + jn);
    if (res < opts.zero_tol || moved < 1e-14 * (1.0 + std::hypot(x, y))) {
      out.x = x;
      out.y = y;
      const Derivs2 e = s.derivs(x, y, 1);
      const cplx ec = std::conj(e.psi);
      const double r1 = std::imag(ec * e.px), r2 = std::imag(ec * e.py);
      out.residual = std::hypot(r1, r2) / (1.0 + jn);
      if (out.residual < opts.zero_tol) {
        out.converged = true;
        return out;
      }
      if (ill_conditioned && out.residual < 1e3 * opts.zero_tol) {
        out.suspect = true;
        return out;
      }
    }
  }
  out.x = x;
  out.y = y;
  out.residual = fnorm;
  if (ill_conditioned && fnorm < 1e3 * opts.zero_tol) out.suspect = true;
  return out;
}

}  // namespace

PlaneResult find_phase_critical_points(const FieldSlice& slice, const SearchWindow& window,
                                       const RootfindOptions& opts,
                                       const std::vector<std::array<double, 2>>& extra_seeds) {
  window.validate();
  auto seeds = grid_seeds(window);
  seeds.insert(seeds.end(), extra_seeds.begin(), extra_seeds.end());
  PlaneResult result;
  std::vector<PlaneZero> hits, suspects;
  for (const auto& s : seeds) {
    const NewtonOutcome o = newton_critical(slice, s[0], s[1], window, opts);
    if (!window.contains(o.x, o.y)) continue;
    if (!o.converged && !o.suspect) continue;
    // Nodal points also annihilate Im(psi^* grad psi); exclude them.
    if (slice.len_residual(o.x, o.y) < opts.zero_tol * 10) continue;
    if (o.converged)
      hits.push_back({o.x, o.y, o.residual});
    else
      suspects.push_back({o.x, o.y, o.residual});
  }
  merge_sorted(hits, opts.dedup_tol);
  merge_sorted(suspects, opts.dedup_tol * 10);
  std::vector<PlaneZero> real_suspects;
  for (const auto& s : suspects) {
    bool shadowed = false;
    for (const auto& r : hits)
      if (std::abs(s.x - r.x) < 10 * opts.dedup_tol && std::abs(s.y - r.y) < 10 * opts.dedup_tol)
        shadowed = true;
    if (!shadowed) real_suspects.push_back(s);
  }
  result.roots = std::move(hits);
  result.suspects = std::move(real_suspects);
  return result;
}

PlaneResult find_phase_critical_points(const FieldView& field, double t,
                                       const SearchWindow& window, const RootfindOptions& opts) {
  return find_phase_critical_points(*field.slice(t), window, opts);
}

// ---------------------------------------------------------------------------
// Quaternionic quartet
// ---------------------------------------------------------------------------

namespace {

struct QuartetCoefs {
  double ar, ai, dr, di, kr, ki;
};

QuartetCoefs quartet_coefs(const ComplexMatrix& m) {
  if (m.n != 2) throw std::invalid_argument("find_quaternion_roots: matrix must be 2x2");
  const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const cplx k = a * d - b * c;
  return {a.real(), a.imag(), d.real(), d.imag(), k.real(), k.imag()};
}

std::array<double, 4> quartet_value_c(const QuartetCoefs& q, const std::array<double, 4>& p) {
  const double x = p[0], y = p[1], z = p[2], w = p[3];
  return {q.kr + x * x + y * y - z * z + w * w - (q.ar + q.dr) * x + (q.di - q.ai) * y,
          q.ki - 2 * w * z - (q.ai + q.di) * x + (q.ar - q.dr) * y,
          2 * x * z - (q.ar + q.dr) * z - (q.ai + q.di) * w,
          2 * y * z - (q.ai - q.di) * z + (q.ar - q.dr) * w};
}

std::array<std::array<double, 4>, 4> quartet_jac_c(const QuartetCoefs& q,
                                                   const std::array<double, 4>& p) {
  const double x = p[0], y = p[1], z = p[2], w = p[3];
  return {{{2 * x - (q.ar + q.dr), 2 * y + (q.di - q.ai), -2 * z, 2 * w},
           {-(q.ai + q.di), q.ar - q.dr, -2 * w, -2 * z},
           {2 * z, 0, 2 * x - (q.ar + q.dr), -(q.ai + q.di)},
           {0, 2 * z, 2 * y - (q.ai - q.di), q.ar - q.dr}}};
}

// Gaussian elimination with partial pivoting for the 4x4 Newton step.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b,
            std::array<double, 4>& out) {
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-300) return false;
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      if (f == 0) continue;
      for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
      b[r] -= f * b[c];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < 4; ++j) s -= a[r][j] * out[j];
    out[r] = s / a[r][r];
  }
  return true;
}

double norm4(const std::array<double, 4>& v) {
  return std::max(std::max(std::abs(v[0]), std::abs(v[1])),
                  std::max(std::abs(v[2]), std::abs(v[3])));
}

double jac_norm(const std::array<std::array<double, 4>, 4>& j) {
  double m = 0;
  for (const auto& row : j) {
    double s = 0;
    for (double v : row) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

}  // namespace

std::array<double, 4> quartet_value(const ComplexMatrix& m, const std::array<double, 4>& p) {
  return quartet_value_c(quartet_coefs(m), p);
}

std::array<std::array<double, 4>, 4> quartet_jacobian(const ComplexMatrix& m,
                                                      const std::array<double, 4>& p) {
  return quartet_jac_c(quartet_coefs(m), p);
}

Box4 default_box4(double sigma, int n, cplx s, double t) {
  const double L = 3.0 * sigma * std::sqrt(static_cast<double>(n)) + std::abs(s) * std::abs(t) + 1.0;
  Box4 b;
  b.lo = {-L, -L, -L, -L};
  b.hi = {L, L, L, L};
  return b;
}

QuaternionResult find_quaternion_roots(const ComplexMatrix& m, const Box4& window4,
                                       const RootfindOptions& opts,
                                       const std::vector<std::array<double, 4>>& extra_seeds) {
  const QuartetCoefs qc = quartet_coefs(m);
  const int dens = window4.grid_density;
  double span = 0;
  for (int i = 0; i < 4; ++i) span = std::max(span, window4.hi[i] - window4.lo[i]);

  std::vector<std::array<double, 4>> seeds = extra_seeds;
  seeds.reserve(seeds.size() + static_cast<std::size_t>(dens) * dens * dens * dens);
  for (int i = 0; i < dens; ++i)
    for (int j = 0; j < dens; ++j)
      for (int k = 0; k < dens; ++k)
        for (int l = 0; l < dens; ++l)
          seeds.push_back({window4.lo[0] + (i + 0.5) / dens * (window4.hi[0] - window4.lo[0]),
                           window4.lo[1] + (j + 0.5) / dens * (window4.hi[1] - window4.lo[1]),
                           window4.lo[2] + (k + 0.5) / dens * (window4.hi[2] - window4.lo[2]),
                           window4.lo[3] + (l + 0.5) / dens * (window4.hi[3] - window4.lo[3])});

  std::vector<QuaternionRoot> hits, suspects;
  for (const auto& seed : seeds) {
    std::array<double, 4> p = seed;
    bool converged = false, ill = false;
    double fn = norm4(quartet_value_c(qc, p));
    for (int it = 0; it < opts.max_iter; ++it) {
      const auto f = quartet_value_c(qc, p);
      const auto jac = quartet_jac_c(qc, p);
      std::array<double, 4> step{};
      std::array<double, 4> rhs = {-f[0], -f[1], -f[2], -f[3]};
      if (!solve4(jac, rhs, step)) {
        ill = true;
        break;
      }
      double damp = 1.0;
      std::array<double, 4> np = p;
      double nf = fn;
      for (int b = 0; b < 8; ++b) {
        std::array<double, 4> cand;
        for (int i = 0; i < 4; ++i) cand[i] = p[i] + damp * step[i];
        const double cf = norm4(quartet_value_c(qc, cand));
        if (cf < fn || b == 7) {
          np = cand;
          nf = cf;
          break;
        }
        damp *= 0.5;
      }
      const double moved = norm4({np[0] - p[0], np[1] - p[1], np[2] - p[2], np[3] - p[3]});
      p = np;
      fn = nf;
      bool escaped = false;
      for (int i = 0; i < 4; ++i)
        if (p[i] < window4.lo[i] - 1.5 * span || p[i] > window4.hi[i] + 1.5 * span) escaped = true;
      if (escaped) break;
      const double res = fn / (1.0 + jac_norm(quartet_jac_c(qc, p)));
      if (res < opts.zero_tol) {
        converged = true;
        // Polish to machine precision with full undamped steps.
        for (int polish = 0; polish < 3; ++polish) {
          const auto pf = quartet_value_c(qc, p);
          std::array<double, 4> prhs = {-pf[0], -pf[1], -pf[2], -pf[3]};
          std::array<double, 4> pstep{};
          if (!solve4(quartet_jac_c(qc, p), prhs, pstep)) break;
          for (int i = 0; i < 4; ++i) p[i] += pstep[i];
        }
        break;
      }
      if (moved < 1e-15 * (1.0 + norm4(p))) break;
    }
    if (!converged && !ill) continue;
    bool inside = true;
    for (int i = 0; i < 4; ++i)
      if (p[i] < window4.lo[i] || p[i] > window4.hi[i]) inside = false;
    if (!inside) continue;
    const double res = norm4(quartet_value_c(qc, p)) / (1.0 + jac_norm(quartet_jac_c(qc, p)));
    QuaternionRoot root{p[0], p[1], p[2], p[3], res,
                        std::abs(p[2]) < opts.zero_tol && std::abs(p[3]) < opts.zero_tol};
    if (converged && res < opts.zero_tol)
      hits.push_back(root);
    else if (res < 1e3 * opts.zero_tol)
      suspects.push_back(root);
  }

  auto sort4 = [](std::vector<QuaternionRoot>& v) {
    std::sort(v.begin(), v.end(), [](const QuaternionRoot& a, const QuaternionRoot& b) {
      if (a.x != b.x) return a.x < b.x;
      if (a.y != b.y) return a.y < b.y;
      if (a.z != b.z) return a.z < b.z;
      return a.w < b.w;
    });
  };
  sort4(hits);
  std::vector<QuaternionRoot> uniq;
  for (const auto& r : hits) {
    bool dup = false;
    for (const auto& u : uniq)
      if (std::abs(r.x - u.x) <= opts.dedup_tol && std::abs(r.y - u.y) <= opts.dedup_tol &&
          std::abs(r.z - u.z) <= opts.dedup_tol && std::abs(r.w - u.w) <= opts.dedup_tol)
        dup = true;
    if (!dup) uniq.push_back(r);
  }
  sort4(suspects);
  std::vector<QuaternionRoot> uniq_sus;
  for (const auto& r : suspects) {
    bool dup = false;
    for (const auto& u : uniq)
      if (std::abs(r.x - u.x) <= 10 * opts.dedup_tol && std::abs(r.y - u.y) <= 10 * opts.dedup_tol &&
          std::abs(r.z - u.z) <= 10 * opts.dedup_tol && std::abs(r.w - u.w) <= 10 * opts.dedup_tol)
        dup = true;
    for (const auto& u : uniq_sus)
      if (std::abs(r.x - u.x) <= 10 * opts.dedup_tol && std::abs(r.y - u.y) <= 10 * opts.dedup_tol &&
          std::abs(r.z - u.z) <= 10 * opts.dedup_tol && std::abs(r.w - u.w) <= 10 * opts.dedup_tol)
        dup = true;
    if (!dup) uniq_sus.push_back(r);
  }
  return {std::move(uniq), std::move(uniq_sus)};
}

}  // namespace defectline
