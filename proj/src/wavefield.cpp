#include "defectline/wavefield.hpp"

#include <cmath>
#include <stdexcept>

namespace defectline {

double phase_of(cplx z) {
  double p = std::atan2(z.imag(), z.real());
  if (p <= -3.14159265358979323846) p = 3.14159265358979323846;
  return p;
}

cplx BivarPoly::eval(cplx lambda, cplx mu) const {
  // Horner in lambda of Horner-in-mu rows.
  cplx acc(0, 0);
  for (int a = deg_l; a >= 0; --a) {
    cplx row(0, 0);
    for (int b = deg_m; b >= 0; --b) row = row * mu + coef(a, b);
    acc = acc * lambda + row;
  }
  return acc;
}

void BivarPoly::eval1(cplx lambda, cplx mu, cplx& p, cplx& pl, cplx& pm) const {
  p = pl = pm = cplx(0, 0);
  for (int a = deg_l; a >= 0; --a) {
    cplx row(0, 0), rowm(0, 0);
    for (int b = deg_m; b >= 0; --b) {
      if (b >= 1) rowm = rowm * mu + cplx(b, 0) * coef(a, b);
      row = row * mu + coef(a, b);
    }
    if (a >= 1) pl = pl * lambda + cplx(a, 0) * row;
    pm = pm * lambda + rowm;
    p = p * lambda + row;
  }
}

void BivarPoly::eval2(cplx lambda, cplx mu, cplx& p, cplx& pl, cplx& pm, cplx& pll, cplx& plm,
                      cplx& pmm) const {
  eval1(lambda, mu, p, pl, pm);
  pll = cplx(0, 0);
  for (int a = deg_l; a >= 2; --a) {
    cplx row(0, 0);
    for (int b = deg_m; b >= 0; --b) row = row * mu + coef(a, b);
    pll = pll * lambda + cplx(a * (a - 1), 0) * row;
  }
  plm = cplx(0, 0);
  for (int a = deg_l; a >= 1; --a) {
    cplx row(0, 0);
    for (int b = deg_m; b >= 1; --b) row = row * mu + cplx(b, 0) * coef(a, b);
    plm = plm * lambda + cplx(a, 0) * row;
  }
  pmm = cplx(0, 0);
  for (int a = deg_l; a >= 0; --a) {
    cplx row(0, 0);
    for (int b = deg_m; b >= 2; --b) row = row * mu + cplx(b * (b - 1), 0) * coef(a, b);
    pmm = pmm * lambda + row;
  }
}

std::array<double, 2> FieldSlice::grad_num(double x, double y) const {
  const Derivs2 d = derivs(x, y, 1);
  const cplx pc = std::conj(d.psi);
  return {std::imag(pc * d.px), std::imag(pc * d.py)};
}

double FieldSlice::len_residual(double x, double y) const {
  const Derivs2 d = derivs(x, y, 1);
  return std::abs(d.psi) / (1.0 + std::hypot(std::abs(d.px), std::abs(d.py)));
}

// ---------------------------------------------------------------------------
// Determinantal field
// ---------------------------------------------------------------------------

WaveField::WaveField(EvolutionLaw law, int xi) : law_(std::move(law)), xi_(xi) {
  if (xi_ < 0 || xi_ > law_.m0.n)
    throw std::invalid_argument("WaveField: xi must lie in [0, N]");
}

std::unique_ptr<FieldSlice> WaveField::slice(double t) const {
  return std::make_unique<WaveFieldSlice>(matrix_at(t), xi_, t);
}

namespace {

// det of m with the rows/cols listed in "skip" removed (skip sorted, <= 2).
cplx det_minor(const ComplexMatrix& m, int skip1, int skip2) {
  const int n = m.n;
  ComplexMatrix sub(n - (skip2 >= 0 ? 2 : 1));
  int si = 0;
  for (int i = 0; i < n; ++i) {
    if (i == skip1 || i == skip2) continue;
    int sj = 0;
    for (int j = 0; j < n; ++j) {
      if (j == skip1 || j == skip2) continue;
      sub(si, sj) = m(i, j);
      ++sj;
    }
    ++si;
  }
  if (sub.n == 0) return cplx(1, 0);
  return det_lu(sub);
}

// Exact bivariate coefficients by inverse DFT on scaled roots of unity.
BivarPoly interpolate_poly(const ComplexMatrix& m, int xi) {
  const int n = m.n;
  const int dl = xi, dm = n - xi;
  const double radius = std::max(1.0, 1.5 * m.max_abs());
  const int nl = dl + 1, nm = dm + 1;
  const double twopi = 6.283185307179586476925286766559;

  std::vector<cplx> nodes_l(nl), nodes_m(nm);
  for (int a = 0; a < nl; ++a)
    nodes_l[a] = radius * std::polar(1.0, twopi * a / nl);
  for (int b = 0; b < nm; ++b)
    nodes_m[b] = radius * std::polar(1.0, twopi * b / nm);

  std::vector<cplx> vals(static_cast<std::size_t>(nl) * nm);
  ComplexMatrix work = m;
  for (int a = 0; a < nl; ++a)
    for (int b = 0; b < nm; ++b) {
      for (int k = 0; k < n; ++k)
        work(k, k) = m(k, k) - (k < xi ? nodes_l[a] : nodes_m[b]);
      vals[static_cast<std::size_t>(a) * nm + b] = det_lu(work);
    }

  BivarPoly p;
  p.deg_l = dl;
  p.deg_m = dm;
  p.c.assign(static_cast<std::size_t>(nl) * nm, cplx(0, 0));
  for (int j = 0; j < nl; ++j)
    for (int k = 0; k < nm; ++k) {
      cplx acc(0, 0);
      for (int a = 0; a < nl; ++a) {
        const cplx wl = std::polar(1.0, -twopi * a * j / nl);
        cplx inner(0, 0);
        for (int b = 0; b < nm; ++b)
          inner += vals[static_cast<std::size_t>(a) * nm + b] *
                   std::polar(1.0, -twopi * b * k / nm);
        acc += wl * inner;
      }
      acc /= static_cast<double>(nl) * nm * std::pow(radius, j + k);
      p.c[static_cast<std::size_t>(j) * nm + k] = acc;
    }
  return p;
}

}  // namespace

WaveFieldSlice::WaveFieldSlice(ComplexMatrix m, int xi, double t)
    : m_(std::move(m)), xi_(xi), t_(t), poly_(interpolate_poly(m_, xi_)) {}

cplx WaveFieldSlice::psi(double x, double y) const {
  const cplx lambda(x, y), mu(x, -y);
  ComplexMatrix a = m_;
  for (int k = 0; k < m_.n; ++k) a(k, k) = m_(k, k) - (k < xi_ ? lambda : mu);
  return det_lu(a);
}

Derivs2 WaveFieldSlice::derivs(double x, double y, int order) const {
  const int n = m_.n;
  const cplx lambda(x, y), mu(x, -y);
  ComplexMatrix a = m_;
  for (int k = 0; k < n; ++k) a(k, k) = m_(k, k) - (k < xi_ ? lambda : mu);

  Derivs2 d;
  d.psi = det_lu(a);
  if (order < 1) return d;

  // Slot coefficients: d(lambda)/dy = i on the first xi slots, d(mu)/dy = -i
  // on the rest; both derivatives are 1 along x.
  std::vector<cplx> minors(n);
  for (int k = 0; k < n; ++k) minors[k] = det_minor(a, k, -1);
  cplx sx(0, 0), sy(0, 0);
  for (int k = 0; k < n; ++k) {
    sx += minors[k];
    sy += (k < xi_ ? cplx(0, 1) : cplx(0, -1)) * minors[k];
  }
  d.px = -sx;
  d.py = -sy;
  if (order < 2) return d;

  cplx xx(0, 0), xy(0, 0), yy(0, 0);
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const cplx mkl = det_minor(a, k, l);
      const cplx bk = (k < xi_ ? cplx(0, 1) : cplx(0, -1));
      const cplx bl = (l < xi_ ? cplx(0, 1) : cplx(0, -1));
      xx += 2.0 * mkl;
      xy += (bk + bl) * mkl;
      yy += 2.0 * bk * bl * mkl;
    }
  d.pxx = xx;
  d.pxy = xy;
  d.pyy = yy;
  return d;
}

Derivs2 WaveFieldSlice::derivs_poly(double x, double y, int order) const {
  const cplx lambda(x, y), mu(x, -y);
  Derivs2 d;
  if (order <= 0) {
    d.psi = poly_.eval(lambda, mu);
    return d;
  }
  cplx p, pl, pm, pll, plm, pmm;
  if (order == 1) {
    poly_.eval1(lambda, mu, p, pl, pm);
    d.psi = p;
    d.px = pl + pm;
    d.py = cplx(0, 1) * (pl - pm);
    return d;
  }
  poly_.eval2(lambda, mu, p, pl, pm, pll, plm, pmm);
  d.psi = p;
  d.px = pl + pm;
  d.py = cplx(0, 1) * (pl - pm);
  d.pxx = pll + 2.0 * plm + pmm;
  d.pxy = cplx(0, 1) * (pll - pmm);
  d.pyy = -(pll - 2.0 * plm + pmm);
  return d;
}

// ---------------------------------------------------------------------------
// 2x2 closed form
// ---------------------------------------------------------------------------

Coeffs2x2 coeffs_2x2_of_matrix(const ComplexMatrix& m) {
  if (m.n != 2) throw std::invalid_argument("coeffs_2x2: matrix must be 2x2");
  const cplx a = m(0, 0), b = m(0, 1), c = m(1, 0), d = m(1, 1);
  const double ar = a.real(), ai = a.imag();
  const double br = b.real(), bi = b.imag();
  const double cr = c.real(), ci = c.imag();
  const double dr = d.real(), di = d.imag();
  Coeffs2x2 out;
  out.quadratic = {1.0, 0.0, 1.0, -(ar + dr), di - ai,
                   ar * dr - ai * di + bi * ci - br * cr};
  out.linear = {ar - dr, -(ai + di), ar * di + ai * dr - br * ci - bi * cr};
  return out;
}

Coeffs2x2 coeffs_2x2(const WaveField& field, double t) {
  if (field.dim() != 2 || field.xi() != 1)
    throw std::invalid_argument("coeffs_2x2: field must have n = 2, xi = 1");
  return coeffs_2x2_of_matrix(field.matrix_at(t));
}

// ---------------------------------------------------------------------------
// Built-ins
// ---------------------------------------------------------------------------

namespace {

class BubbleSlice : public FieldSlice {
 public:
  BubbleSlice(double T, double t) : t_(t) {
    const double u = T * T - t * t;
    x0_ = u >= 0 ? cplx(std::sqrt(u), 0) : cplx(0, std::sqrt(-u));
  }

  cplx psi(double x, double y) const override {
    const cplx f1 = cplx(x, y) - x0_;
    const cplx f2 = cplx(x, -y) - x0_;
    const cplx f3 = cplx(1, 0) - cplx(0, 1) * (x + y);
    return f1 * f2 * f3;
  }

  Derivs2 derivs(double x, double y, int order) const override {
    const cplx f1 = cplx(x, y) - x0_;
    const cplx f2 = cplx(x, -y) - x0_;
    const cplx f3 = cplx(1, 0) - cplx(0, 1) * (x + y);
    const cplx i(0, 1);
    const cplx f1x = 1, f1y = i, f2x = 1, f2y = -i, f3x = -i, f3y = -i;
    Derivs2 d;
    d.psi = f1 * f2 * f3;
    if (order < 1) return d;
    d.px = f1x * f2 * f3 + f1 * f2x * f3 + f1 * f2 * f3x;
    d.py = f1y * f2 * f3 + f1 * f2y * f3 + f1 * f2 * f3y;
    if (order < 2) return d;
    // Factors are affine, so second partials of each factor vanish.
    d.pxx = 2.0 * (f1x * f2x * f3 + f1x * f2 * f3x + f1 * f2x * f3x);
    d.pyy = 2.0 * (f1y * f2y * f3 + f1y * f2 * f3y + f1 * f2y * f3y);
    d.pxy = f1x * f2y * f3 + f1y * f2x * f3 + f1x * f2 * f3y + f1y * f2 * f3x +
            f1 * f2x * f3y + f1 * f2y * f3x;
    return d;
  }

  double t() const override { return t_; }

 private:
  double t_;
  cplx x0_;
};

class PhaseSurfaceSlice : public FieldSlice {
 public:
  PhaseSurfaceSlice(double eps, double t) : eps_(eps), t_(t) {}

  cplx psi(double x, double y) const override { return std::polar(1.0, phi(x, y)); }

  Derivs2 derivs(double x, double y, int order) const override {
    const cplx i(0, 1);
    const cplx p = std::polar(1.0, phi(x, y));
    const double fx = eps_ - 3 * x * x, fy = -2 * y;
    Derivs2 d;
    d.psi = p;
    if (order < 1) return d;
    d.px = i * fx * p;
    d.py = i * fy * p;
    if (order < 2) return d;
    d.pxx = (i * (-6 * x) - fx * fx) * p;
    d.pyy = (i * (-2.0) - fy * fy) * p;
    d.pxy = (-fx * fy) * p;
    return d;
  }

  double t() const override { return t_; }

 private:
  double phi(double x, double y) const { return eps_ * x - y * y - x * x * x; }
  double eps_, t_;
};

class LineEllipseSlice : public FieldSlice {
 public:
  LineEllipseSlice(double eps, double t) : eps_(eps), t_(t) {}

  cplx psi(double x, double y) const override {
    return cplx(y - eps_, x * x + (y - 1) * (y - 1) - 1);
  }

  Derivs2 derivs(double x, double y, int order) const override {
    Derivs2 d;
    d.psi = psi(x, y);
    if (order < 1) return d;
    d.px = cplx(0, 2 * x);
    d.py = cplx(1, 2 * (y - 1));
    if (order < 2) return d;
    d.pxx = cplx(0, 2);
    d.pyy = cplx(0, 2);
    d.pxy = cplx(0, 0);
    return d;
  }

  double t() const override { return t_; }

 private:
  double eps_, t_;
};

}  // namespace

BubbleField::BubbleField(double T) : T_(T) {
  if (!(T > 0)) throw std::invalid_argument("BubbleField: T must be > 0");
}

std::unique_ptr<FieldSlice> BubbleField::slice(double t) const {
  return std::make_unique<BubbleSlice>(T_, t);
}

std::vector<Defect> BubbleField::analytic_defects(double t) const {
  if (std::abs(t) > T_) return {};
  const double x0 = std::sqrt(T_ * T_ - t * t);
  // Root-by-factor: the vortex factor (x+iy-X0) and the anti-vortex factor
  // (x-iy-X0) both vanish at (X0, 0); the saddle pair of the s+v+v*+s
  // complex rides the same point.
  return {make_defect(x0, 0.0, t, Species::Vortex),
          make_defect(x0, 0.0, t, Species::AntiVortex),
          make_defect(x0, 0.0, t, Species::Saddle),
          make_defect(x0, 0.0, t, Species::Saddle)};
}

PhaseSurfaceField::PhaseSurfaceField(double eps0) : eps0_(eps0) {}

std::unique_ptr<FieldSlice> PhaseSurfaceField::slice(double t) const {
  return std::make_unique<PhaseSurfaceSlice>(eps_at(t), t);
}

LineEllipseField::LineEllipseField(double eps0) : eps0_(eps0) {}

std::unique_ptr<FieldSlice> LineEllipseField::slice(double t) const {
  return std::make_unique<LineEllipseSlice>(eps_at(t), t);
}

}  // namespace defectline
