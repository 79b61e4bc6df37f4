#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "defectline/defect.hpp"
#include "defectline/matrix.hpp"

namespace defectline {

/// Value and partials of the field at a point; order-2 entries are only
/// filled when requested.
struct Derivs2 {
  cplx psi{0, 0};
  cplx px{0, 0}, py{0, 0};
  cplx pxx{0, 0}, pxy{0, 0}, pyy{0, 0};
};

/// Bivariate polynomial sum c[a][b] lambda^a mu^b where mu plays the role of
/// lambda^*. Coefficients are exact (DFT interpolation on scaled roots of
/// unity), which makes Newton iterations cheap for any N.
struct BivarPoly {
  int deg_l = 0, deg_m = 0;
  std::vector<cplx> c;  // (deg_l+1) x (deg_m+1), row-major in lambda degree

  cplx coef(int a, int b) const { return c[static_cast<std::size_t>(a) * (deg_m + 1) + b]; }
  cplx eval(cplx lambda, cplx mu) const;
  /// psi, d/dlambda, d/dmu in one pass.
  void eval1(cplx lambda, cplx mu, cplx& p, cplx& pl, cplx& pm) const;
  void eval2(cplx lambda, cplx mu, cplx& p, cplx& pl, cplx& pm, cplx& pll, cplx& plm,
             cplx& pmm) const;
};

/// A field frozen at one time. Immutable, safe for concurrent use.
class FieldSlice {
 public:
  virtual ~FieldSlice() = default;
  virtual cplx psi(double x, double y) const = 0;
  virtual Derivs2 derivs(double x, double y, int order) const = 0;
  virtual double t() const = 0;

  /// Derivative route used inside Newton loops. Defaults to derivs(); the
  /// determinantal slice overrides it with the coefficient form, which is
  /// algebraically identical but O(N^2) instead of O(N^4) per point.
  virtual Derivs2 newton_derivs(double x, double y, int order) const {
    return derivs(x, y, order);
  }

  /// Im(psi^* grad psi) = |psi|^2 grad Phi.
  std::array<double, 2> grad_num(double x, double y) const;
  /// Newton length-scale residual |psi| / (1 + |grad psi|): an estimate of
  /// the distance to the nearest zero.
  double len_residual(double x, double y) const;
};

/// Common surface for the determinantal fields and analytic built-ins.
class FieldView {
 public:
  virtual ~FieldView() = default;
  virtual std::unique_ptr<FieldSlice> slice(double t) const = 0;
  virtual int dim() const { return 0; }

  /// Built-ins with closed-form defect content enumerate it here; the
  /// matrix fields return nothing and are handled by rootfind.
  virtual bool has_analytic_defects() const { return false; }
  virtual std::vector<Defect> analytic_defects(double /*t*/) const { return {}; }
};

/// Determinantal wave function Psi_{N, 2 xi - N}(x, y; t) = det(M(t) - L_xi),
/// with L_xi = diag(lambda x xi, lambda^* x (N - xi)).
class WaveField : public FieldView {
 public:
  WaveField(EvolutionLaw law, int xi);

  int dim() const override { return law_.m0.n; }
  int xi() const { return xi_; }
  /// Winding label w = 2 xi - N.
  int winding_label() const { return 2 * xi_ - law_.m0.n; }
  const EvolutionLaw& law() const { return law_; }
  ComplexMatrix matrix_at(double t) const { return evolve(law_, t); }

  std::unique_ptr<FieldSlice> slice(double t) const override;

 private:
  EvolutionLaw law_;
  int xi_;
};

class WaveFieldSlice : public FieldSlice {
 public:
  WaveFieldSlice(ComplexMatrix m, int xi, double t);

  /// det(M - L_xi) by LU factorization with partial pivoting.
  cplx psi(double x, double y) const override;
  /// Partials by Jacobi's formula applied to the lambda and lambda^* slots
  /// (principal minors; second order from pair minors).
  Derivs2 derivs(double x, double y, int order) const override;
  double t() const override { return t_; }

  /// Same derivatives through the interpolated coefficient form. Used as the
  /// fast path inside Newton; cross-checked against the minor route.
  Derivs2 derivs_poly(double x, double y, int order) const;
  Derivs2 newton_derivs(double x, double y, int order) const override {
    return derivs_poly(x, y, order);
  }
  const BivarPoly& poly() const { return poly_; }
  const ComplexMatrix& matrix() const { return m_; }
  int xi() const { return xi_; }

 private:
  ComplexMatrix m_;
  int xi_;
  double t_;
  BivarPoly poly_;
};

/// Real coefficient form of the n = 2, xi = 1 field: the quadratic
/// (x^2, xy, y^2, x, y, 1) and linear (y, x, 1) equations whose simultaneous
/// zeros are the plane zeros. quadratic + i * linear == psi identically.
struct Coeffs2x2 {
  std::array<double, 6> quadratic;  // x^2, xy, y^2, x, y, const
  std::array<double, 3> linear;     // y, x, const
};

Coeffs2x2 coeffs_2x2(const WaveField& field, double t);
Coeffs2x2 coeffs_2x2_of_matrix(const ComplexMatrix& m);

/// Vacuum-bubble wave function (x+iy-X0)(x-iy-X0)(1-i(x+y)) with
/// X0 = sqrt(T^2 - t^2) for |t| <= T, continued as i sqrt(t^2 - T^2) outside.
/// Its defect content is enumerated in closed form (root-by-factor): the
/// coincident v, v*, s, s complex at (X0, 0) while |t| <= T, nothing outside.
class BubbleField : public FieldView {
 public:
  explicit BubbleField(double T);
  std::unique_ptr<FieldSlice> slice(double t) const override;
  bool has_analytic_defects() const override { return true; }
  std::vector<Defect> analytic_defects(double t) const override;
  double period() const { return T_; }

 private:
  double T_;
};

/// Phase surface Phi = eps(t) x - y^2 - x^3 carried by the unit-modulus field
/// exp(i Phi), with eps(t) = eps0 - t: a saddle and a maximum at
/// (-+ sqrt(eps/3), 0) that collide and annihilate at t = eps0.
class PhaseSurfaceField : public FieldView {
 public:
  explicit PhaseSurfaceField(double eps0);
  std::unique_ptr<FieldSlice> slice(double t) const override;
  double eps_at(double t) const { return eps0_ - t; }

 private:
  double eps0_;
};

/// Line-ellipse family (y - eps) + i (x^2 + (y-1)^2 - 1) with
/// eps(t) = eps0 + t: a maximum-minimum pair for eps < 0 turning into a
/// vortex-anti-vortex pair as eps crosses 0.
class LineEllipseField : public FieldView {
 public:
  explicit LineEllipseField(double eps0);
  std::unique_ptr<FieldSlice> slice(double t) const override;
  double eps_at(double t) const { return eps0_ + t; }

 private:
  double eps0_;
};

/// Phase in (-pi, pi] (atan2 convention of the plots).
double phase_of(cplx z);

}  // namespace defectline
