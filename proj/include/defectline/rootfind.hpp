#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "defectline/matrix.hpp"
#include "defectline/wavefield.hpp"

namespace defectline {

struct SearchWindow {
  double x_min = -1, x_max = 1, y_min = -1, y_max = 1;
  int grid_density = 32;  // seeds per axis

  void validate() const;
  bool contains(double x, double y, double margin = 0.0) const {
    return x >= x_min - margin && x <= x_max + margin && y >= y_min - margin && y <= y_max + margin;
  }
  double span() const { return std::max(x_max - x_min, y_max - y_min); }
};

struct RootfindOptions {
  double zero_tol = 1e-9;   // length-scale residual bound
  double dedup_tol = 1e-6;  // max-norm merge distance
  int max_iter = 60;
  double cond_limit = 1e10;  // Newton Jacobian condition flagging suspects
};

struct PlaneZero {
  double x = 0, y = 0;
  double residual = 0;
};

struct PlaneResult {
  std::vector<PlaneZero> roots;
  std::vector<PlaneZero> suspects;       // unconverged near-degenerate points
  std::vector<std::string> warnings;     // e.g. degenerate nodal segment
};

/// All real-plane zeros of the field in the window. Newton from grid seeds
/// on (Re psi, Im psi) = 0 with analytic Jacobians; for the n = 2, xi = 1
/// determinantal field the closed-form line-circle intersection is used
/// instead. extra_seeds are tried in addition to the grid (tracker warm
/// starts).
PlaneResult find_plane_zeros(const FieldSlice& slice, const SearchWindow& window,
                             const RootfindOptions& opts = {},
                             const std::vector<std::array<double, 2>>& extra_seeds = {});
PlaneResult find_plane_zeros(const FieldView& field, double t, const SearchWindow& window,
                             const RootfindOptions& opts = {});

/// Zeros of Im(psi^* grad psi) that are not nodal points: the phase
/// critical points (saddles and extrema).
PlaneResult find_phase_critical_points(const FieldSlice& slice, const SearchWindow& window,
                                       const RootfindOptions& opts = {},
                                       const std::vector<std::array<double, 2>>& extra_seeds = {});
PlaneResult find_phase_critical_points(const FieldView& field, double t,
                                       const SearchWindow& window,
                                       const RootfindOptions& opts = {});

/// Closed-form intersection of the xi = 1 conic/line pair. Returns the real
/// intersection points (0, 1 or 2) and the composite discriminant; the
/// degenerate all-zero line is reported separately, never guessed at.
struct LineCircleSolution {
  int count = 0;
  std::array<std::array<double, 2>, 2> pts{};
  double discriminant = 0;
  bool degenerate_line = false;   // line identically ~0 and the circle is real:
                                  // a full nodal circle (domain wall)
  bool inconsistent_line = false; // no zeros: line a nonzero constant, or line
                                  // vanishing with an imaginary-radius circle
};
LineCircleSolution solve_line_circle(const Coeffs2x2& c);

struct Box4 {
  std::array<double, 4> lo{-3, -3, -3, -3};
  std::array<double, 4> hi{3, 3, 3, 3};
  int grid_density = 12;
};

/// Default 4D window [-L, L]^4 with L = 3 sigma sqrt(N) + |s t| + 1.
Box4 default_box4(double sigma, int n, cplx s, double t);

struct QuaternionRoot {
  double x = 0, y = 0, z = 0, w = 0;
  double residual = 0;
  bool planar = false;  // |z|, |w| below zero_tol: a plane zero
};

struct QuaternionResult {
  std::vector<QuaternionRoot> roots;
  std::vector<QuaternionRoot> suspects;
};

/// All roots of the quaternionic determinant quartet for a 2x2 complex
/// matrix (entries with vanishing j, k parts). Newton in R^4 from a seed
/// grid plus optional anchors; off-plane roots arrive in (z, w) <-> (-z, -w)
/// pairs.
QuaternionResult find_quaternion_roots(const ComplexMatrix& m, const Box4& window4,
                                       const RootfindOptions& opts = {},
                                       const std::vector<std::array<double, 4>>& extra_seeds = {});

/// The four components (r, i, j, k) of the 2x2 quaternionic determinant and
/// their Jacobian. Exposed for tests and for the Newton solver.
std::array<double, 4> quartet_value(const ComplexMatrix& m, const std::array<double, 4>& p);
std::array<std::array<double, 4>, 4> quartet_jacobian(const ComplexMatrix& m,
                                                      const std::array<double, 4>& p);

}  // namespace defectline
