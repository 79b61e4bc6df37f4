#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace defectline {

using cplx = std::complex<double>;

/// Quaternion q = q0 + q1 i + q2 j + q3 k with i^2 = j^2 = k^2 = ijk = -1.
struct Quaternion {
  double q0 = 0.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;

  bool finite() const {
    return std::isfinite(q0) && std::isfinite(q1) && std::isfinite(q2) && std::isfinite(q3);
  }
};

/// Hamilton product. Equals the product of the 2x2 complex representations.
inline Quaternion quat_mul(const Quaternion& a, const Quaternion& b) {
  return {a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
          a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
          a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
          a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0};
}

inline Quaternion quat_add(const Quaternion& a, const Quaternion& b) {
  return {a.q0 + b.q0, a.q1 + b.q1, a.q2 + b.q2, a.q3 + b.q3};
}

/// 2x2 complex representation [[alpha, beta], [-conj(beta), conj(alpha)]]
/// with alpha = q0 + i q1, beta = q2 + i q3. Row-major entries.
inline std::array<cplx, 4> quat_rep(const Quaternion& q) {
  const cplx alpha(q.q0, q.q1);
  const cplx beta(q.q2, q.q3);
  return {alpha, beta, -std::conj(beta), std::conj(alpha)};
}

}  // namespace defectline
