#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "defectline/quaternion.hpp"

namespace defectline {

/// Dense N x N complex matrix, row-major. Carrier of M0, S, M(t), Q, D.
struct ComplexMatrix {
  int n = 0;
  std::vector<cplx> a;  // a.size() == n*n

  ComplexMatrix() = default;
  explicit ComplexMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim, cplx(0, 0)) {}

  cplx& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const cplx& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }

  bool finite() const;
  double max_abs() const;
  cplx trace() const;

  static ComplexMatrix identity(int dim);
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const cplx& s, const ComplexMatrix& m);
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);

/// Entries iid complex Gaussian: re and im ~ Normal(0, sigma^2). Identical
/// (n, sigma, seed) gives a bit-identical matrix; unit normals are drawn
/// first and then scaled, so sigma rescales a fixed-seed sample exactly.
ComplexMatrix sample_ginibre(int n, double sigma, std::uint64_t seed);

/// sample_ginibre with sigma = 1/sqrt(2N), the standard normalization.
ComplexMatrix ginibre_standard(int n, std::uint64_t seed);

/// Deformation matrix S: diag(s x n/2, -s x n/2) for even n; for odd n the
/// first entry is s, the last is -s and the middle entries vanish.
ComplexMatrix deformation_matrix(int n, cplx s);

/// The deformation evolution law M(t) = M0 + t S(s).
struct EvolutionLaw {
  ComplexMatrix m0;
  cplx s{1.0, 0.0};
};

ComplexMatrix evolve(const EvolutionLaw& law, double t);

/// Eigenvalues via a dense complex solver (unsorted).
std::vector<cplx> eigenvalues(const ComplexMatrix& m);

/// Q diag(zeros) Q^{-1}. Throws IllConditionedError when conj is singular or
/// cond_1(conj) exceeds cond_cap.
ComplexMatrix reconstruct_matrix(const std::vector<cplx>& zeros, const ComplexMatrix& conj,
                                 double cond_cap = 1e8);

/// One step of the evolution-correspondence cycle for a 2x2 matrix: returns
/// M1 with trace k1 and determinant k2, each entry O(delta_t)-close to m0.
/// The gauge freedom d1 = d0 + g*dt, c1 = c0 + g*dt is fixed by choosing g
/// as the minimal-norm perturbation (Gauss-Newton from g = 0).
ComplexMatrix evolve_2x2_cycle(const ComplexMatrix& m0, cplx k1, cplx k2, double delta_t);

/// Determinant by LU with partial pivoting.
cplx det_lu(const ComplexMatrix& m);

/// JSON serialization: {"n": int, "re": [row-major], "im": [row-major]}.
std::string matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const std::string& text);

}  // namespace defectline
