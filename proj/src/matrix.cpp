#include "defectline/matrix.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "defectline/errors.hpp"
#include "defectline/rng.hpp"
#include "json.hpp"

namespace defectline {

bool ComplexMatrix::finite() const {
  for (const auto& z : a)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return true;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : a) m = std::max(m, std::abs(z));
  return m;
}

cplx ComplexMatrix::trace() const {
  cplx t(0, 0);
  for (int i = 0; i < n; ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  ComplexMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.n);
  for (std::size_t i = 0; i < a.a.size(); ++i) r.a[i] = a.a[i] + b.a[i];
  return r;
}

ComplexMatrix operator*(const cplx& s, const ComplexMatrix& m) {
  ComplexMatrix r(m.n);
  for (std::size_t i = 0; i < m.a.size(); ++i) r.a[i] = s * m.a[i];
  return r;
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix r(a.n);
  for (int i = 0; i < a.n; ++i)
    for (int k = 0; k < a.n; ++k) {
      const cplx aik = a(i, k);
      for (int j = 0; j < a.n; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

ComplexMatrix sample_ginibre(int n, double sigma, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_ginibre: n must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sample_ginibre: sigma must be > 0");
  Xoshiro256pp rng(seed);
  ComplexMatrix m(n);
  for (auto& z : m.a) {
    const auto [re, im] = rng.normal_pair();
    z = cplx(sigma * re, sigma * im);
  }
  return m;
}

ComplexMatrix ginibre_standard(int n, std::uint64_t seed) {
  return sample_ginibre(n, 1.0 / std::sqrt(2.0 * n), seed);
}

ComplexMatrix deformation_matrix(int n, cplx s) {
  if (n < 1) throw std::invalid_argument("deformation_matrix: n must be >= 1");
  ComplexMatrix m(n);
  if (n % 2 == 0) {
    for (int i = 0; i < n / 2; ++i) m(i, i) = s;
    for (int i = n / 2; i < n; ++i) m(i, i) = -s;
  } else {
    m(0, 0) = s;
    m(n - 1, n - 1) = -s;
  }
  return m;
}

ComplexMatrix evolve(const EvolutionLaw& law, double t) {
  if (!std::isfinite(t)) throw std::invalid_argument("evolve: t must be finite");
  return law.m0 + cplx(t, 0) * deformation_matrix(law.m0.n, law.s);
}

static Eigen::MatrixXcd to_eigen(const ComplexMatrix& m) {
  Eigen::MatrixXcd e(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) e(i, j) = m(i, j);
  return e;
}

static ComplexMatrix from_eigen(const Eigen::MatrixXcd& e) {
  ComplexMatrix m(static_cast<int>(e.rows()));
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) m(i, j) = e(i, j);
  return m;
}

std::vector<cplx> eigenvalues(const ComplexMatrix& m) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(to_eigen(m), /*computeEigenvectors=*/false);
  std::vector<cplx> out(m.n);
  for (int i = 0; i < m.n; ++i) out[i] = solver.eigenvalues()(i);
  return out;
}

ComplexMatrix reconstruct_matrix(const std::vector<cplx>& zeros, const ComplexMatrix& conj,
                                 double cond_cap) {
  if (conj.n != static_cast<int>(zeros.size()))
    throw std::invalid_argument("reconstruct_matrix: conj.n must equal zeros.size()");
  const Eigen::MatrixXcd q = to_eigen(conj);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(q);
  if (!lu.isInvertible()) throw IllConditionedError("reconstruct_matrix: conj is singular");
  const Eigen::MatrixXcd qinv = lu.inverse();
  const double cond = q.cwiseAbs().colwise().sum().maxCoeff() *
                      qinv.cwiseAbs().colwise().sum().maxCoeff();
  if (cond > cond_cap)
    throw IllConditionedError("reconstruct_matrix: condition number " + std::to_string(cond) +
                              " exceeds cap " + std::to_string(cond_cap));
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(conj.n, conj.n);
  for (int i = 0; i < conj.n; ++i) d(i, i) = zeros[i];
  return from_eigen(q * d * qinv);
}

ComplexMatrix evolve_2x2_cycle(const ComplexMatrix& m0, cplx k1, cplx k2, double delta_t) {
  if (m0.n != 2) throw std::invalid_argument("evolve_2x2_cycle: m0 must be 2x2");
  const cplx a0 = m0(0, 0), b0 = m0(0, 1), c0 = m0(1, 0), d0 = m0(1, 1);
  const double scale = std::max(1.0, m0.max_abs());

  // Entries as a function of the gauge constant g.
  auto entries = [&](cplx g, cplx& a1, cplx& b1, cplx& c1, cplx& d1) -> bool {
    d1 = d0 + g * delta_t;
    c1 = c0 + g * delta_t;
    a1 = k1 - d1;
    if (std::abs(c1) < 1e-14 * scale) return false;
    b1 = (a1 * d1 - k2) / c1;
    return true;
  };
  auto objective = [&](cplx g) {
    cplx a1, b1, c1, d1;
    if (!entries(g, a1, b1, c1, d1)) return 1e300;
    const double p = std::norm(a1 - a0) + std::norm(b1 - b0) + 2.0 * std::norm(g * delta_t);
    return p;
  };

  // Gauss-Newton over the complex gauge constant, started at g = 0.
  cplx g(0, 0);
  double f = objective(g);
  const double h = 1e-7 * std::max(1.0, std::abs(delta_t) > 0 ? 1.0 / std::abs(delta_t) : 1.0);
  for (int it = 0; it < 60; ++it) {
    const double fr1 = objective(g + cplx(h, 0));
    const double fr0 = objective(g - cplx(h, 0));
    const double fi1 = objective(g + cplx(0, h));
    const double fi0 = objective(g - cplx(0, h));
    const double gx = (fr1 - fr0) / (2 * h);
    const double gy = (fi1 - fi0) / (2 * h);
    const double hxx = (fr1 - 2 * f + fr0) / (h * h);
    const double hyy = (fi1 - 2 * f + fi0) / (h * h);
    double sx, sy;
    if (hxx > 0 && hyy > 0) {
      sx = -gx / hxx;
      sy = -gy / hyy;
    } else {
      const double gn = std::hypot(gx, gy) + 1e-300;
      sx = -gx / gn * 0.1 * scale;
      sy = -gy / gn * 0.1 * scale;
    }
    double step = 1.0;
    cplx gn = g;
    double fn = f;
    for (int b = 0; b < 30; ++b) {
      const cplx cand = g + step * cplx(sx, sy);
      const double fc = objective(cand);
      if (fc < f) {
        gn = cand;
        fn = fc;
        break;
      }
      step *= 0.5;
    }
    if (fn >= f - 1e-30 * (1.0 + f)) break;
    g = gn;
    f = fn;
  }

  cplx a1, b1, c1, d1;
  if (!entries(g, a1, b1, c1, d1))
    throw StepTooLargeError("evolve_2x2_cycle: c1 vanishes, no O(dt)-close matrix");
  ComplexMatrix m1(2);
  m1(0, 0) = a1;
  m1(0, 1) = b1;
  m1(1, 0) = c1;
  m1(1, 1) = d1;
  const double drift = std::max({std::abs(a1 - a0), std::abs(b1 - b0), std::abs(c1 - c0),
                                 std::abs(d1 - d0)});
  if (drift > 100.0 * std::abs(delta_t) * (1.0 + scale) + 1e-12 * scale)
    throw StepTooLargeError("evolve_2x2_cycle: nearest solution drifts " + std::to_string(drift) +
                            ", not O(dt)");
  return m1;
}

cplx det_lu(const ComplexMatrix& m) {
  const int n = m.n;
  std::vector<cplx> a = m.a;
  cplx det(1, 0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    double best = std::abs(a[static_cast<std::size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      const double v = std::abs(a[static_cast<std::size_t>(r) * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return cplx(0, 0);
    if (piv != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<std::size_t>(piv) * n + j], a[static_cast<std::size_t>(col) * n + j]);
      det = -det;
    }
    const cplx pivot = a[static_cast<std::size_t>(col) * n + col];
    det *= pivot;
    for (int r = col + 1; r < n; ++r) {
      const cplx f = a[static_cast<std::size_t>(r) * n + col] / pivot;
      if (f == cplx(0, 0)) continue;
      for (int j = col + 1; j < n; ++j)
        a[static_cast<std::size_t>(r) * n + j] -= f * a[static_cast<std::size_t>(col) * n + j];
    }
  }
  return det;
}

std::string matrix_to_json(const ComplexMatrix& m) {
  nlohmann::ordered_json j;
  j["n"] = m.n;
  std::vector<double> re, im;
  re.reserve(m.a.size());
  im.reserve(m.a.size());
  for (const auto& z : m.a) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  j["re"] = re;
  j["im"] = im;
  return j.dump();
}

ComplexMatrix matrix_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const int n = j.at("n").get<int>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (static_cast<int>(re.size()) != n * n || static_cast<int>(im.size()) != n * n)
    throw std::invalid_argument("matrix_from_json: entry count does not match n^2");
  ComplexMatrix m(n);
  for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] = cplx(re[i], im[i]);
  return m;
}

}  // namespace defectline
