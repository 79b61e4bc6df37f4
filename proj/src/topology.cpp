#include "defectline/topology.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "defectline/errors.hpp"

namespace defectline {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double wrap_pi(double a) {
  while (a > kPi) a -= kTwoPi;
  while (a <= -kPi) a += kTwoPi;
  return a;
}

// Shared winding machinery: sums wrapped increments of sample_angle around
// the contour and checks the no-zero-in-band precondition on sample_mag.
template <typename AngleMag>
int contour_winding(AngleMag&& f, double cx, double cy, double radius, int samples,
                    const char* what) {
  if (samples < 64) throw std::invalid_argument("winding: samples must be >= 64");
  if (!(radius > 0)) throw std::invalid_argument("winding: radius must be > 0");
  const double band = 0.05;
  double min_mag = 1e300, max_mag = 0.0;
  std::vector<double> angles(static_cast<std::size_t>(samples));
  for (int ring = -1; ring <= 1; ++ring) {
    const double r = radius * (1.0 + band * ring);
    for (int i = 0; i < samples; ++i) {
      const double a = kTwoPi * i / samples;
      double ang, mag;
      f(cx + r * std::cos(a), cy + r * std::sin(a), ang, mag);
      min_mag = std::min(min_mag, mag);
      max_mag = std::max(max_mag, mag);
      if (ring == 0) angles[static_cast<std::size_t>(i)] = ang;
    }
  }
  if (!(max_mag > 0) || min_mag < 1e-12 * max_mag)
    throw ContourUnsafeError(std::string(what) + ": zero within contour band at radius " +
                             std::to_string(radius));
  double total = 0;
  for (int i = 0; i < samples; ++i) {
    const double d = wrap_pi(angles[static_cast<std::size_t>((i + 1) % samples)] -
                             angles[static_cast<std::size_t>(i)]);
    if (std::abs(d) > 0.9 * kPi)
      throw ContourUnsafeError(std::string(what) + ": phase jump too large on contour");
    total += d;
  }
  const double w = total / kTwoPi;
  const int wi = static_cast<int>(std::lround(w));
  if (std::abs(w - wi) > 0.25)
    throw ContourUnsafeError(std::string(what) + ": winding not an integer: " + std::to_string(w));
  return wi;
}

}  // namespace

int winding_number(const FieldSlice& slice, double cx, double cy, double radius, int samples) {
  return contour_winding(
      [&](double x, double y, double& ang, double& mag) {
        const cplx p = slice.psi(x, y);
        ang = std::atan2(p.imag(), p.real());
        mag = std::abs(p);
      },
      cx, cy, radius, samples, "winding_number");
}

int winding_number(const FieldView& field, double cx, double cy, double radius, double t,
                   int samples) {
  return winding_number(*field.slice(t), cx, cy, radius, samples);
}

int index_number(const FieldSlice& slice, double cx, double cy, double radius, int samples) {
  return contour_winding(
      [&](double x, double y, double& ang, double& mag) {
        const auto g = slice.grad_num(x, y);
        ang = std::atan2(g[1], g[0]);
        mag = std::hypot(g[0], g[1]);
      },
      cx, cy, radius, samples, "index_number");
}

int index_number(const FieldView& field, double cx, double cy, double radius, double t,
                 int samples) {
  return index_number(*field.slice(t), cx, cy, radius, samples);
}

namespace {

// 5-point Laplacian of the phase on a locally unwrapped patch.
double phase_laplacian(const FieldSlice& slice, double x, double y, double h) {
  const double pc = phase_of(slice.psi(x, y));
  const double pe = phase_of(slice.psi(x + h, y));
  const double pw = phase_of(slice.psi(x - h, y));
  const double pn = phase_of(slice.psi(x, y + h));
  const double ps = phase_of(slice.psi(x, y - h));
  // Unwrapping relative to the center: each neighbour within pi of it.
  const double s = wrap_pi(pe - pc) + wrap_pi(pw - pc) + wrap_pi(pn - pc) + wrap_pi(ps - pc);
  return s / (h * h);
}

int winding_with_retries(const FieldSlice& slice, double x, double y, double radius, int samples,
                         bool index) {
  const double factors[] = {1.0, 0.71, 1.37, 0.49, 1.93};
  std::string last;
  for (double f : factors) {
    try {
      return index ? index_number(slice, x, y, radius * f, samples)
                   : winding_number(slice, x, y, radius * f, samples);
    } catch (const ContourUnsafeError& e) {
      last = e.what();
    }
  }
  throw ContourUnsafeError(last);
}

}  // namespace

Defect classify(const FieldSlice& slice, double x, double y, PointKind kind, double radius,
                const ClassifyOptions& opts) {
  if (kind == PointKind::Nodal) {
    const Derivs2 d = slice.derivs(x, y, 1);
    // J = d(Re psi, Im psi)/d(x, y) = Im(conj(psi_x) psi_y).
    const double jac = std::imag(std::conj(d.px) * d.py);
    const double scale = std::norm(d.px) + std::norm(d.py);
    if (!(scale > 0) || std::abs(jac) / scale < opts.degenerate_tol)
      throw UnstableDefectError("classify: |J| below degeneracy threshold at (" +
                                std::to_string(x) + ", " + std::to_string(y) + ")");
    const int m = jac > 0 ? 1 : -1;
    const int wind = winding_with_retries(slice, x, y, radius, opts.samples, false);
    if (wind != m)
      throw UnstableDefectError("classify: Jacobian sign and winding disagree (J says " +
                                std::to_string(m) + ", contour says " + std::to_string(wind) + ")");
    return make_defect(x, y, slice.t(), m > 0 ? Species::Vortex : Species::AntiVortex);
  }

  const int idx = winding_with_retries(slice, x, y, radius, opts.samples, true);
  if (idx == -1) return make_defect(x, y, slice.t(), Species::Saddle);
  if (idx != 1)
    throw UnstableDefectError("classify: critical point with index " + std::to_string(idx));
  const double lap = phase_laplacian(slice, x, y, radius * opts.laplacian_step_factor);
  return make_defect(x, y, slice.t(), lap < 0 ? Species::Maximum : Species::Minimum);
}

Defect classify_local(const FieldSlice& slice, double x, double y, PointKind kind, double radius,
                      const ClassifyOptions& opts) {
  if (kind == PointKind::Nodal) {
    const Derivs2 d = slice.derivs(x, y, 1);
    const double jac = std::imag(std::conj(d.px) * d.py);
    const double scale = std::norm(d.px) + std::norm(d.py);
    if (!(scale > 0) || std::abs(jac) / scale < opts.degenerate_tol)
      throw UnstableDefectError("classify_local: |J| below degeneracy threshold");
    return make_defect(x, y, slice.t(), jac > 0 ? Species::Vortex : Species::AntiVortex);
  }
  const Derivs2 d = slice.derivs(x, y, 2);
  const cplx pc = std::conj(d.psi);
  const double j11 = std::imag(pc * d.pxx);
  const double j12 = std::imag(std::conj(d.py) * d.px + pc * d.pxy);
  const double j21 = std::imag(std::conj(d.px) * d.py + pc * d.pxy);
  const double j22 = std::imag(pc * d.pyy);
  const double det = j11 * j22 - j12 * j21;
  const double jn = std::abs(j11) + std::abs(j12) + std::abs(j21) + std::abs(j22);
  if (!(jn > 0) || std::abs(det) / (jn * jn) < opts.degenerate_tol)
    throw UnstableDefectError("classify_local: degenerate critical point");
  if (det < 0) return make_defect(x, y, slice.t(), Species::Saddle);
  const double lap = phase_laplacian(slice, x, y, radius * opts.laplacian_step_factor);
  return make_defect(x, y, slice.t(), lap < 0 ? Species::Maximum : Species::Minimum);
}

ClassifiedSet classify_all(const FieldSlice& slice, const std::vector<PlaneZero>& zeros,
                           const std::vector<PlaneZero>& crits, double radius_cap,
                           const ClassifyOptions& opts, bool contour) {
  std::vector<std::array<double, 3>> pts;  // x, y, kind
  for (const auto& z : zeros) pts.push_back({z.x, z.y, 0});
  for (const auto& c : crits) pts.push_back({c.x, c.y, 1});

  ClassifiedSet out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    double nearest = 1e300;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      nearest = std::min(nearest, std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]));
    }
    const double radius = std::min(radius_cap, nearest * 0.5);
    const double safe_radius = std::max(radius, 1e-7);
    const PointKind kind = pts[i][2] == 0 ? PointKind::Nodal : PointKind::Critical;
    try {
      out.defects.push_back(contour
                                ? classify(slice, pts[i][0], pts[i][1], kind, safe_radius, opts)
                                : classify_local(slice, pts[i][0], pts[i][1], kind, safe_radius,
                                                 opts));
    } catch (const UnstableDefectError&) {
      Defect d;
      d.x = pts[i][0];
      d.y = pts[i][1];
      d.t = slice.t();
      out.suspects.push_back(d);
    } catch (const ContourUnsafeError&) {
      Defect d;
      d.x = pts[i][0];
      d.y = pts[i][1];
      d.t = slice.t();
      out.suspects.push_back(d);
    }
  }
  return out;
}

std::pair<int, int> totals(const std::vector<Defect>& defects) {
  int w = 0, chi = 0;
  for (const auto& d : defects) {
    w += d.m;
    chi += d.n_index;
  }
  return {w, chi};
}

// ---------------------------------------------------------------------------
// Group algebra
// ---------------------------------------------------------------------------

std::pair<int, int> generator_vector(Generator g) {
  switch (g) {
    case Generator::V: return {1, 1};
    case Generator::Vstar: return {-1, 1};
    case Generator::S: return {0, -1};
    case Generator::E: return {0, 1};
  }
  return {0, 0};
}

DefectVector group_reduce(const GenMultiset& members) {
  DefectVector v;
  v.members = members;
  for (int i = 0; i < 4; ++i) {
    const auto [m, n] = generator_vector(static_cast<Generator>(i));
    v.m += members.count[i] * m;
    v.n_index += members.count[i] * n;
  }
  return v;
}

std::vector<DefectComplex> enumerate_multiplet(int p) {
  if (p < 1) throw std::invalid_argument("enumerate_multiplet: p must be >= 1");
  std::vector<DefectComplex> out;
  for (int nv = 0; nv <= p; ++nv)
    for (int nvs = 0; nvs + nv <= p; ++nvs)
      for (int ns = 0; ns + nvs + nv <= p; ++ns) {
        const int ne = p - nv - nvs - ns;
        GenMultiset m;
        m.count = {nv, nvs, ns, ne};
        const DefectVector v = group_reduce(m);
        out.push_back({v.m, v.n_index, p, m});
      }
  return out;
}

bool vertex_legal(const GenMultiset& incoming, const GenMultiset& outgoing) {
  const DefectVector a = group_reduce(incoming);
  const DefectVector b = group_reduce(outgoing);
  return a.m == b.m && a.n_index == b.n_index;
}

Generator generator_of_species(Species s) {
  switch (s) {
    case Species::Vortex: return Generator::V;
    case Species::AntiVortex: return Generator::Vstar;
    case Species::Saddle: return Generator::S;
    case Species::Maximum:
    case Species::Minimum: return Generator::E;
  }
  return Generator::E;
}

GenMultiset multiset_of_species(const std::vector<Species>& species) {
  GenMultiset m;
  for (Species s : species) ++m[generator_of_species(s)];
  return m;
}

GenMultiset parse_multiset(const std::string& text) {
  GenMultiset m;
  std::string token;
  auto flush = [&]() {
    if (token.empty()) return;
    if (token == "v") ++m[Generator::V];
    else if (token == "v*") ++m[Generator::Vstar];
    else if (token == "s") ++m[Generator::S];
    else if (token == "e") ++m[Generator::E];
    else if (token == "0") { /* vacuum */ }
    else throw std::invalid_argument("parse_multiset: unknown defect '" + token + "'");
    token.clear();
  };
  for (char c : text) {
    if (c == '+') flush();
    else if (!std::isspace(static_cast<unsigned char>(c))) token.push_back(c);
  }
  flush();
  return m;
}

std::string multiset_to_string(const GenMultiset& m) {
  static const char* names[4] = {"v", "v*", "s", "e"};
  std::string out;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < m.count[i]; ++k) {
      if (!out.empty()) out += "+";
      out += names[i];
    }
  return out.empty() ? "0" : out;
}

Species species_from_name(const std::string& name) {
  if (name == "vortex") return Species::Vortex;
  if (name == "antivortex") return Species::AntiVortex;
  if (name == "maximum") return Species::Maximum;
  if (name == "minimum") return Species::Minimum;
  if (name == "saddle") return Species::Saddle;
  throw std::invalid_argument("species_from_name: unknown species '" + name + "'");
}

}  // namespace defectline
