#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "defectline/defect.hpp"
#include "defectline/rootfind.hpp"
#include "defectline/wavefield.hpp"

namespace defectline {

/// Winding (1/2pi) closed-contour integral of d(arg psi) on a circle of the
/// given radius, sampled counterclockwise. Exact integer when no zero sits
/// near the contour; otherwise ContourUnsafeError (caller perturbs radius).
int winding_number(const FieldSlice& slice, double cx, double cy, double radius,
                   int samples = 256);
int winding_number(const FieldView& field, double cx, double cy, double radius, double t,
                   int samples = 256);

/// Winding of the angle of Im(psi^* grad psi) around the contour: the
/// topological (Poincare) index of the enclosed critical point.
int index_number(const FieldSlice& slice, double cx, double cy, double radius,
                 int samples = 256);
int index_number(const FieldView& field, double cx, double cy, double radius, double t,
                 int samples = 256);

enum class PointKind { Nodal, Critical };

struct ClassifyOptions {
  int samples = 256;
  double degenerate_tol = 1e-12;  // on the normalized Jacobian
  double laplacian_step_factor = 0.125;  // FD step = radius * factor
};

/// Classify one converged point. Nodal points are split vortex/anti-vortex
/// by the sign of the Jacobian d(Re,Im)/d(x,y), cross-checked against the
/// phase winding; critical points get saddle (index -1) or extremum
/// (index +1), with the sign of the phase Laplacian separating maxima from
/// minima. Degenerate points raise UnstableDefectError.
Defect classify(const FieldSlice& slice, double x, double y, PointKind kind, double radius,
                const ClassifyOptions& opts = {});

/// Contour-free variant: nodal species from the sign of the Jacobian,
/// critical species from the sign of det d(Im psi^* grad psi)/d(x,y), which
/// equals the contour index for nondegenerate points. The tracker uses this
/// between full classify() cross-checks.
Defect classify_local(const FieldSlice& slice, double x, double y, PointKind kind, double radius,
                      const ClassifyOptions& opts = {});

struct ClassifiedSet {
  std::vector<Defect> defects;
  std::vector<Defect> suspects;  // degenerate or winding-inconsistent points
};

/// Classify a whole detection, choosing each contour radius as half the
/// distance to the nearest other point, capped at radius_cap. With
/// contour = false the classify_local route is used throughout.
ClassifiedSet classify_all(const FieldSlice& slice, const std::vector<PlaneZero>& zeros,
                           const std::vector<PlaneZero>& crits, double radius_cap = 0.1,
                           const ClassifyOptions& opts = {}, bool contour = true);

/// (sum m, sum n) over a defect list.
std::pair<int, int> totals(const std::vector<Defect>& defects);

// ---------------------------------------------------------------------------
// Defect group D = < v, v*, s, e | v + v* = 2e, e + s = 0 >
// ---------------------------------------------------------------------------

enum class Generator { V = 0, Vstar = 1, S = 2, E = 3 };

/// Multiset over the generators {v, v*, s, e}.
struct GenMultiset {
  std::array<int, 4> count{0, 0, 0, 0};

  int& operator[](Generator g) { return count[static_cast<int>(g)]; }
  int operator[](Generator g) const { return count[static_cast<int>(g)]; }
  int size() const { return count[0] + count[1] + count[2] + count[3]; }
  GenMultiset merged(const GenMultiset& o) const {
    GenMultiset r;
    for (int i = 0; i < 4; ++i) r.count[i] = count[i] + o.count[i];
    return r;
  }
};

/// (m, n) vector of a generator: v=(1,1), v*=(-1,1), s=(0,-1), e=(0,1).
std::pair<int, int> generator_vector(Generator g);

struct DefectVector {
  int m = 0;
  int n_index = 0;
  GenMultiset members;
};

/// Reduce a multiset to its (m, n) vector: m = #v - #v*,
/// n = #v + #v* + #e - #s.
DefectVector group_reduce(const GenMultiset& members);

/// A defect complex labelled [w, chi, P].
struct DefectComplex {
  int w = 0, chi = 0, p = 0;
  GenMultiset members;
};

/// All multisets of size p over the four generators, C(p+3, 3) of them.
std::vector<DefectComplex> enumerate_multiplet(int p);

/// True iff (w, chi) is conserved across the vertex. Multisets are built
/// from time-slice observations, so the crossing rules (a past-directed v
/// reads as v*, a past-directed s as e, and vice versa) are already folded
/// into the labels.
bool vertex_legal(const GenMultiset& incoming, const GenMultiset& outgoing);

GenMultiset multiset_of_species(const std::vector<Species>& species);
Generator generator_of_species(Species s);

/// Parse "v+v*+s+s" (or "0" for the vacuum) into a multiset.
GenMultiset parse_multiset(const std::string& text);
std::string multiset_to_string(const GenMultiset& m);

}  // namespace defectline
