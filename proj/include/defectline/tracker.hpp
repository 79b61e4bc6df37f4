#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "defectline/matrix.hpp"
#include "defectline/rootfind.hpp"
#include "defectline/topology.hpp"

namespace defectline {

/// Time-ordered polyline of one defect with identity maintained across
/// steps. Species is constant along a line; direction reversals show up as
/// paired events, never as silent species flips.
struct DefectLine {
  int id = -1;
  Species species = Species::Vortex;
  std::vector<Defect> samples;
  std::optional<int> birth_event, death_event;
  bool birth_at_boundary = false, death_at_boundary = false;
};

struct TopologicalEvent {
  double t = 0, x = 0, y = 0;
  std::vector<Species> incoming, outgoing;
  bool legal = false;
  bool at_boundary = false;
};

struct TrackOptions {
  RootfindOptions rootfind;
  double match_radius_floor = 0.05;
  double match_radius_vel_factor = 5.0;  // match_radius = max(5 dt v_est, floor)
  double dt_min_divisor = 1024.0;        // event bisection down to dt / divisor
  double radius_cap = 0.1;               // classification contour cap
  int samples = 256;
  /// Critical-point (saddle/extremum) lines are tracked for fields up to
  /// this dimension; larger systems run at the nodal level only.
  int full_topology_max_n = 6;
  bool force_nodal_only = false;
  /// Steps between contour-based classification cross-checks; intermediate
  /// steps classify by Jacobian signs (identical for nondegenerate points).
  int contour_check_every = 1;
};

struct StepTotals {
  double t = 0;
  int w = 0, chi = 0;
  /// The slice produced unclassifiable (degenerate) points, typically when a
  /// step lands exactly on a vertex; its totals miss those compounds.
  bool indeterminate = false;
};

struct TrackResult {
  std::vector<DefectLine> lines;
  std::vector<TopologicalEvent> events;
  std::vector<StepTotals> totals;
  std::vector<Defect> suspects;
  std::vector<std::string> warnings;
  int violations = 0;            // illegal non-boundary events
  double min_approach = 1e300;   // closest nodal near-miss seen (not an event)
  bool nodal_only = false;
};

/// March the field from t_start to t_end in steps of dt: detect, classify,
/// link by greedy nearest neighbour, and localize topological events by
/// bisection down to dt / dt_min_divisor.
TrackResult track(const FieldView& field, double t_start, double t_end, double dt,
                  const SearchWindow& window, const TrackOptions& opts = {});

/// First-order eigenvalue velocities of M0 + t diag(s, -s) at t = 0, paired
/// as (lambda_plus, lambda_minus) with lambda_pm = (a + d pm sqrt(disc)) / 2.
struct VelocityPair {
  cplx lambda_plus, lambda_minus;   // eigenvalues at t = 0
  cplx v_plus, v_minus;             // their first-order velocities
};
VelocityPair velocity_closed_form_n2(const ComplexMatrix& m0, cplx s);

/// First-order velocity of the eigenvalue lambda0 of a 3x3 matrix under
/// S = diag(s, 0, -s).
cplx velocity_closed_form_n3(const ComplexMatrix& m0, cplx s, cplx lambda0);

/// General-N eigenvalue velocity tr{Mdot adj(M - lambda I)} / prod_{k != j}
/// (lambda_k - lambda_j), for a simple eigenvalue lambda_j of m.
cplx velocity_general(const ComplexMatrix& m, const ComplexMatrix& mdot, cplx lambda_j);

/// Adjugate (transposed cofactor matrix), computed entrywise.
ComplexMatrix adjugate(const ComplexMatrix& m);

/// Quaternionic transient of the 2x2 model: a maximal t-interval where the
/// plane zeros vanish while the off-plane quaternionic pair exists.
struct LifetimeRecord {
  double t_birth = 0, t_death = 0;
  double t_max = 0;      // t_death - t_birth
  double sigma = 0;      // filled by the ensemble sweep
  bool clipped = false;  // transient still open at a range boundary
  bool quat_confirmed = false;
  bool zpair_ok = false;  // z1 = -z2, w1 = -w2 at the midpoint
  double max_offplane = 0;  // |z| + |w| of the branch at the midpoint
};

std::vector<LifetimeRecord> measure_lifetime(const ComplexMatrix& m0, cplx s, double t_start,
                                             double t_end, double dt);

}  // namespace defectline
