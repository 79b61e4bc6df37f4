#include "defectline/tracker.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <map>

#include "defectline/errors.hpp"

namespace defectline {

namespace {

struct Detection {
  double t = 0;
  std::vector<Defect> defects;
  std::vector<Defect> suspects;
  std::vector<std::string> warnings;
};

// Detect and classify everything at one time slice. Analytic built-ins
// enumerate their defect content in closed form.
Detection detect(const FieldView& field, double t, const SearchWindow& window,
                 const TrackOptions& opts, bool nodal_only,
                 const std::vector<std::array<double, 2>>& warm, bool contour) {
  Detection det;
  det.t = t;
  if (field.has_analytic_defects()) {
    for (auto d : field.analytic_defects(t)) {
      d.t = t;
      if (window.contains(d.x, d.y)) det.defects.push_back(d);
    }
    return det;
  }
  const auto slice = field.slice(t);
  PlaneResult zeros, crits;
  if (!nodal_only) {
    auto fz = std::async(std::launch::async, [&] {
      return find_plane_zeros(*slice, window, opts.rootfind, warm);
    });
    crits = find_phase_critical_points(*slice, window, opts.rootfind, warm);
    zeros = fz.get();
  } else {
    zeros = find_plane_zeros(*slice, window, opts.rootfind, warm);
  }
  det.warnings = zeros.warnings;
  ClassifyOptions copts;
  copts.samples = opts.samples;
  auto cls = classify_all(*slice, zeros.roots, crits.roots, opts.radius_cap, copts, contour);
  det.defects = std::move(cls.defects);
  det.suspects = std::move(cls.suspects);
  for (const auto& s : zeros.suspects) {
    Defect d;
    d.x = s.x;
    d.y = s.y;
    d.t = t;
    det.suspects.push_back(d);
  }
  for (const auto& s : crits.suspects) {
    Defect d;
    d.x = s.x;
    d.y = s.y;
    d.t = t;
    det.suspects.push_back(d);
  }
  return det;
}

double dist2d(const Defect& a, const Defect& b) { return std::hypot(a.x - b.x, a.y - b.y); }

struct MatchResult {
  std::vector<std::pair<int, int>> pairs;  // (prev index, cur index)
  std::vector<int> unmatched_prev, unmatched_cur;
};

// Greedy nearest-neighbour linking, species-exact, shortest pairs first
// (which also breaks ties by minimal total displacement).
MatchResult match_sets(const std::vector<Defect>& prev, const std::vector<Defect>& cur,
                       double radius) {
  struct Cand {
    double d;
    int i, j;
  };
  std::vector<Cand> cands;
  for (int i = 0; i < static_cast<int>(prev.size()); ++i)
    for (int j = 0; j < static_cast<int>(cur.size()); ++j) {
      if (prev[i].species != cur[j].species) continue;
      const double d = dist2d(prev[i], cur[j]);
      if (d <= radius) cands.push_back({d, i, j});
    }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  MatchResult r;
  std::vector<bool> pused(prev.size(), false), cused(cur.size(), false);
  for (const auto& c : cands) {
    if (pused[c.i] || cused[c.j]) continue;
    pused[c.i] = cused[c.j] = true;
    r.pairs.push_back({c.i, c.j});
  }
  for (int i = 0; i < static_cast<int>(prev.size()); ++i)
    if (!pused[i]) r.unmatched_prev.push_back(i);
  for (int j = 0; j < static_cast<int>(cur.size()); ++j)
    if (!cused[j]) r.unmatched_cur.push_back(j);
  return r;
}

bool near_boundary(const SearchWindow& w, double x, double y, double margin) {
  return x - w.x_min < margin || w.x_max - x < margin || y - w.y_min < margin ||
         w.y_max - y < margin;
}

// Union-find clustering of event participants by position.
std::vector<int> cluster_positions(const std::vector<Defect>& pts, double radius) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist2d(pts[i], pts[j]) <= radius) parent[find(i)] = find(j);
  std::vector<int> label(n);
  std::map<int, int> remap;
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    auto it = remap.find(root);
    if (it == remap.end()) it = remap.emplace(root, static_cast<int>(remap.size())).first;
    label[i] = it->second;
  }
  return label;
}

}  // namespace

TrackResult track(const FieldView& field, double t_start, double t_end, double dt,
                  const SearchWindow& window, const TrackOptions& opts) {
  if (!(t_start < t_end)) throw std::invalid_argument("track: t_start must be < t_end");
  if (!(dt > 0)) throw std::invalid_argument("track: dt must be > 0");
  window.validate();

  TrackResult out;
  out.nodal_only =
      opts.force_nodal_only || (field.dim() > opts.full_topology_max_n && field.dim() > 0);
  const bool nodal_only = out.nodal_only;
  const double dt_min = dt / opts.dt_min_divisor;

  // Legality of an event: full (w, chi) conservation when every defect line
  // is tracked; w only when the critical-point network is not observed.
  auto event_legal = [&](const std::vector<Species>& in, const std::vector<Species>& outg) {
    if (!nodal_only) return vertex_legal(multiset_of_species(in), multiset_of_species(outg));
    int win = 0, wout = 0;
    for (Species s : in) win += species_m(s);
    for (Species s : outg) wout += species_m(s);
    return win == wout;
  };

  const int steps = static_cast<int>(std::ceil((t_end - t_start) / dt - 1e-12));
  std::vector<DefectLine> lines;
  std::vector<int> active;  // line index per current defect
  double v_est = 1.0;

  Detection prev = detect(field, t_start, window, opts, nodal_only, {}, true);
  for (const auto& s : prev.suspects) out.suspects.push_back(s);
  for (const auto& w : prev.warnings) out.warnings.push_back(w);
  {
    const auto [w, chi] = totals(prev.defects);
    out.totals.push_back({t_start, w, chi, !prev.suspects.empty()});
  }
  const double init_margin = std::max(0.1, opts.match_radius_floor);
  for (const auto& d : prev.defects) {
    DefectLine line;
    line.id = static_cast<int>(lines.size());
    line.species = d.species;
    line.samples.push_back(d);
    line.birth_at_boundary = true;  // pre-existing at t_start
    (void)init_margin;
    lines.push_back(line);
    active.push_back(line.id);
  }

  for (int k = 1; k <= steps; ++k) {
    const double t = std::min(t_start + k * dt, t_end);
    const double match_radius =
        std::max(opts.match_radius_vel_factor * dt * v_est, opts.match_radius_floor);
    const double margin = std::max(0.1, match_radius);

    // Warm seeds: previous positions and linear predictions.
    std::vector<std::array<double, 2>> warm;
    for (std::size_t i = 0; i < prev.defects.size(); ++i) {
      const auto& d = prev.defects[i];
      warm.push_back({d.x, d.y});
      const auto& line = lines[static_cast<std::size_t>(active[i])];
      if (line.samples.size() >= 2) {
        const auto& a = line.samples[line.samples.size() - 2];
        const auto& b = line.samples.back();
        const double td = b.t - a.t;
        if (td > 0)
          warm.push_back({b.x + (b.x - a.x) / td * dt, b.y + (b.y - a.y) / td * dt});
      }
    }

    const bool contour_step = opts.contour_check_every <= 1 || k % opts.contour_check_every == 0;
    Detection cur = detect(field, t, window, opts, nodal_only, warm, contour_step);
    for (const auto& s : cur.suspects) out.suspects.push_back(s);
    for (const auto& w : cur.warnings) out.warnings.push_back(w);

    MatchResult m = match_sets(prev.defects, cur.defects, match_radius);

    // Rescue pass: defects accelerate like sqrt(dt) right after a pair
    // event, which can outrun the nominal radius for one step. Leftovers
    // that still pair up within 3x the radius are continuations, not
    // death/birth pairs.
    if (!m.unmatched_prev.empty() && !m.unmatched_cur.empty()) {
      std::vector<Defect> lp, lc;
      for (int i : m.unmatched_prev) lp.push_back(prev.defects[static_cast<std::size_t>(i)]);
      for (int j : m.unmatched_cur) lc.push_back(cur.defects[static_cast<std::size_t>(j)]);
      const MatchResult rescue = match_sets(lp, lc, 3.0 * match_radius);
      MatchResult merged;
      merged.pairs = m.pairs;
      for (const auto& [a, b] : rescue.pairs)
        merged.pairs.push_back({m.unmatched_prev[static_cast<std::size_t>(a)],
                                m.unmatched_cur[static_cast<std::size_t>(b)]});
      for (int a : rescue.unmatched_prev)
        merged.unmatched_prev.push_back(m.unmatched_prev[static_cast<std::size_t>(a)]);
      for (int b : rescue.unmatched_cur)
        merged.unmatched_cur.push_back(m.unmatched_cur[static_cast<std::size_t>(b)]);
      m = std::move(merged);
    }

    // Velocity estimate for the next step's match radius.
    if (!m.pairs.empty()) {
      std::vector<double> disp;
      for (const auto& [i, j] : m.pairs) disp.push_back(dist2d(prev.defects[i], cur.defects[j]));
      std::nth_element(disp.begin(), disp.begin() + disp.size() / 2, disp.end());
      v_est = std::max(0.1, disp[disp.size() / 2] / dt);
    }

    // Boundary exits / entries are not events.
    std::vector<int> dying, born;
    for (int i : m.unmatched_prev) {
      if (near_boundary(window, prev.defects[i].x, prev.defects[i].y, margin)) {
        lines[static_cast<std::size_t>(active[i])].death_at_boundary = true;
      } else {
        dying.push_back(i);
      }
    }
    for (int j : m.unmatched_cur) {
      if (near_boundary(window, cur.defects[j].x, cur.defects[j].y, margin)) {
        born.push_back(~j);  // bitwise-not marks boundary entry
      } else {
        born.push_back(j);
      }
    }

    // Localize genuine changes by bisection; cluster into events.
    std::vector<int> born_real;
    for (int j : born)
      if (j >= 0) born_real.push_back(j);

    std::vector<int> event_of_dying(dying.size(), -1), event_of_born(born_real.size(), -1);
    if (!dying.empty() || !born_real.empty()) {
      // Participants, clustered by position (positions are within one step
      // of the event, so match_radius-scale clustering is the right size).
      std::vector<Defect> participants;
      for (int i : dying) participants.push_back(prev.defects[static_cast<std::size_t>(i)]);
      for (int j : born_real) participants.push_back(cur.defects[static_cast<std::size_t>(j)]);
      // Participants of one event separate like sqrt(dt); cluster generously
      // and let the bisection pin the vertex.
      const double event_radius = std::max(3.0 * match_radius, 0.3);
      const auto label = cluster_positions(participants, event_radius);
      const int nclusters = 1 + *std::max_element(label.begin(), label.end());

      for (int c = 0; c < nclusters; ++c) {
        TopologicalEvent ev;
        std::vector<Defect> members;
        std::vector<std::size_t> member_ids;
        for (std::size_t p = 0; p < participants.size(); ++p) {
          if (label[p] != c) continue;
          members.push_back(participants[p]);
          member_ids.push_back(p);
          if (p < dying.size())
            ev.incoming.push_back(participants[p].species);
          else
            ev.outgoing.push_back(participants[p].species);
        }

        // Bisect on the local defect count to localize the event time.
        double ta = t - dt, tb = t;
        double cx = 0, cy = 0;
        for (const auto& d : members) {
          cx += d.x;
          cy += d.y;
        }
        cx /= static_cast<double>(members.size());
        cy /= static_cast<double>(members.size());
        const double local_r = std::max(2.0 * event_radius, 4.0 * dt * v_est);
        auto local_detect = [&](double tq) {
          std::vector<std::array<double, 2>> seeds;
          for (const auto& d : members) seeds.push_back({d.x, d.y});
          SearchWindow lw{cx - local_r, cx + local_r, cy - local_r, cy + local_r, 8};
          return detect(field, tq, lw, opts, nodal_only, seeds, false);
        };
        auto local_multiset = [&](double tq) {
          std::vector<Species> sp;
          for (const auto& d : local_detect(tq).defects) sp.push_back(d.species);
          std::sort(sp.begin(), sp.end());
          return sp;
        };
        // Bisection on the local defect content: while a slice still shows
        // the A-side multiset the event lies later.
        {
          const auto base_a = local_multiset(ta);
          while (tb - ta > dt_min) {
            const double tm = 0.5 * (ta + tb);
            if (local_multiset(tm) == base_a)
              ta = tm;
            else
              tb = tm;
          }
        }
        ev.t = 0.5 * (ta + tb);
        // Position from the participants right at the refined bracket, where
        // they have collapsed onto the vertex.
        {
          double px = 0, py = 0;
          int cnt = 0;
          auto accumulate = [&](double tq, const std::vector<Species>& side) {
            if (side.empty()) return;
            GenMultiset wanted = multiset_of_species(side);
            for (const auto& d : local_detect(tq).defects) {
              if (std::hypot(d.x - cx, d.y - cy) > event_radius) continue;
              auto& slot = wanted[generator_of_species(d.species)];
              if (slot <= 0) continue;
              --slot;
              px += d.x;
              py += d.y;
              ++cnt;
            }
          };
          accumulate(ta, ev.incoming);
          accumulate(tb, ev.outgoing);
          if (cnt > 0) {
            cx = px / cnt;
            cy = py / cnt;
          }
        }
        ev.x = cx;
        ev.y = cy;
        ev.at_boundary = near_boundary(window, cx, cy, margin);
        ev.legal = event_legal(ev.incoming, ev.outgoing);

        // A vertex sampled exactly at its degenerate instant splits into a
        // deaths-only and a births-only half one step apart. Recombine: an
        // adjacent unbalanced event at the same spot whose union balances is
        // the same vertex.
        int target = -1;
        for (int eidx = static_cast<int>(out.events.size()) - 1; eidx >= 0; --eidx) {
          auto& cand = out.events[static_cast<std::size_t>(eidx)];
          if (ev.t - cand.t > 2.5 * dt) break;
          if (std::hypot(cand.x - ev.x, cand.y - ev.y) > 1.5 * event_radius) continue;
          if (cand.legal && ev.legal) continue;
          // Cancel lines that were born in the earlier half and died in the
          // later one, then test the combined vertex.
          std::vector<Species> c_in = cand.incoming, c_out = cand.outgoing;
          std::vector<Species> n_in = ev.incoming, n_out = ev.outgoing;
          for (auto it = n_in.begin(); it != n_in.end();) {
            auto hit = std::find(c_out.begin(), c_out.end(), *it);
            if (hit != c_out.end()) {
              c_out.erase(hit);
              it = n_in.erase(it);
            } else {
              ++it;
            }
          }
          std::vector<Species> m_in = c_in;
          m_in.insert(m_in.end(), n_in.begin(), n_in.end());
          std::vector<Species> m_out = c_out;
          m_out.insert(m_out.end(), n_out.begin(), n_out.end());
          if (!event_legal(m_in, m_out)) continue;
          cand.incoming = m_in;
          cand.outgoing = m_out;
          cand.t = 0.5 * (cand.t + ev.t);
          cand.x = 0.5 * (cand.x + ev.x);
          cand.y = 0.5 * (cand.y + ev.y);
          cand.legal = true;
          target = eidx;
          break;
        }
        if (target < 0) {
          target = static_cast<int>(out.events.size());
          out.events.push_back(ev);
        }
        for (std::size_t p : member_ids) {
          if (p < dying.size())
            event_of_dying[p] = target;
          else
            event_of_born[p - dying.size()] = target;
        }
      }
    }

    // Commit line bookkeeping for this step.
    std::vector<int> next_active(cur.defects.size(), -1);
    for (const auto& [i, j] : m.pairs) {
      const int lid = active[static_cast<std::size_t>(i)];
      lines[static_cast<std::size_t>(lid)].samples.push_back(cur.defects[static_cast<std::size_t>(j)]);
      next_active[static_cast<std::size_t>(j)] = lid;
    }
    for (std::size_t p = 0; p < dying.size(); ++p) {
      const int lid = active[static_cast<std::size_t>(dying[p])];
      if (event_of_dying[p] >= 0) lines[static_cast<std::size_t>(lid)].death_event = event_of_dying[p];
    }
    std::size_t born_seq = 0;
    for (int j : born) {
      const bool boundary = j < 0;
      const int idx = boundary ? ~j : j;
      DefectLine line;
      line.id = static_cast<int>(lines.size());
      line.species = cur.defects[static_cast<std::size_t>(idx)].species;
      line.samples.push_back(cur.defects[static_cast<std::size_t>(idx)]);
      if (boundary) {
        line.birth_at_boundary = true;
      } else {
        line.birth_event = event_of_born[born_seq] >= 0
                               ? std::optional<int>(event_of_born[born_seq])
                               : std::nullopt;
        ++born_seq;
      }
      next_active[static_cast<std::size_t>(idx)] = line.id;
      lines.push_back(line);
    }

    // Nodal near-miss reporting (close collisions that are not events).
    for (std::size_t i = 0; i < cur.defects.size(); ++i)
      for (std::size_t j = i + 1; j < cur.defects.size(); ++j) {
        if (cur.defects[i].m == 0 || cur.defects[j].m == 0) continue;
        out.min_approach = std::min(out.min_approach, dist2d(cur.defects[i], cur.defects[j]));
      }

    const auto [w, chi] = totals(cur.defects);
    out.totals.push_back({t, w, chi, !cur.suspects.empty()});
    prev = std::move(cur);
    active = std::move(next_active);
  }

  for (const auto& ev : out.events)
    if (!ev.legal && !ev.at_boundary) ++out.violations;
  out.lines = std::move(lines);
  return out;
}

// ---------------------------------------------------------------------------
// Velocities
// ---------------------------------------------------------------------------

VelocityPair velocity_closed_form_n2(const ComplexMatrix& m0, cplx s) {
  if (m0.n != 2) throw std::invalid_argument("velocity_closed_form_n2: matrix must be 2x2");
  const cplx a = m0(0, 0), b = m0(0, 1), c = m0(1, 0), d = m0(1, 1);
  const cplx disc = (a - d) * (a - d) + 4.0 * b * c;
  const double scale = std::max(1.0, m0.max_abs());
  if (std::abs(disc) < 1e-12 * scale * scale)
    throw DegenerateEigenvalueError("velocity_closed_form_n2: discriminant vanishes");
  const cplx sq = std::sqrt(disc);
  VelocityPair v;
  v.lambda_plus = 0.5 * (a + d + sq);
  v.lambda_minus = 0.5 * (a + d - sq);
  v.v_plus = s * (a - d) / sq;
  v.v_minus = -s * (a - d) / sq;
  return v;
}

cplx velocity_closed_form_n3(const ComplexMatrix& m0, cplx s, cplx lambda0) {
  if (m0.n != 3) throw std::invalid_argument("velocity_closed_form_n3: matrix must be 3x3");
  const cplx a = m0(0, 0), b = m0(0, 1), c = m0(0, 2);
  const cplx d = m0(1, 0), e = m0(1, 1), f = m0(1, 2);
  const cplx g = m0(2, 0), h = m0(2, 1), k = m0(2, 2);
  const cplx num = (a * e + f * h - e * k - b * d + (k - a) * lambda0) * s;
  const cplx den = b * d - a * e + c * g + f * h - a * k - e * k +
                   2.0 * lambda0 * (a + e + k) - 3.0 * lambda0 * lambda0;
  const double scale = std::max(1.0, m0.max_abs());
  if (std::abs(den) < 1e-10 * scale * scale)
    throw DegenerateEigenvalueError("velocity_closed_form_n3: denominator vanishes");
  return num / den;
}

ComplexMatrix adjugate(const ComplexMatrix& m) {
  const int n = m.n;
  ComplexMatrix adj(n);
  if (n == 1) {
    adj(0, 0) = 1.0;
    return adj;
  }
  ComplexMatrix minor(n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int mi = 0;
      for (int r = 0; r < n; ++r) {
        if (r == i) continue;
        int mj = 0;
        for (int c = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mi, mj) = m(r, c);
          ++mj;
        }
        ++mi;
      }
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * det_lu(minor);  // transpose of the cofactor matrix
    }
  return adj;
}

cplx velocity_general(const ComplexMatrix& m, const ComplexMatrix& mdot, cplx lambda_j) {
  const auto evs = eigenvalues(m);
  // Identify lambda_j among the eigenvalues and require it simple.
  int jbest = 0;
  double dbest = std::numeric_limits<double>::max();
  for (int i = 0; i < static_cast<int>(evs.size()); ++i) {
    const double d = std::abs(evs[i] - lambda_j);
    if (d < dbest) {
      dbest = d;
      jbest = i;
    }
  }
  const double scale = std::max(1.0, m.max_abs());
  cplx envelope(1.0, 0.0);
  for (int k = 0; k < static_cast<int>(evs.size()); ++k) {
    if (k == jbest) continue;
    const cplx gap = evs[k] - evs[jbest];
    if (std::abs(gap) < 1e-9 * scale)
      throw DegenerateEigenvalueError("velocity_general: repeated eigenvalue");
    envelope *= gap;
  }
  ComplexMatrix shifted = m;
  for (int i = 0; i < m.n; ++i) shifted(i, i) -= evs[jbest];
  const ComplexMatrix adj = adjugate(shifted);
  cplx tr(0, 0);
  for (int i = 0; i < m.n; ++i)
    for (int k = 0; k < m.n; ++k) tr += mdot(i, k) * adj(k, i);
  return tr / envelope;
}

// ---------------------------------------------------------------------------
// Quaternionic transient lifetimes
// ---------------------------------------------------------------------------

namespace {

bool plane_zeros_exist(const ComplexMatrix& m0, cplx s, double t) {
  ComplexMatrix m = m0;
  m(0, 0) += t * s;
  m(1, 1) -= t * s;
  const auto sol = solve_line_circle(coeffs_2x2_of_matrix(m));
  if (sol.degenerate_line) return true;  // nodal circle: zeros everywhere
  if (sol.inconsistent_line) return false;
  return sol.count > 0;
}

// Last plane-zero position before the transient, used to anchor the 4D
// Newton seeds.
std::array<double, 2> last_zero_position(const ComplexMatrix& m0, cplx s, double t) {
  ComplexMatrix m = m0;
  m(0, 0) += t * s;
  m(1, 1) -= t * s;
  const auto sol = solve_line_circle(coeffs_2x2_of_matrix(m));
  if (sol.count > 0)
    return {0.5 * (sol.pts[0][0] + (sol.count > 1 ? sol.pts[1][0] : sol.pts[0][0])),
            0.5 * (sol.pts[0][1] + (sol.count > 1 ? sol.pts[1][1] : sol.pts[0][1]))};
  return {0, 0};
}

}  // namespace

std::vector<LifetimeRecord> measure_lifetime(const ComplexMatrix& m0, cplx s, double t_start,
                                             double t_end, double dt) {
  if (m0.n != 2) throw std::invalid_argument("measure_lifetime: m0 must be 2x2");
  if (!(t_start < t_end) || !(dt > 0))
    throw std::invalid_argument("measure_lifetime: invalid range or step");

  std::vector<LifetimeRecord> records;
  const double dt_min = dt / 1024.0;
  auto refine = [&](double lo, double hi, bool lo_exists) {
    // Bisect the existence boundary between lo and hi.
    while (hi - lo > dt_min) {
      const double mid = 0.5 * (lo + hi);
      if (plane_zeros_exist(m0, s, mid) == lo_exists)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  bool prev_exists = plane_zeros_exist(m0, s, t_start);
  double t_prev = t_start;
  std::optional<double> open_birth;
  bool open_clipped = false;
  if (!prev_exists) {
    open_birth = t_start;  // already open when the range begins
    open_clipped = true;
  }

  const int nsteps = static_cast<int>(std::ceil((t_end - t_start) / dt));
  for (int i = 1; i <= nsteps; ++i) {
    const double t = std::min(t_start + i * dt, t_end);
    const bool exists = plane_zeros_exist(m0, s, t);
    if (exists != prev_exists) {
      const double tc = refine(t_prev, t, prev_exists);
      if (!exists) {
        open_birth = tc;  // zeros vanished: transient opens
        open_clipped = false;
      } else if (open_birth) {
        LifetimeRecord rec;
        rec.t_birth = *open_birth;
        rec.t_death = tc;
        rec.t_max = tc - *open_birth;
        rec.clipped = open_clipped;
        records.push_back(rec);
        open_birth.reset();
      }
    }
    prev_exists = exists;
    t_prev = t;
  }
  if (open_birth) {
    LifetimeRecord rec;
    rec.t_birth = *open_birth;
    rec.t_death = t_end;
    rec.t_max = t_end - *open_birth;
    rec.clipped = true;
    records.push_back(rec);
  }

  // Quaternionic confirmation at each transient midpoint with anchored seeds.
  for (auto& rec : records) {
    if (rec.t_max <= 0) continue;
    const double tm = 0.5 * (rec.t_birth + rec.t_death);
    ComplexMatrix m = m0;
    m(0, 0) += tm * s;
    m(1, 1) -= tm * s;
    const auto anchor = last_zero_position(m0, s, rec.t_birth - 2 * dt_min);
    std::vector<std::array<double, 4>> seeds;
    const double zs[] = {0.01, 0.1, 0.5, 1.0, 2.0, 0.5 * rec.t_max};
    for (double z : zs) {
      seeds.push_back({anchor[0], anchor[1], z, 0.0});
      seeds.push_back({anchor[0], anchor[1], -z, 0.0});
      seeds.push_back({anchor[0], anchor[1], z, z});
      seeds.push_back({anchor[0], anchor[1], -z, -z});
    }
    const double L = 2.0 * m0.max_abs() + std::abs(s) * std::abs(tm) + 2.0;
    Box4 box;
    box.lo = {-L, -L, -L, -L};
    box.hi = {L, L, L, L};
    box.grid_density = 8;
    const auto q = find_quaternion_roots(m, box, {}, seeds);
    const QuaternionRoot* best = nullptr;
    for (const auto& r : q.roots)
      if (!r.planar && (!best || std::abs(r.z) > std::abs(best->z))) best = &r;
    if (best) {
      rec.quat_confirmed = true;
      rec.max_offplane = std::abs(best->z) + std::abs(best->w);
      for (const auto& r : q.roots) {
        if (&r == best) continue;
        if (std::abs(r.x - best->x) < 1e-6 && std::abs(r.y - best->y) < 1e-6 &&
            std::abs(r.z + best->z) < 1e-6 && std::abs(r.w + best->w) < 1e-6)
          rec.zpair_ok = true;
      }
    }
  }
  return records;
}

}  // namespace defectline
