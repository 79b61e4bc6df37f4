#pragma once

#include <string>

namespace defectline {

enum class Species { Vortex, AntiVortex, Maximum, Minimum, Saddle };

inline const char* species_name(Species s) {
  switch (s) {
    case Species::Vortex: return "vortex";
    case Species::AntiVortex: return "antivortex";
    case Species::Maximum: return "maximum";
    case Species::Minimum: return "minimum";
    case Species::Saddle: return "saddle";
  }
  return "?";
}

Species species_from_name(const std::string& name);

/// Topological charge m of a species.
inline int species_m(Species s) { return s == Species::Vortex ? 1 : s == Species::AntiVortex ? -1 : 0; }

/// Topological (Poincare) index n of a species.
inline int species_n(Species s) { return s == Species::Saddle ? -1 : 1; }

/// A classified critical point of the field: position, time, charge m,
/// index n and the species tag.
struct Defect {
  double x = 0, y = 0, t = 0;
  int m = 0;
  int n_index = 0;
  Species species = Species::Vortex;
};

inline Defect make_defect(double x, double y, double t, Species s) {
  return {x, y, t, species_m(s), species_n(s), s};
}

}  // namespace defectline
