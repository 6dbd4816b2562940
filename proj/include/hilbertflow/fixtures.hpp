#pragma once

#include "hilbertflow/group.hpp"

namespace hilbert {

/// A ready-to-run configuration: group, invariant domain, basepoint.
struct Fixture {
  std::string name;
  GroupPresentation group;
  DomainPtr domain;
  ProjectivePoint basepoint;
  int default_depth = 8;
};

/// Two boosts of length s along orthogonal axes of the Klein disk; free and
/// convex cocompact for sinh(s/2)^2 >= 1 + gap (ping-pong margin).
Fixture make_disk_schottky(double s = 2.0, double gap = 0.2);

/// Hyperbolic triangle reflection group from the Gram-matrix construction in
/// SO(2,1); cocompact on the Klein disk (needs 1/p + 1/q + 1/r < 1).
Fixture make_triangle_reflection(int p = 3, int q = 3, int r = 4);

/// <diag(4,2,1), diag(2,4,1)> acting on the 2-simplex: a rank-two lattice of
/// translations of the hexagonal plane; the higher-rank negative control.
Fixture make_simplex_lattice();

/// Single boost of length s on the Klein disk.
Fixture make_cyclic(double boost = 1.0);

/// Parse "name" or "name:key=val,key=val" over the builtin gallery
/// (disk-schottky, triangle-reflection, simplex-lattice, cyclic).
Fixture builtin_fixture(const std::string& spec);

/// Load a fixture from JSON: {"name":..., "free":..., "generators":[{"label",
/// "matrix"}], "domain":{...}, "basepoint":[...], "depth":...}.
Fixture load_fixture_json(const std::string& path);
Fixture parse_fixture_json(const std::string& text);

/// Builtin name or a path to a JSON file.
Fixture resolve_fixture(const std::string& spec);

}  // namespace hilbert
