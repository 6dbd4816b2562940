#pragma once

#include "hilbertflow/density.hpp"
#include "hilbertflow/fixtures.hpp"

namespace hilbert {

struct CheckRow {
  std::string module;
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// The named invariant checks of every module, run against a fixture at the
/// given depth.  Checks that need structure the fixture lacks (a biproximal
/// generator, a simplex backend) are skipped rather than failed.
std::vector<CheckRow> run_invariant_suite(const Fixture& fixture, int depth, uint64_t seed);

}  // namespace hilbert
