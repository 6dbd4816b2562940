#pragma once

#include "hilbertflow/domain.hpp"
#include "hilbertflow/flow.hpp"

#include <string>

namespace hilbert {

struct Generator {
  std::string label;
  ProjectiveMap map;
  int inverse_index = -1;  // index of the formal inverse (self for involutions)
};

/// Generators of a matrix group, closed under formal inverses.  The free
/// flag marks presentations known to be free (on the listed generators),
/// which makes the conjugacy problem solvable by cyclic reduction.
class GroupPresentation {
 public:
  static GroupPresentation from_generators(
      const std::vector<std::pair<std::string, Mat>>& generators, bool free);

  const std::vector<Generator>& generators() const { return gens_; }
  bool free() const { return free_; }
  int inverse_of(int index) const { return gens_[index].inverse_index; }

 private:
  std::vector<Generator> gens_;
  bool free_ = false;
};

struct GroupElement {
  std::vector<int> word;  // generator indices, freely reduced
  ProjectiveMap map;
  SpectralClass spectral;
};

struct OrbitEntry {
  GroupElement element;
  double dist = std::numeric_limits<double>::quiet_NaN();  // d(o, gamma o)
  std::optional<ProjectivePoint> direction;  // boundary hit of the ray o -> gamma o
};

/// Deduplicated word-metric ball, optionally with orbit geometry attached.
struct OrbitBall {
  int depth = 0;
  std::vector<OrbitEntry> entries;  // breadth-first order, identity first
  DomainPtr domain;                 // set once geometry is attached
  std::optional<ProjectivePoint> basepoint;
  double max_dist = 0.0;
  int saturated = 0;  // orbit points beyond the double-precision horizon

  size_t size() const { return entries.size(); }
};

/// All distinct elements of word length <= depth (freely reduced words,
/// deduplicated by canonical matrix).  Throws when the cap is exceeded.
OrbitBall enumerate_ball(const GroupPresentation& group, int depth,
                         size_t cap = 200000);

/// enumerate_ball plus orbit geometry: d(o, gamma o) and the boundary
/// direction of each orbit point.  Verifies on samples that the generators
/// preserve the domain.
OrbitBall orbit(const GroupPresentation& group, DomainPtr domain,
                const ProjectivePoint& o, int depth, size_t cap = 200000);

struct ExponentEstimate {
  double delta_hat = 0.0;  // slope of log N(r) over the top half of radii
  double stderr_ = 0.0;
  double delta_kappa = 0.0;  // same estimate from kappa-counting
  double stderr_kappa = 0.0;
  int shells = 0;
  bool consistent = false;  // the two estimates agree within combined stderr
};

ExponentEstimate critical_exponent(const OrbitBall& ball);

double poincare_series(const OrbitBall& ball, double s);

struct DivergenceReport {
  std::vector<int> depths;
  std::vector<double> partial_sums;  // Poincare partial sums at s over nested balls
  double s = 0.0;
  bool divergence_consistent = false;  // sums keep growing without flattening
};

/// Partial sums of the Poincare series at s across nested word balls.
DivergenceReport divergence_diagnostic(const OrbitBall& ball, double s,
                                       const std::vector<int>& depths);

enum class ClassKind { rank_one, biproximal_not_rank_one, singular };

struct ConjClass {
  GroupElement representative;
  double ell = 0.0;
  ClassKind kind = ClassKind::singular;
  int multiplicity = 0;  // ball elements merged into this class
};

enum class ConjStrategy {
  free_cyclic,     // exact for free presentations: necklaces of cyclic words
  charpoly_merge,  // heuristic merge by characteristic polynomial and ell
};

std::vector<ConjClass> conjugacy_classes(const GroupPresentation& group,
                                         const ConvexDomain& domain, int depth,
                                         ConjStrategy strategy, size_t cap = 200000);

/// rank_one iff biproximal with d_spl(x+, x-) >= 3 (infinite counts);
/// biproximal with d_spl <= 2 gives biproximal_not_rank_one; everything else
/// (ell = 0 or not biproximal) is singular.  Backends without a face lattice
/// fall back to the smooth + strongly-extremal flags of the fixed points.
ClassKind classify_element(const ConvexDomain& domain, const SpectralClass& spectral);

struct CountRow {
  double T = 0.0;
  int total = 0;
  int rank_one = 0;
  int singular = 0;
  int biproximal_not_rank_one = 0;
  double normalized = 0.0;  // T * total * exp(-delta_hat * T)
};

std::vector<CountRow> count_table(const std::vector<ConjClass>& classes,
                                  const std::vector<double>& T_grid, double delta_hat);

struct ClosingResult {
  GroupElement element;
  double period = 0.0;
  double defect = 0.0;  // dynamical matching distance achieved
};

/// Searches the ball for gamma whose action matches the time-t flow of v;
/// accepts when the matching distance is below epsilon and gamma is
/// biproximal.  Returns nothing when no candidate qualifies at this depth.
std::optional<ClosingResult> closing_search(const OrbitBall& ball, const UnitTangent& v,
                                            double t, double epsilon);

struct DirichletResult {
  ProjectivePoint reduced;  // gamma^{-1} x
  GroupElement gamma;
};

/// Greedy nearest-point reduction: repeatedly applies the generator that
/// most decreases d(o, .) until none improves.  Idempotent on its output.
DirichletResult dirichlet_reduce(const GroupPresentation& group, const ConvexDomain& domain,
                                 const ProjectivePoint& o, const ProjectivePoint& x,
                                 int max_steps = 256);

/// The element of the ball realising min d(o, gamma^{-1} x) (exhaustive scan).
DirichletResult dirichlet_reduce_exhaustive(const GroupPresentation& group,
                                            const OrbitBall& ball,
                                            const ConvexDomain& domain,
                                            const ProjectivePoint& o,
                                            const ProjectivePoint& x);

}  // namespace hilbert
