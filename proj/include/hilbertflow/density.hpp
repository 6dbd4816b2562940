#pragma once

#include "hilbertflow/group.hpp"

#include <functional>

namespace hilbert {

struct Atom {
  ProjectivePoint direction;  // boundary hit of the ray o -> gamma o
  double weight = 0.0;
  size_t carrier = 0;       // index of gamma in the source ball
  double carrier_dist = 0.0;  // d(o, gamma o)
};

/// Discretised conformal density: weighted atoms on the boundary, carried by
/// the orbit points of a ball.  Weights are h(d) e^{-s d} normalised to unit
/// mass at build time; reweighting to another basepoint reports the
/// unnormalised mass.
struct AtomicDensity {
  ProjectivePoint basepoint;
  double s = 0.0;
  int depth = 0;
  std::vector<Atom> atoms;
  double total_mass = 0.0;
};

AtomicDensity build_density(const OrbitBall& ball, double s,
                            const std::function<double(double)>& h = {});

struct ReweightStats {
  int excluded = 0;        // atoms dropped on Busemann failure
  int ambiguous = 0;       // atoms at non-smooth directions (along-ray values)
  double total_mass = 0;   // unnormalised mass after the move
};

/// Conformal move of basepoint: weights pick up e^{-s b_xi(x, o)}.
AtomicDensity reweight(const AtomicDensity& density, const ConvexDomain& domain,
                       const ProjectivePoint& x, ReweightStats* stats = nullptr);

struct ShadowRow {
  size_t carrier = 0;
  double dist = 0.0;   // d(o, gamma o)
  double mass = 0.0;   // density mass of O_R(o, gamma o)
  double ratio = 0.0;  // mass * exp(delta_hat * dist)
};

struct ShadowReport {
  double R = 0.0;
  double delta_hat = 0.0;
  std::vector<ShadowRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double log_ratio_slope = 0.0;  // OLS slope of log(ratio) against dist
};

/// Annulus of ball elements whose shadows are measured: word lengths in
/// [min_len, max_len] and d(o, gamma o) >= min_dist.  The defaults
/// (lengths [2, depth/2], distance >= R+1) keep the rows outside both the
/// saturation region d < R and the truncation-starved outer shells.
struct ShadowAnnulus {
  int min_len = 2;
  int max_len = -1;        // -1: depth / 2
  double min_dist = -1.0;  // -1: R + 1
};

/// Atom mass inside the shadows O_R(o, gamma o) for gamma in the annulus.
ShadowReport shadow_lemma_report(const AtomicDensity& density, const OrbitBall& ball,
                                 const ConvexDomain& domain, double R, double delta_hat,
                                 const ShadowAnnulus& annulus = {});

/// Default shadow radius: twice the largest generator displacement at o.
double default_shadow_radius(const GroupPresentation& group, const ConvexDomain& domain,
                             const ProjectivePoint& o);

struct BMSample {
  size_t xi = 0;   // atom index of the backward endpoint
  size_t eta = 0;  // atom index of the forward endpoint
  double t = 0.0;
  double weight = 1.0;
};

struct BMSampleSet {
  std::vector<BMSample> samples;
  double effective_sample_size = 0.0;
  bool exhaustive = false;  // exact pair distribution vs importance weights
};

/// Importance sampling of the flow-invariant measure with Hopf-coordinate
/// density w(xi) w(eta) e^{2 delta <xi,eta>_o} dt.  Exhaustive below 1e6
/// atom pairs, product-proposal importance sampling above.
BMSampleSet bm_sampler(const AtomicDensity& density, const ConvexDomain& domain,
                       double delta_hat, size_t n, double t_window, uint64_t seed);

/// Flow line of a sample, via the Hopf parametrisation at the density's
/// basepoint.
UnitTangent bm_tangent(const AtomicDensity& density, DomainPtr domain,
                       const BMSample& sample);

using Observable = std::function<double(const UnitTangent&)>;

/// Average of f over one period of the closed geodesic of a rank-one class
/// (trapezoidal rule, step <= ell/256).
double geodesic_average(DomainPtr domain, const ConjClass& cls, const Observable& f,
                        int min_steps = 256);

struct EquidistRow {
  double T = 0.0;
  int classes = 0;
  double geodesic_mean = 0.0;
  double geodesic_stderr = 0.0;
  double bm_mean = 0.0;
  double bm_stderr = 0.0;
  double discrepancy = 0.0;
};

/// Per-threshold comparison of closed-geodesic averages against the sampled
/// flow-invariant measure.
std::vector<EquidistRow> equidistribution_report(
    DomainPtr domain, const std::vector<ConjClass>& classes, const AtomicDensity& density,
    const BMSampleSet& samples, const std::vector<double>& T_grid, const Observable& f);

struct MixingPoint {
  double t = 0.0;
  double correlation = 0.0;
  double stderr_ = 0.0;
};

struct MixingCurve {
  std::vector<MixingPoint> points;
  double mass_a = 0.0;
  double mass_b = 0.0;
};

/// Monte-Carlo correlation t -> m(phi_t A cap B) from weighted samples.
MixingCurve mixing_correlation(DomainPtr domain, const AtomicDensity& density,
                               const BMSampleSet& samples, const Observable& indicator_a,
                               const Observable& indicator_b,
                               const std::vector<double>& t_grid);

struct EntropyEstimate {
  double slope = 0.0;     // extrapolated growth rate of log N(t)
  double rate_full = 0.0;  // log N(t) / t
  double rate_half = 0.0;  // log N(t/2) / (t/2)
  int packed_full = 0;
  int packed_half = 0;
};

/// Separated-set entropy: greedy maximal epsilon-packing of the samples
/// under the dynamical metric d^(t) (max footpoint distance over [0, t+1],
/// Dirichlet-reduced at the greedy generator level).
EntropyEstimate entropy_estimate(const GroupPresentation& group, DomainPtr domain,
                                 const ProjectivePoint& o,
                                 const std::vector<UnitTangent>& samples, double t,
                                 double epsilon, double step = 0.25);

/// Diagnostic: weighted fraction of samples inside the dynamical ball
/// around v (no acceptance threshold; variance grows quickly with t).
double dynamical_ball_mass(DomainPtr domain, const AtomicDensity& density,
                           const BMSampleSet& samples, const UnitTangent& v, double r,
                           double t, double step = 0.5);

}  // namespace hilbert
