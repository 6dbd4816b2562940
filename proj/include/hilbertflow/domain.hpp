#pragma once

#include "hilbertflow/projective.hpp"

#include <array>
#include <memory>
#include <random>

namespace hilbert {

enum class Flag { no, yes, unknown };

/// Boundary point with regularity flags.  On an ellipsoid all flags are yes;
/// on polyhedral backends the face lattice decides; orbit-hull backends
/// report unknown together with a numeric support-cone-width hint.
struct BoundaryPoint {
  ProjectivePoint point;
  Flag smooth = Flag::unknown;
  Flag extremal = Flag::unknown;
  Flag strongly_extremal = Flag::unknown;
  double support_cone_width = 0.0;  // hint for unknown backends (radians)
};

struct ContainsResult {
  bool inside = false;
  bool near_boundary = false;
};

struct ShadowSpec {
  enum class Variant { plain, plus, minus };
  ProjectivePoint x;  // viewpoint
  ProjectivePoint y;  // target center
  double r = 1.0;
  Variant variant = Variant::plain;
};

struct SimplicialDistance {
  enum class Kind { finite, infinite, unknown };
  Kind kind = Kind::unknown;
  int value = 0;  // meaningful when kind == finite

  static SimplicialDistance finite(int k) { return {Kind::finite, k}; }
  static SimplicialDistance infinite() { return {Kind::infinite, 0}; }
  static SimplicialDistance unknown() { return {Kind::unknown, 0}; }
  bool at_least(int k) const {
    return kind == Kind::infinite || (kind == Kind::finite && value >= k);
  }
};

/// Chord parameters for the line p(u) = x + u (y - x) through two interior
/// chart points: the backward boundary hit at u_a <= 0 and the forward hit
/// at u_b >= 1.
struct ChordRoots {
  double u_a = 0.0;
  double u_b = 0.0;
};

/// Chord through interior x and the point z = xi + delta (y - xi) hanging
/// just inside the boundary anchor xi.  Parametrised as p(v) = z + v (z - x);
/// the forward gap v_b (tiny, positive) is carried with full relative
/// precision so Busemann sampling stays accurate at large depth.
struct AnchoredChord {
  double u_a = 0.0;       // backward root in p(u) = x + u (z - x)
  double forward_gap = 0.0;  // v_b, distance past z in units of |z - x|
};

/// A properly convex open set, bounded in the affine chart {c . x = 1},
/// with the geometric queries the constructions need: membership, chord
/// endpoints, Hilbert distance, shadows, face structure.  Immutable after
/// construction; all queries are pure.
class ConvexDomain {
 public:
  virtual ~ConvexDomain() = default;

  int ambient_dim() const { return static_cast<int>(chart_.size()); }
  const Vec& chart() const { return chart_; }

  /// Chart-normalised coordinates (c . x = 1); throws if x lies on the
  /// chart's hyperplane at infinity.
  Vec chart_normalize(const ProjectivePoint& p) const;
  ProjectivePoint to_point(const Vec& chart_coords) const;

  /// Signed chart distance to the boundary (approximate; positive inside).
  virtual double signed_gap(const Vec& chart_point) const = 0;

  /// Open-set membership with a near-boundary flag: points within
  /// tol::near_boundary of the boundary report false with the flag set, so
  /// callers see a warning instead of exploding distances.
  ContainsResult contains(const ProjectivePoint& p) const;

  /// Plain sign test for the open set, used by the geometric kernels.
  bool strictly_inside(const ProjectivePoint& p) const;

  /// Boundary roots of the chord through chart-normalised x, y.
  virtual ChordRoots chord_roots(const Vec& x, const Vec& y) const = 0;

  /// Stable chord solve anchored at boundary point xi; see AnchoredChord.
  virtual AnchoredChord chord_near_boundary(const Vec& x, const Vec& xi,
                                            const Vec& y, double delta) const;

  /// Busemann sampling depths; backends with crude boundary solvers use
  /// shallower schedules.
  virtual std::array<double, 3> busemann_schedule() const { return {10.0, 20.0, 40.0}; }

  /// Extrapolation spread above which Busemann evaluation reports failure.
  virtual double busemann_spread_tolerance() const { return 1e-6; }

  /// (a, b) on the boundary with a, x, y, b aligned in this order.
  std::pair<ProjectivePoint, ProjectivePoint> ray_boundary(const ProjectivePoint& x,
                                                           const ProjectivePoint& y) const;

  double hilbert_distance(const ProjectivePoint& x, const ProjectivePoint& y) const;

  /// min over the segment [a, b] cap Omega of d(., y), by ternary search
  /// (Hilbert balls are convex, so the restriction is unimodal).
  double distance_to_segment(const ProjectivePoint& a, const ProjectivePoint& b,
                             const ProjectivePoint& y) const;

  /// Kernel behind distance_to_segment, on chart-normalised inputs whose
  /// segment is known to meet the domain.  Ellipsoids in P(R^3) answer in
  /// closed form; the default runs the clipped ternary search.
  virtual double segment_distance_chart(const Vec& p, const Vec& q, const Vec& y) const;

  /// True when segment_distance_chart is exact (no line-search tolerance).
  virtual bool exact_segment_distance() const { return false; }

  /// The defining quadratic form, for backends that have one.
  virtual std::optional<Mat> quadratic_form() const { return std::nullopt; }

  /// Shadow membership.  The plain variant is exact up to the line-search
  /// tolerance; plus/minus are Monte-Carlo with n_samples ball points.
  bool shadow_contains(const ShadowSpec& spec, const ProjectivePoint& xi,
                       std::mt19937_64* rng = nullptr, int n_samples = 64) const;

  virtual SimplicialDistance simplicial_distance(const ProjectivePoint& /*xi*/,
                                                 const ProjectivePoint& /*eta*/) const {
    return SimplicialDistance::unknown();
  }

  virtual BoundaryPoint boundary_classify(const ProjectivePoint& xi) const = 0;

  /// Hilbert distance between boundary points on a common open face,
  /// computed recursively on the face; unknown elsewhere.
  virtual std::optional<double> face_distance(const ProjectivePoint& /*xi*/,
                                              const ProjectivePoint& /*eta*/) const {
    return std::nullopt;
  }

  /// Point at Hilbert distance t from x toward the boundary point xi,
  /// together with its chord offset delta (z = xi + delta (x - xi)).
  std::pair<Vec, double> ray_point(const Vec& x, const Vec& xi, double t) const;

  /// d(x, z) for z = xi + delta (y - xi); stable down to delta ~ 1e-300.
  double distance_to_anchored(const Vec& x, const Vec& xi, const Vec& y,
                              double delta) const;

 protected:
  explicit ConvexDomain(Vec chart) : chart_(std::move(chart)) {}
  Vec chart_;
};

using DomainPtr = std::shared_ptr<const ConvexDomain>;

/// Interior of the quadric {q < 0} for a symmetric form with Lorentzian
/// signature (d, 1), bounded in the given chart.
DomainPtr make_ellipsoid(const Mat& form, const Vec& chart);

/// Unit ball in the chart {last coordinate = 1}: the Klein model of
/// hyperbolic d-space.
DomainPtr make_unit_ball(int d);

/// The standard open d-simplex {x_i > 0} in the chart {sum x_i = 1}.
DomainPtr make_simplex(int d);

/// Convex polygon from chart vertices (d = 2); vertices may be listed in any
/// order and are sorted around their centroid.
DomainPtr make_polytope(const std::vector<Eigen::Vector2d>& vertices);

/// Convex hull of a cloud of chart points (d = 2).  Membership tests use the
/// frozen hull; boundary queries go through bisection at 1e-9 chart
/// tolerance.
DomainPtr make_orbit_hull(const std::vector<Eigen::Vector2d>& points);

/// Polar dual polygon.  Requires the chart origin to be an interior point
/// (the designated point of the duality); the double dual returns the input
/// up to vertex permutation.
std::vector<Eigen::Vector2d> dual_polytope(const std::vector<Eigen::Vector2d>& vertices);

/// Vertices of a polygon domain (polytope or frozen orbit hull).
const std::vector<Eigen::Vector2d>& polygon_vertices(const ConvexDomain& domain);

}  // namespace hilbert
