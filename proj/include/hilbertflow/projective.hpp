#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hilbert {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

namespace tol {
// Relative singular-value threshold for the rank-2 collinearity test.
inline constexpr double collinear = 1e-9;
// Relative spectral gap required to declare a map proximal.
inline constexpr double spectral_gap = 1e-8;
// Allowed imaginary part of a "real" top eigenvalue, relative to its modulus.
inline constexpr double spectral_imag = 1e-10;
// Chart-coordinate tolerance below which a point counts as sitting on the
// boundary of a domain.
inline constexpr double near_boundary = 1e-10;
// Matrix-entry rounding grid used to deduplicate group elements.
inline constexpr double dedup = 1e-8;
}  // namespace tol

/// A point of P(V): a nonzero vector of length d+1 modulo scale,
/// canonicalized to unit Euclidean norm with the first nonzero coordinate
/// positive.  Canonical coordinates are unique per ray, so points compare
/// by coordinates.
class ProjectivePoint {
 public:
  explicit ProjectivePoint(Vec coords);

  const Vec& coords() const { return coords_; }
  int ambient_dim() const { return static_cast<int>(coords_.size()); }

  bool approx_equal(const ProjectivePoint& other, double tolerance = 1e-9) const;

  /// i-th standard basis ray in R^n.
  static ProjectivePoint basis(int i, int n);
  /// Point from chart coordinates (appends homogeneous coordinate 1).
  static ProjectivePoint from_chart(const Vec& chart_coords);

 private:
  Vec coords_;
};

/// Spectral data of a projective map: eigenvalue moduli, singular values,
/// the lengths ell = log(lambda_1/lambda_{d+1})/2 and
/// kappa = log(mu_1/mu_{d+1})/2, proximality flags and fixed points.
struct SpectralClass {
  std::vector<double> eigen_moduli;     // sorted descending
  std::vector<double> singular_values;  // sorted descending
  double ell = 0.0;
  double kappa = 0.0;
  bool proximal = false;
  bool biproximal = false;
  // Set when the spectral gap sits within 10x of the decision threshold;
  // borderline classifications are reported rather than silently guessed.
  bool gap_borderline = false;
  std::optional<ProjectivePoint> x_plus;   // attracting fixed point, if proximal
  std::optional<ProjectivePoint> x_minus;  // repelling fixed point, if biproximal
  std::optional<Mat> x_zero;               // invariant complement basis (columns)
  bool x_zero_ambiguous = false;
};

/// An invertible projective map: a (d+1)x(d+1) matrix modulo scale,
/// canonicalized to |det| = 1 (det = +1 when d+1 is odd; otherwise the sign
/// is fixed by making the first nonzero entry positive).
class ProjectiveMap {
 public:
  explicit ProjectiveMap(Mat m);

  static ProjectiveMap identity(int n);
  /// Product of canonical maps: |det| = 1 is inherited, so the scale
  /// normalisation (unreliable for huge ill-conditioned products) is skipped.
  static ProjectiveMap from_canonical(Mat m);

  const Mat& matrix() const { return m_; }
  int ambient_dim() const { return static_cast<int>(m_.rows()); }

  ProjectiveMap inverse() const;
  ProjectiveMap operator*(const ProjectiveMap& rhs) const;

  bool approx_equal(const ProjectiveMap& other, double tolerance = 1e-9) const;

 private:
  void canonical_sign();
  Mat m_;
};

/// Cross-ratio [a,x,y,b] of four collinear points, normalised so that
/// [0,1,t,inf] = t in any affine coordinate on the line.  The Hilbert
/// metric is d(x,y) = log([a,x,y,b])/2 for a,x,y,b aligned in this order.
double cross_ratio(const ProjectivePoint& a, const ProjectivePoint& x,
                   const ProjectivePoint& y, const ProjectivePoint& b);

/// Rank-2 test on stacked coordinates: true when all points lie on one
/// projective line (relative singular-value threshold tol::collinear).
bool collinear(std::span<const ProjectivePoint> points,
               double tolerance = tol::collinear);

/// Affine coordinate t of p on the line through a and b, with p = (1-t)a + tb
/// in a fixed affine chart of the line (t=0 at a, t=1 at b).
double collinear_param(const ProjectivePoint& a, const ProjectivePoint& b,
                       const ProjectivePoint& p);

ProjectivePoint apply(const ProjectiveMap& g, const ProjectivePoint& p);

/// Full spectral classification: eigenvalue moduli, singular values,
/// ell, kappa, proximality and fixed points.
SpectralClass classify_map(const ProjectiveMap& g);

/// ell(g) = log(lambda_1/lambda_{d+1})/2 over eigenvalue moduli; equals the
/// infimal displacement inf_x d(x, gx) when g preserves a properly convex set.
double translation_length(const ProjectiveMap& g);

}  // namespace hilbert
