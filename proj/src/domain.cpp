#include "hilbertflow/domain.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace hilbert {

namespace {

constexpr double kFaceTol = 1e-9;

// Stable roots of A v^2 + 2 B v + C = 0; returns (big-magnitude, small) pair.
std::pair<double, double> stable_quadratic(double A, double B, double C) {
  const double disc = B * B - A * C;
  if (disc < 0.0) throw std::runtime_error("chord solve: no real intersection");
  const double s = B >= 0.0 ? 1.0 : -1.0;
  const double Q = -(B + s * std::sqrt(disc));
  return {Q / A, C / Q};
}

double chord_log_ratio(double u_a, double u_b) {
  // Hilbert cross-ratio on the chord p(u) = x + u(y-x), x at 0, y at 1.
  return 0.5 * std::log(((1.0 - u_a) * u_b) / ((-u_a) * (u_b - 1.0)));
}

}  // namespace

Vec ConvexDomain::chart_normalize(const ProjectivePoint& p) const {
  const double s = chart_.dot(p.coords());
  if (std::abs(s) <= 1e-12 * chart_.norm()) {
    throw std::invalid_argument("chart_normalize: point at infinity of the chart");
  }
  return p.coords() / s;
}

ProjectivePoint ConvexDomain::to_point(const Vec& chart_coords) const {
  return ProjectivePoint(chart_coords);
}

ContainsResult ConvexDomain::contains(const ProjectivePoint& p) const {
  Vec xc;
  try {
    xc = chart_normalize(p);
  } catch (const std::invalid_argument&) {
    return {false, false};
  }
  const double gap = signed_gap(xc);
  const bool near = std::abs(gap) < tol::near_boundary;
  return {gap > 0.0 && !near, near};
}

bool ConvexDomain::strictly_inside(const ProjectivePoint& p) const {
  try {
    return signed_gap(chart_normalize(p)) > 0.0;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

AnchoredChord ConvexDomain::chord_near_boundary(const Vec& x, const Vec& xi,
                                                const Vec& y, double delta) const {
  // Naive fallback: accurate only down to the backend's boundary-solve
  // tolerance; exact backends override with anchored evaluations.
  const Vec z = xi + delta * (y - xi);
  const ChordRoots roots = chord_roots(x, z);
  return {roots.u_a, roots.u_b - 1.0};
}

std::pair<ProjectivePoint, ProjectivePoint> ConvexDomain::ray_boundary(
    const ProjectivePoint& x, const ProjectivePoint& y) const {
  if (!strictly_inside(x) || !strictly_inside(y)) {
    throw std::invalid_argument("ray_boundary: endpoints must lie in the open domain");
  }
  const Vec xc = chart_normalize(x), yc = chart_normalize(y);
  if ((yc - xc).norm() <= 1e-14 * yc.norm()) {
    throw std::invalid_argument("ray_boundary: x and y coincide");
  }
  const ChordRoots roots = chord_roots(xc, yc);
  const Vec w = yc - xc;
  return {to_point(xc + roots.u_a * w), to_point(xc + roots.u_b * w)};
}

double ConvexDomain::hilbert_distance(const ProjectivePoint& x,
                                      const ProjectivePoint& y) const {
  const Vec xc = chart_normalize(x), yc = chart_normalize(y);
  if ((yc - xc).norm() <= 1e-14 * (xc.norm() + yc.norm())) return 0.0;
  if (!strictly_inside(x) || !strictly_inside(y)) {
    throw std::invalid_argument("hilbert_distance: points must lie in the open domain");
  }
  const ChordRoots roots = chord_roots(xc, yc);
  return chord_log_ratio(roots.u_a, roots.u_b);
}

double ConvexDomain::distance_to_segment(const ProjectivePoint& a,
                                         const ProjectivePoint& b,
                                         const ProjectivePoint& y) const {
  if (!strictly_inside(y)) {
    throw std::invalid_argument("distance_to_segment: y must lie in the open domain");
  }
  const Vec ac = chart_normalize(a), bc = chart_normalize(b);
  const Vec yc = chart_normalize(y);
  const Vec w = bc - ac;
  bool meets = false;
  for (int k = 0; k <= 64 && !meets; ++k) {
    meets = strictly_inside(to_point(ac + (k / 64.0) * w));
  }
  if (!meets) throw std::invalid_argument("distance_to_segment: segment misses the domain");
  return segment_distance_chart(ac, bc, yc);
}

double ConvexDomain::segment_distance_chart(const Vec& ac, const Vec& bc,
                                            const Vec& yc) const {
  const Vec w = bc - ac;
  auto interior = [&](double t) { return strictly_inside(to_point(ac + t * w)); };

  // Clip the segment to the open domain.
  double t_seed = -1.0;
  for (int k = 0; k <= 64; ++k) {
    const double t = k / 64.0;
    if (interior(t)) {
      t_seed = t;
      break;
    }
  }
  if (t_seed < 0.0) throw std::invalid_argument("distance_to_segment: segment misses the domain");
  double lo = 0.0, hi = 1.0;
  if (!interior(0.0)) {
    double out = 0.0, in = t_seed;
    for (int i = 0; i < 50; ++i) {
      const double mid = 0.5 * (out + in);
      (interior(mid) ? in : out) = mid;
    }
    lo = in;
  }
  if (!interior(1.0)) {
    double in = t_seed, out = 1.0;
    for (int i = 0; i < 50; ++i) {
      const double mid = 0.5 * (out + in);
      (interior(mid) ? in : out) = mid;
    }
    hi = in;
  }

  auto f = [&](double t) {
    const Vec p = ac + t * w;
    if ((p - yc).norm() <= 1e-14 * yc.norm()) return 0.0;
    const ChordRoots roots = chord_roots(yc, p);
    return chord_log_ratio(roots.u_a, roots.u_b);
  };

  // Hilbert balls are convex, so t -> d(p(t), y) is unimodal: ternary search,
  // then a short golden-section polish.
  double l = lo, r = hi;
  for (int i = 0; i < 200 && (r - l) > 1e-10; ++i) {
    const double m1 = l + (r - l) / 3.0, m2 = r - (r - l) / 3.0;
    if (f(m1) <= f(m2)) {
      r = m2;
    } else {
      l = m1;
    }
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double gl = l, gr = r;
  double t1 = gr - phi * (gr - gl), t2 = gl + phi * (gr - gl);
  double f1 = f(t1), f2 = f(t2);
  for (int i = 0; i < 60 && (gr - gl) > 1e-12; ++i) {
    if (f1 <= f2) {
      gr = t2;
      t2 = t1;
      f2 = f1;
      t1 = gr - phi * (gr - gl);
      f1 = f(t1);
    } else {
      gl = t1;
      t1 = t2;
      f1 = f2;
      t2 = gl + phi * (gr - gl);
      f2 = f(t2);
    }
  }
  return std::min({f(0.5 * (gl + gr)), f1, f2});
}

bool ConvexDomain::shadow_contains(const ShadowSpec& spec, const ProjectivePoint& xi,
                                   std::mt19937_64* rng, int n_samples) const {
  auto hits = [&](const ProjectivePoint& from) {
    return distance_to_segment(from, xi, spec.y) < spec.r;
  };
  if (spec.variant == ShadowSpec::Variant::plain) return hits(spec.x);

  // Monte-Carlo over z in B(x, r): radial Hilbert distance and chart
  // direction drawn uniformly (documented approximation).
  std::mt19937_64 local(12345);
  std::mt19937_64& gen = rng ? *rng : local;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Vec xc = chart_normalize(spec.x);
  const int n = ambient_dim();
  for (int k = 0; k < n_samples; ++k) {
    Vec w(n);
    for (int i = 0; i < n; ++i) w[i] = gauss(gen);
    w -= (chart_.dot(w) / chart_.squaredNorm()) * chart_;
    if (w.norm() < 1e-12) {
      --k;
      continue;
    }
    w.normalize();
    const ChordRoots roots = chord_roots(xc, xc + w);
    const double A = -roots.u_a, B = roots.u_b;
    const double E = std::exp(2.0 * spec.r * unif(gen));
    const double u_z = A * B * (E - 1.0) / (B + E * A);
    const bool h = hits(to_point(xc + u_z * w));
    if (spec.variant == ShadowSpec::Variant::plus && h) return true;
    if (spec.variant == ShadowSpec::Variant::minus && !h) return false;
  }
  return spec.variant == ShadowSpec::Variant::minus;
}

std::pair<Vec, double> ConvexDomain::ray_point(const Vec& x, const Vec& xi,
                                               double t) const {
  // Backward boundary parameter along the chord from x away from xi.
  const Vec back = 2.0 * x - xi;
  const ChordRoots roots = chord_roots(x, back);
  const double A = roots.u_b;  // = -u_a of the chord toward xi
  const double E = std::exp(2.0 * t);
  const double delta = (1.0 + A) / (1.0 + E * A);
  return {xi + delta * (x - xi), delta};
}

double ConvexDomain::distance_to_anchored(const Vec& x, const Vec& xi, const Vec& y,
                                          double delta) const {
  const AnchoredChord c = chord_near_boundary(x, xi, y, delta);
  return 0.5 * std::log(((1.0 - c.u_a) * (1.0 + c.forward_gap)) /
                        ((-c.u_a) * c.forward_gap));
}

// ---------------------------------------------------------------------------
// Ellipsoid backend

namespace {

class EllipsoidDomain final : public ConvexDomain {
 public:
  EllipsoidDomain(Mat form, Vec chart) : ConvexDomain(std::move(chart)), q_(std::move(form)) {
    q_ = 0.5 * (q_ + q_.transpose());
    const int n = ambient_dim();
    Eigen::SelfAdjointEigenSolver<Mat> eig(q_);
    int neg = 0;
    for (int i = 0; i < n; ++i) neg += eig.eigenvalues()[i] < 0.0;
    if (neg != 1) {
      throw std::invalid_argument("ellipsoid: form must have Lorentzian signature (d,1)");
    }
    // Bounded in the chart: the form restricted to chart directions must be
    // positive definite.
    Mat chart_row = chart_.transpose();
    Mat kernel = chart_row.fullPivLu().kernel();
    Mat restricted = kernel.transpose() * q_ * kernel;
    Eigen::SelfAdjointEigenSolver<Mat> reig(restricted);
    if (reig.eigenvalues().minCoeff() <= 0.0) {
      throw std::invalid_argument("ellipsoid: domain unbounded in the given chart");
    }
    q_inverse_ = q_.inverse();
  }

  double signed_gap(const Vec& xc) const override {
    const double q = xc.dot(q_ * xc);
    Vec grad = 2.0 * q_ * xc;
    grad -= (grad.dot(chart_) / chart_.squaredNorm()) * chart_;
    return -q / std::max(grad.norm(), 1e-300);
  }

  ChordRoots chord_roots(const Vec& x, const Vec& y) const override {
    const Vec w = y - x;
    const double A = w.dot(q_ * w);
    const double B = x.dot(q_ * w);
    const double C = x.dot(q_ * x);
    auto [big, small] = stable_quadratic(A, B, C);
    return {std::min(big, small), std::max(big, small)};
  }

  AnchoredChord chord_near_boundary(const Vec& x, const Vec& xi, const Vec& y,
                                    double delta) const override {
    const Vec z = xi + delta * (y - xi);
    const Vec w = z - x;
    const double A = w.dot(q_ * w);
    const double B = z.dot(q_ * w);
    // q(z) anchored at q(xi) = 0: exact in delta, no cancellation.
    const Vec dy = y - xi;
    const double C = delta * (2.0 * xi.dot(q_ * dy) + delta * dy.dot(q_ * dy));
    auto [big, small] = stable_quadratic(A, B, C);
    const double v_minus = std::min(big, small);
    const double v_plus = std::max(big, small);
    return {1.0 + v_minus, v_plus};
  }

  // Point-to-segment distance in closed form for P(R^3): the Lorentz pole of
  // the chord gives sinh of the distance to the full geodesic; the projected
  // foot decides whether an interior endpoint binds instead.
  double segment_distance_chart(const Vec& p, const Vec& q, const Vec& y) const override {
    if (ambient_dim() != 3) return ConvexDomain::segment_distance_chart(p, q, y);
    const Eigen::Vector3d pv(p[0], p[1], p[2]), qv(q[0], q[1], q[2]);
    const Vec cross3 = (Vec(3) << pv.y() * qv.z() - pv.z() * qv.y(),
                        pv.z() * qv.x() - pv.x() * qv.z(),
                        pv.x() * qv.y() - pv.y() * qv.x())
                           .finished();
    Vec w = q_inverse_ * cross3;
    const double qw = w.dot(q_ * w);
    if (!(qw > 1e-14 * w.squaredNorm())) {
      return ConvexDomain::segment_distance_chart(p, q, y);
    }
    w /= std::sqrt(qw);
    const double qy = y.dot(q_ * y);
    const Vec yhat = y / std::sqrt(-qy);
    const double s = yhat.dot(q_ * w);
    const double d_line = std::asinh(std::abs(s));
    Vec foot = yhat - s * w;
    const double foot_chart = chart_.dot(foot);
    if (!(std::abs(foot_chart) > 1e-14 * foot.norm())) {
      return ConvexDomain::segment_distance_chart(p, q, y);
    }
    foot /= foot_chart;
    const Vec dir = q - p;
    const double t = (foot - p).dot(dir) / dir.squaredNorm();
    auto endpoint_distance = [&](const Vec& e) {
      if (signed_gap(e) <= tol::near_boundary) return d_line;  // ideal endpoint
      const ChordRoots roots = chord_roots(y, e);
      return 0.5 * std::log(((1.0 - roots.u_a) * roots.u_b) /
                            ((-roots.u_a) * (roots.u_b - 1.0)));
    };
    if (t <= 0.0) return endpoint_distance(p);
    if (t >= 1.0) return endpoint_distance(q);
    return d_line;
  }

  bool exact_segment_distance() const override { return ambient_dim() == 3; }

  std::optional<Mat> quadratic_form() const override { return q_; }

  BoundaryPoint boundary_classify(const ProjectivePoint& xi) const override {
    return {xi, Flag::yes, Flag::yes, Flag::yes, 0.0};
  }

  SimplicialDistance simplicial_distance(const ProjectivePoint& xi,
                                         const ProjectivePoint& eta) const override {
    return xi.approx_equal(eta) ? SimplicialDistance::finite(0)
                                : SimplicialDistance::infinite();
  }

 private:
  Mat q_;
  Mat q_inverse_;
};

// ---------------------------------------------------------------------------
// Polyhedral backends (simplex, polygon, frozen orbit hull)

class PolyhedralDomain : public ConvexDomain {
 public:
  PolyhedralDomain(Vec chart, std::vector<Vec> facets)
      : ConvexDomain(std::move(chart)), facets_(std::move(facets)) {
    for (Vec& f : facets_) {
      Vec restricted = f - (f.dot(chart_) / chart_.squaredNorm()) * chart_;
      const double norm = restricted.norm();
      if (norm <= 0.0) throw std::invalid_argument("polyhedral: degenerate facet");
      f /= norm;
    }
  }

  double signed_gap(const Vec& xc) const override {
    double min_f = std::numeric_limits<double>::infinity();
    for (const Vec& f : facets_) min_f = std::min(min_f, f.dot(xc));
    return min_f;
  }

  ChordRoots chord_roots(const Vec& x, const Vec& y) const override {
    const Vec w = y - x;
    double u_a = -std::numeric_limits<double>::infinity();
    double u_b = std::numeric_limits<double>::infinity();
    for (const Vec& f : facets_) {
      const double fx = f.dot(x), fw = f.dot(w);
      if (std::abs(fw) < 1e-15 * std::abs(fx)) continue;
      const double u = -fx / fw;
      if (u > 0.0) {
        u_b = std::min(u_b, u);
      } else {
        u_a = std::max(u_a, u);
      }
    }
    if (!std::isfinite(u_a) || !std::isfinite(u_b)) {
      throw std::runtime_error("chord solve: line does not exit the domain");
    }
    return {u_a, u_b};
  }

  AnchoredChord chord_near_boundary(const Vec& x, const Vec& xi, const Vec& y,
                                    double delta) const override {
    const int k = static_cast<int>(facets_.size());
    std::vector<double> fz(k);
    const double scale = xi.cwiseAbs().maxCoeff();
    for (int i = 0; i < k; ++i) {
      double fxi = facets_[i].dot(xi);
      if (std::abs(fxi) < kFaceTol * scale) fxi = 0.0;  // xi sits on this facet
      fz[i] = (1.0 - delta) * fxi + delta * facets_[i].dot(y);
    }
    const Vec z = xi + delta * (y - xi);
    double v_minus = -std::numeric_limits<double>::infinity();
    double v_plus = std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
      const double denom = facets_[i].dot(x) - fz[i];
      if (std::abs(denom) < 1e-300) continue;
      const double v = fz[i] / denom;
      if (v > 0.0) {
        v_plus = std::min(v_plus, v);
      } else {
        v_minus = std::max(v_minus, v);
      }
    }
    if (!std::isfinite(v_minus) || !std::isfinite(v_plus)) {
      throw std::runtime_error("chord solve: line does not exit the domain");
    }
    return {1.0 + v_minus, v_plus};
  }

 protected:
  std::vector<Vec> facets_;  // f . x > 0 inside, chart-gradient normalised
};

class SimplexDomain final : public PolyhedralDomain {
 public:
  explicit SimplexDomain(int d)
      : PolyhedralDomain(Vec::Ones(d + 1), make_facets(d + 1)), d_(d) {}

  std::vector<int> support(const ProjectivePoint& p) const {
    const Vec xc = chart_normalize(p);
    const double scale = xc.cwiseAbs().maxCoeff();
    std::vector<int> s;
    for (int i = 0; i < xc.size(); ++i) {
      if (xc[i] > kFaceTol * scale) s.push_back(i);
    }
    return s;
  }

  SimplicialDistance simplicial_distance(const ProjectivePoint& xi,
                                         const ProjectivePoint& eta) const override {
    if (xi.approx_equal(eta)) return SimplicialDistance::finite(0);
    const auto sx = support(xi), se = support(eta);
    const int n = d_ + 1;
    if (static_cast<int>(sx.size()) >= n || static_cast<int>(se.size()) >= n) {
      throw std::invalid_argument("simplicial_distance: points must lie on the boundary");
    }
    // BFS over facets (vertex subsets of size d); consecutive chain segments
    // live in facets sharing a vertex.
    std::vector<unsigned> facets;
    for (int skip = 0; skip < n; ++skip) facets.push_back(((1u << n) - 1u) & ~(1u << skip));
    auto mask = [](const std::vector<int>& s) {
      unsigned m = 0;
      for (int i : s) m |= 1u << i;
      return m;
    };
    const unsigned mx = mask(sx), me = mask(se);
    std::deque<std::pair<int, int>> queue;  // facet index, chain length so far
    std::vector<char> seen(facets.size(), 0);
    for (size_t i = 0; i < facets.size(); ++i) {
      if ((mx & ~facets[i]) == 0u) {
        queue.emplace_back(static_cast<int>(i), 1);
        seen[i] = 1;
      }
    }
    while (!queue.empty()) {
      auto [fi, len] = queue.front();
      queue.pop_front();
      if ((me & ~facets[fi]) == 0u) return SimplicialDistance::finite(len);
      for (size_t j = 0; j < facets.size(); ++j) {
        if (!seen[j] && (facets[fi] & facets[j]) != 0u) {
          seen[j] = 1;
          queue.emplace_back(static_cast<int>(j), len + 1);
        }
      }
    }
    return SimplicialDistance::infinite();
  }

  BoundaryPoint boundary_classify(const ProjectivePoint& xi) const override {
    const auto s = support(xi);
    const int n = d_ + 1;
    if (static_cast<int>(s.size()) >= n) {
      throw std::invalid_argument("boundary_classify: point not on the boundary");
    }
    BoundaryPoint out{xi, Flag::no, Flag::no, Flag::no, 0.0};
    out.smooth = (static_cast<int>(s.size()) == d_) ? Flag::yes : Flag::no;
    out.extremal = (s.size() == 1) ? Flag::yes : Flag::no;
    out.strongly_extremal = Flag::no;
    return out;
  }

  std::optional<double> face_distance(const ProjectivePoint& xi,
                                      const ProjectivePoint& eta) const override {
    const auto sx = support(xi), se = support(eta);
    if (sx != se) return xi.approx_equal(eta) ? std::optional<double>(0.0) : std::nullopt;
    if (sx.size() == 1) return 0.0;
    const Vec a = chart_normalize(xi), b = chart_normalize(eta);
    double best = 0.0;
    for (int i : sx) {
      for (int j : se) {
        best = std::max(best, std::log((a[i] * b[j]) / (a[j] * b[i])));
      }
    }
    return 0.5 * best;
  }

 private:
  static std::vector<Vec> make_facets(int n) {
    std::vector<Vec> fs;
    for (int i = 0; i < n; ++i) {
      Vec f = Vec::Zero(n);
      f[i] = 1.0;
      fs.push_back(std::move(f));
    }
    return fs;
  }
  int d_;
};

std::vector<Eigen::Vector2d> sort_ccw(std::vector<Eigen::Vector2d> vs) {
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : vs) c += v;
  c /= static_cast<double>(vs.size());
  std::sort(vs.begin(), vs.end(), [&](const auto& l, const auto& r) {
    return std::atan2(l.y() - c.y(), l.x() - c.x()) <
           std::atan2(r.y() - c.y(), r.x() - c.x());
  });
  return vs;
}

std::vector<Vec> polygon_facets(const std::vector<Eigen::Vector2d>& vs) {
  const size_t m = vs.size();
  Eigen::Vector2d c = Eigen::Vector2d::Zero();
  for (const auto& v : vs) c += v;
  c /= static_cast<double>(m);
  std::vector<Vec> fs;
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d p = vs[i], q = vs[(i + 1) % m];
    Eigen::Vector2d n(q.y() - p.y(), p.x() - q.x());
    Vec f(3);
    f << n.x(), n.y(), -n.dot(p);
    if (f[0] * c.x() + f[1] * c.y() + f[2] < 0.0) f = -f;
    fs.push_back(std::move(f));
  }
  return fs;
}

class PolygonDomain : public PolyhedralDomain {
 public:
  explicit PolygonDomain(std::vector<Eigen::Vector2d> vertices)
      : PolyhedralDomain(unit_z(), polygon_facets(vertices)), vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw std::invalid_argument("polygon: need >= 3 vertices");
  }

  const std::vector<Eigen::Vector2d>& vertices() const { return vertices_; }

  // Edges (with closures) containing a boundary point; empty if interior.
  std::vector<int> carrier_edges(const ProjectivePoint& p) const {
    const Vec xc = chart_normalize(p);
    std::vector<int> out;
    for (size_t i = 0; i < facets_.size(); ++i) {
      if (std::abs(facets_[i].dot(xc)) < kFaceTol) out.push_back(static_cast<int>(i));
    }
    return out;
  }

  SimplicialDistance simplicial_distance(const ProjectivePoint& xi,
                                         const ProjectivePoint& eta) const override {
    if (xi.approx_equal(eta)) return SimplicialDistance::finite(0);
    const auto ex = carrier_edges(xi), ee = carrier_edges(eta);
    if (ex.empty() || ee.empty()) {
      throw std::invalid_argument("simplicial_distance: points must lie on the boundary");
    }
    const int m = static_cast<int>(facets_.size());
    // BFS on the edge cycle; a chain of k boundary segments uses k edges.
    std::vector<int> dist(m, -1);
    std::deque<int> queue;
    for (int e : ex) {
      dist[e] = 1;
      queue.push_back(e);
    }
    while (!queue.empty()) {
      const int e = queue.front();
      queue.pop_front();
      for (int nb : {(e + 1) % m, (e + m - 1) % m}) {
        if (dist[nb] < 0) {
          dist[nb] = dist[e] + 1;
          queue.push_back(nb);
        }
      }
    }
    int best = std::numeric_limits<int>::max();
    for (int e : ee) best = std::min(best, dist[e]);
    return SimplicialDistance::finite(best);
  }

  BoundaryPoint boundary_classify(const ProjectivePoint& xi) const override {
    const auto edges = carrier_edges(xi);
    if (edges.empty()) {
      throw std::invalid_argument("boundary_classify: point not on the boundary");
    }
    BoundaryPoint out{xi, Flag::no, Flag::no, Flag::no, 0.0};
    if (edges.size() >= 2) {
      out.smooth = Flag::no;  // vertex: two supporting lines
      out.extremal = Flag::yes;
    } else {
      out.smooth = Flag::yes;  // interior of a boundary segment
      out.extremal = Flag::no;
    }
    out.strongly_extremal = Flag::no;
    return out;
  }

  std::optional<double> face_distance(const ProjectivePoint& xi,
                                      const ProjectivePoint& eta) const override {
    if (xi.approx_equal(eta)) return 0.0;
    const auto ex = carrier_edges(xi), ee = carrier_edges(eta);
    if (ex.size() != 1 || ee.size() != 1 || ex[0] != ee[0]) return std::nullopt;
    const int e = ex[0];
    const int m = static_cast<int>(vertices_.size());
    const Eigen::Vector2d p = vertices_[e], q = vertices_[(e + 1) % m];
    const Vec a = chart_normalize(xi), b = chart_normalize(eta);
    const Eigen::Vector2d dir = q - p;
    const double tx = (Eigen::Vector2d(a[0], a[1]) - p).dot(dir) / dir.squaredNorm();
    const double te = (Eigen::Vector2d(b[0], b[1]) - p).dot(dir) / dir.squaredNorm();
    return 0.5 * std::abs(std::log((te * (1.0 - tx)) / (tx * (1.0 - te))));
  }

 private:
  static Vec unit_z() {
    Vec c(3);
    c << 0.0, 0.0, 1.0;
    return c;
  }
  std::vector<Eigen::Vector2d> vertices_;
};

std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) {
    return l.x() < r.x() || (l.x() == r.x() && l.y() < r.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const auto& l, const auto& r) { return (l - r).norm() < 1e-12; }),
            pts.end());
  const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a,
                        const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  const size_t n = pts.size();
  if (n < 3) throw std::invalid_argument("convex hull: need >= 3 distinct points");
  std::vector<Eigen::Vector2d> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-14) --k;
    hull[k++] = pts[i];
  }
  const size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 1e-14) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  if (hull.size() < 3) throw std::invalid_argument("convex hull: points are collinear");
  return hull;
}

class OrbitHullDomain final : public PolygonDomain {
 public:
  explicit OrbitHullDomain(const std::vector<Eigen::Vector2d>& points)
      : PolygonDomain(convex_hull(points)) {}

  // Boundary queries by bisection against hull membership, to 1e-9 in chart
  // coordinates.
  ChordRoots chord_roots(const Vec& x, const Vec& y) const override {
    const Vec w = y - x;
    auto inside = [&](double u) {
      const Vec p = x + u * w;
      double min_f = std::numeric_limits<double>::infinity();
      for (const Vec& f : facets_) min_f = std::min(min_f, f.dot(p) / p[2]);
      return min_f > 0.0;
    };
    const double scale = std::max(w.head(2).norm(), 1e-12);
    auto bisect = [&](double sign) {
      double in = 0.0, out = sign;
      for (int i = 0; i < 60 && inside(out); ++i) {
        in = out;
        out *= 2.0;
      }
      while ((std::abs(out - in)) * scale > 1e-9) {
        const double mid = 0.5 * (in + out);
        (inside(mid) ? in : out) = mid;
      }
      return 0.5 * (in + out);
    };
    return {bisect(-1.0), bisect(1.0)};
  }

  SimplicialDistance simplicial_distance(const ProjectivePoint&,
                                         const ProjectivePoint&) const override {
    return SimplicialDistance::unknown();
  }

  std::optional<double> face_distance(const ProjectivePoint&,
                                      const ProjectivePoint&) const override {
    return std::nullopt;
  }

  BoundaryPoint boundary_classify(const ProjectivePoint& xi) const override {
    // Truncated hulls cannot certify regularity; report unknown with the
    // exterior angle at the nearest hull vertex as a support-cone hint.
    BoundaryPoint out{xi, Flag::unknown, Flag::unknown, Flag::unknown, 0.0};
    const Vec xc = chart_normalize(xi);
    const Eigen::Vector2d p(xc[0], xc[1]);
    const auto& vs = vertices();
    const size_t m = vs.size();
    size_t nearest = 0;
    for (size_t i = 1; i < m; ++i) {
      if ((vs[i] - p).norm() < (vs[nearest] - p).norm()) nearest = i;
    }
    if ((vs[nearest] - p).norm() < 1e-6) {
      const Eigen::Vector2d a = (vs[(nearest + m - 1) % m] - vs[nearest]).normalized();
      const Eigen::Vector2d b = (vs[(nearest + 1) % m] - vs[nearest]).normalized();
      out.support_cone_width = M_PI - std::acos(std::clamp(a.dot(b), -1.0, 1.0));
    }
    return out;
  }

  std::array<double, 3> busemann_schedule() const override { return {2.0, 3.5, 5.0}; }

  double busemann_spread_tolerance() const override { return 1e-3; }
};

}  // namespace

DomainPtr make_ellipsoid(const Mat& form, const Vec& chart) {
  return std::make_shared<EllipsoidDomain>(form, chart);
}

DomainPtr make_unit_ball(int d) {
  Mat q = Mat::Identity(d + 1, d + 1);
  q(d, d) = -1.0;
  Vec c = Vec::Zero(d + 1);
  c[d] = 1.0;
  return std::make_shared<EllipsoidDomain>(q, c);
}

DomainPtr make_simplex(int d) { return std::make_shared<SimplexDomain>(d); }

DomainPtr make_polytope(const std::vector<Eigen::Vector2d>& vertices) {
  return std::make_shared<PolygonDomain>(sort_ccw(vertices));
}

DomainPtr make_orbit_hull(const std::vector<Eigen::Vector2d>& points) {
  return std::make_shared<OrbitHullDomain>(points);
}

std::vector<Eigen::Vector2d> dual_polytope(const std::vector<Eigen::Vector2d>& vertices) {
  const auto sorted = sort_ccw(vertices);
  for (const Vec& f : polygon_facets(sorted)) {
    if (f[2] <= 1e-12) {
      throw std::invalid_argument("dual_polytope: chart origin is not an interior point");
    }
  }
  std::vector<Eigen::Vector2d> dual;
  const size_t m = sorted.size();
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d p = sorted[i], q = sorted[(i + 1) % m];
    Eigen::Matrix2d lhs;
    lhs << p.x(), p.y(), q.x(), q.y();
    const Eigen::Vector2d u = lhs.colPivHouseholderQr().solve(Eigen::Vector2d::Ones());
    dual.push_back(u);
  }
  return sort_ccw(dual);
}

const std::vector<Eigen::Vector2d>& polygon_vertices(const ConvexDomain& domain) {
  const auto* poly = dynamic_cast<const PolygonDomain*>(&domain);
  if (!poly) throw std::invalid_argument("polygon_vertices: not a polygon-backed domain");
  return poly->vertices();
}

}  // namespace hilbert
