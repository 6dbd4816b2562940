#include "hilbertflow/flow.hpp"

#include <cmath>

namespace hilbert {

namespace {

double aitken(double b1, double b2, double b3) {
  const double d1 = b2 - b1, d2 = b3 - b2;
  const double den = d2 - d1;
  if (std::abs(den) <= 1e-14 * (std::abs(d1) + std::abs(d2)) || den == 0.0) return b3;
  return b3 - d2 * d2 / den;
}

// Lexicographic order on canonical coordinates, for symmetric evaluation.
bool point_less(const ProjectivePoint& a, const ProjectivePoint& b) {
  const Vec &u = a.coords(), &v = b.coords();
  for (int i = 0; i < u.size(); ++i) {
    if (u[i] < v[i] - 1e-15) return true;
    if (u[i] > v[i] + 1e-15) return false;
  }
  return false;
}

}  // namespace

UnitTangent make_tangent(DomainPtr domain, const ProjectivePoint& xi_minus,
                         const ProjectivePoint& xi_plus, const ProjectivePoint& foot) {
  if (xi_minus.approx_equal(xi_plus)) {
    throw std::invalid_argument("make_tangent: endpoints coincide");
  }
  if (!domain->strictly_inside(foot)) {
    throw std::invalid_argument("make_tangent: foot must lie in the open domain");
  }
  const ProjectivePoint pts[3] = {xi_minus, xi_plus, foot};
  if (!collinear(pts, 1e-8)) {
    throw std::invalid_argument("make_tangent: foot off the chord");
  }
  return {std::move(domain), xi_minus, xi_plus, foot};
}

UnitTangent tangent_through(DomainPtr domain, const ProjectivePoint& x,
                            const ProjectivePoint& y) {
  auto [a, b] = domain->ray_boundary(x, y);
  return {std::move(domain), a, b, x};
}

UnitTangent geodesic_flow(const UnitTangent& v, double t) {
  if (t == 0.0) return v;
  const ConvexDomain& dom = *v.domain;
  const Vec f = dom.chart_normalize(v.foot);
  const Vec plus = dom.chart_normalize(v.xi_plus);
  const Vec minus = dom.chart_normalize(v.xi_minus);
  const Vec w = plus - f;
  // Chord parameter of xi_minus in p(u) = foot + u (xi_plus - foot); the
  // points are collinear, so the projection is exact.
  const double u_m = (minus - f).dot(w) / w.squaredNorm();
  const double A = -u_m;
  if (!(A > 0.0)) throw std::invalid_argument("geodesic_flow: degenerate chord");
  const double E = std::exp(2.0 * t);
  const double u_z = A * (E - 1.0) / (1.0 + E * A);
  return {v.domain, v.xi_minus, v.xi_plus, dom.to_point(f + u_z * w)};
}

BusemannValue busemann(const ConvexDomain& domain, const ProjectivePoint& xi,
                       const ProjectivePoint& x, const ProjectivePoint& y) {
  if (!domain.strictly_inside(x) || !domain.strictly_inside(y)) {
    throw std::invalid_argument("busemann: x, y must lie in the open domain");
  }
  BusemannValue out;
  try {
    out.ambiguous = domain.boundary_classify(xi).smooth != Flag::yes;
  } catch (const std::exception&) {
    out.ambiguous = true;
  }

  const Vec xc = domain.chart_normalize(x);
  const Vec yc = domain.chart_normalize(y);
  const Vec xic = domain.chart_normalize(xi);
  // xi must be the boundary hit of its own chord from y: u_b = 1.
  const double u_hit = domain.chord_roots(yc, xic).u_b;
  if (std::abs(u_hit - 1.0) > 1e-6) {
    throw std::invalid_argument("busemann: xi must lie on the boundary");
  }
  if ((xc - yc).norm() <= 1e-14 * (xc.norm() + yc.norm())) return out;

  const auto sched = domain.busemann_schedule();
  const double depths[4] = {sched[0], sched[1], sched[2], sched[2] + (sched[2] - sched[1])};
  double b[4];
  for (int i = 0; i < 4; ++i) {
    const auto [z, delta] = domain.ray_point(yc, xic, depths[i]);
    (void)z;
    b[i] = domain.distance_to_anchored(xc, xic, yc, delta) - depths[i];
  }

  const double scale = std::max(1.0, std::abs(b[3]));
  if (std::abs(b[3] - b[2]) <= 1e-11 * scale) {
    out.value = b[3];
    out.spread = std::abs(b[3] - b[2]);
    return out;
  }
  const double a1 = aitken(b[0], b[1], b[2]);
  const double a2 = aitken(b[1], b[2], b[3]);
  out.value = a2;
  out.spread = std::abs(a2 - a1);
  if (out.spread > domain.busemann_spread_tolerance()) {
    throw std::runtime_error("busemann divergent");
  }
  return out;
}

bool geodesic_pair(const ConvexDomain& domain, const ProjectivePoint& xi,
                   const ProjectivePoint& eta) {
  if (xi.approx_equal(eta)) return false;
  Vec a, b;
  try {
    a = domain.chart_normalize(xi);
    b = domain.chart_normalize(eta);
  } catch (const std::invalid_argument&) {
    return false;
  }
  // The open segment either lies in the domain or in the boundary; testing
  // the midpoint decides.  Near-coincident endpoints leave the midpoint
  // within the boundary tolerance and are rejected as degenerate.
  return domain.contains(domain.to_point(0.5 * (a + b))).inside;
}

namespace {

ProjectivePoint chord_interior_point(const ConvexDomain& domain, const ProjectivePoint& xi,
                                     const ProjectivePoint& eta) {
  if (!geodesic_pair(domain, xi, eta)) {
    throw std::invalid_argument("not a geodesic pair");
  }
  const Vec a = domain.chart_normalize(xi), b = domain.chart_normalize(eta);
  return domain.to_point(0.5 * (a + b));
}

}  // namespace

double gromov_product(const ConvexDomain& domain, const ProjectivePoint& xi,
                      const ProjectivePoint& eta, const ProjectivePoint& x) {
  const ProjectivePoint& lo = point_less(xi, eta) ? xi : eta;
  const ProjectivePoint& hi = point_less(xi, eta) ? eta : xi;
  const ProjectivePoint y = chord_interior_point(domain, lo, hi);
  const double b_lo = busemann(domain, lo, x, y).value;
  const double b_hi = busemann(domain, hi, x, y).value;
  return 0.5 * (b_lo + b_hi);
}

UnitTangent hopf(DomainPtr domain, const ProjectivePoint& o, const ProjectivePoint& xi,
                 const ProjectivePoint& eta, double t) {
  const ProjectivePoint y0 = chord_interior_point(*domain, xi, eta);
  const double t0 = busemann(*domain, eta, o, y0).value;
  UnitTangent base{domain, xi, eta, y0};
  // b_eta(o, .) increases by exactly s under the time-s flow (b = d along
  // rays toward eta), so the foot is one closed-form flow step away.
  return geodesic_flow(base, t - t0);
}

HopfCoord hopf_coords(const ConvexDomain& domain, const ProjectivePoint& o,
                      const UnitTangent& v) {
  return {v.xi_minus, v.xi_plus, busemann(domain, v.xi_plus, o, v.foot).value};
}

double cross_ratio_B(const ConvexDomain& domain, const ProjectivePoint& xi,
                     const ProjectivePoint& xi2, const ProjectivePoint& eta,
                     const ProjectivePoint& eta2) {
  for (const auto* p : {&eta, &eta2}) {
    if (!geodesic_pair(domain, xi, *p) || !geodesic_pair(domain, xi2, *p)) {
      throw std::invalid_argument("not a geodesic pair");
    }
  }
  const ProjectivePoint o = chord_interior_point(domain, xi, eta);
  const double rho_1 = 2.0 * gromov_product(domain, xi, eta2, o) -
                       2.0 * gromov_product(domain, xi, eta, o);
  const double rho_2 = 2.0 * gromov_product(domain, xi2, eta, o) -
                       2.0 * gromov_product(domain, xi2, eta2, o);
  return rho_1 + rho_2;
}

double period_check(const ConvexDomain& domain, const ProjectiveMap& g,
                    const ProjectivePoint& xi) {
  const SpectralClass spec = classify_map(g);
  if (!spec.biproximal) throw std::invalid_argument("period_check: map is not biproximal");
  const ProjectivePoint& xp = *spec.x_plus;
  const ProjectivePoint& xm = *spec.x_minus;
  if (!geodesic_pair(domain, xp, xm)) {
    throw std::invalid_argument("period_check: axis misses the domain");
  }
  if (xi.approx_equal(xp) || xi.approx_equal(xm)) {
    throw std::invalid_argument("period_check: xi coincides with a fixed point");
  }
  return cross_ratio_B(domain, xp, xm, xi, apply(g, xi));
}

std::vector<double> stable_distance(const UnitTangent& v, const UnitTangent& w,
                                    const std::vector<double>& t_grid) {
  const ConvexDomain& dom = *v.domain;
  if (!v.xi_plus.approx_equal(w.xi_plus, 1e-8)) {
    throw std::invalid_argument("stable_distance: forward endpoints differ");
  }
  const BusemannValue b = busemann(dom, v.xi_plus, v.foot, w.foot);
  if (b.ambiguous) {
    throw std::invalid_argument("stable_distance: forward endpoint not smooth");
  }
  if (std::abs(b.value) > 1e-6) {
    throw std::invalid_argument("stable_distance: footpoints not on a common horosphere");
  }
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    double best = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double s = t + k / 8.0;
      const ProjectivePoint pv = geodesic_flow(v, s).foot;
      const ProjectivePoint pw = geodesic_flow(w, s).foot;
      best = std::max(best, dom.hilbert_distance(pv, pw));
    }
    out.push_back(best);
  }
  return out;
}

}  // namespace hilbert
