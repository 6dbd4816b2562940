#pragma once

#include "hilbertflow/domain.hpp"

namespace hilbert {

/// A flow line: backward endpoint, forward endpoint and an interior
/// footpoint on the open chord.  The geodesic flow acts in closed form on
/// this data.
struct UnitTangent {
  DomainPtr domain;
  ProjectivePoint xi_minus;
  ProjectivePoint xi_plus;
  ProjectivePoint foot;

  UnitTangent flipped() const { return {domain, xi_plus, xi_minus, foot}; }
};

UnitTangent make_tangent(DomainPtr domain, const ProjectivePoint& xi_minus,
                         const ProjectivePoint& xi_plus, const ProjectivePoint& foot);

/// Tangent through the interior points x (foot) toward y.
UnitTangent tangent_through(DomainPtr domain, const ProjectivePoint& x,
                            const ProjectivePoint& y);

/// Flow by time t: the foot moves Hilbert distance |t| toward xi_plus
/// (t > 0) or xi_minus (t < 0); endpoints are unchanged.
UnitTangent geodesic_flow(const UnitTangent& v, double t);

struct BusemannValue {
  double value = 0.0;
  bool ambiguous = false;  // target not certified smooth: along-ray value only
  double spread = 0.0;     // extrapolation spread across the depth schedule
  operator double() const { return value; }
};

/// Horofunction b_xi(x, y) = lim_{z->xi} d(x,z) - d(y,z), sampled along the
/// ray [y, xi) at the backend's depth schedule with Aitken extrapolation.
/// Throws "busemann divergent" when the samples fail to settle.
BusemannValue busemann(const ConvexDomain& domain, const ProjectivePoint& xi,
                       const ProjectivePoint& x, const ProjectivePoint& y);

/// Gromov product <xi,eta>_x = (b_xi(x,y) + b_eta(x,y)) / 2 with y on the
/// open chord (xi,eta); independent of the choice of y.
double gromov_product(const ConvexDomain& domain, const ProjectivePoint& xi,
                      const ProjectivePoint& eta, const ProjectivePoint& x);

/// True when the open segment (xi, eta) meets the domain.
bool geodesic_pair(const ConvexDomain& domain, const ProjectivePoint& xi,
                   const ProjectivePoint& eta);

struct HopfCoord {
  ProjectivePoint xi;   // backward endpoint
  ProjectivePoint eta;  // forward endpoint
  double t = 0.0;       // b_eta(o, foot)
};

/// Hopf parametrisation based at o: the tangent on the chord (xi -> eta)
/// whose foot satisfies b_eta(o, foot) = t.
UnitTangent hopf(DomainPtr domain, const ProjectivePoint& o, const ProjectivePoint& xi,
                 const ProjectivePoint& eta, double t);
HopfCoord hopf_coords(const ConvexDomain& domain, const ProjectivePoint& o,
                      const UnitTangent& v);

/// The boundary cross-ratio B(xi, xi', eta, eta') computed through Gromov
/// products: B = rho_{xi,eta}(eta') + rho_{xi',eta'}(eta) with
/// rho_{xi,eta}(eta') = 2<xi,eta'>_o - 2<xi,eta>_o.
double cross_ratio_B(const ConvexDomain& domain, const ProjectivePoint& xi,
                     const ProjectivePoint& xi2, const ProjectivePoint& eta,
                     const ProjectivePoint& eta2);

/// B(x_g^+, x_g^-, xi, g xi); equals 2 ell(g) for a biproximal automorphism
/// whose axis meets the domain.
double period_check(const ConvexDomain& domain, const ProjectiveMap& g,
                    const ProjectivePoint& xi);

/// d_{T^1}(phi_t v, phi_t w) along a grid of times, where the distance is
/// max over s in [t, t+1] of the footpoint distances (8 subsamples).
/// Preconditions: common smooth forward endpoint and b_{xi+}(pi v, pi w) = 0
/// within 1e-6.
std::vector<double> stable_distance(const UnitTangent& v, const UnitTangent& w,
                                    const std::vector<double>& t_grid);

}  // namespace hilbert
