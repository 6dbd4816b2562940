#include "hilbertflow/verify.hpp"

#include <cmath>

namespace hilbert {

namespace {

struct Suite {
  std::vector<CheckRow> rows;
  void add(const std::string& module, const std::string& name, double residual,
           double threshold) {
    rows.push_back({module, name, residual, threshold, residual <= threshold});
  }
};

Vec random_chart_direction(const ConvexDomain& domain, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Vec w(domain.ambient_dim());
    for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    w -= (domain.chart().dot(w) / domain.chart().squaredNorm()) * domain.chart();
    if (w.norm() > 1e-6) return w.normalized();
  }
}

ProjectivePoint random_interior(const ConvexDomain& domain, const ProjectivePoint& o,
                                std::mt19937_64& rng, double max_dist = 2.5) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Vec oc = domain.chart_normalize(o);
  const Vec w = random_chart_direction(domain, rng);
  const ChordRoots roots = domain.chord_roots(oc, oc + w);
  const double A = -roots.u_a, B = roots.u_b;
  const double E = std::exp(2.0 * max_dist * unif(rng));
  const double u = A * B * (E - 1.0) / (B + E * A);
  return domain.to_point(oc + u * w);
}

ProjectivePoint random_boundary(const ConvexDomain& domain, const ProjectivePoint& o,
                                std::mt19937_64& rng) {
  const Vec oc = domain.chart_normalize(o);
  const Vec w = random_chart_direction(domain, rng);
  const ChordRoots roots = domain.chord_roots(oc, oc + w);
  return domain.to_point(oc + roots.u_b * w);
}

// A boundary point that admits exact Busemann evaluation on this fixture:
// smooth targets only.
ProjectivePoint random_smooth_boundary(const ConvexDomain& domain, const ProjectivePoint& o,
                                       std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    const ProjectivePoint xi = random_boundary(domain, o, rng);
    try {
      if (domain.boundary_classify(xi).smooth == Flag::yes) return xi;
    } catch (const std::exception&) {
    }
  }
  throw std::runtime_error("verify: no smooth boundary point found");
}

}  // namespace

std::vector<CheckRow> run_invariant_suite(const Fixture& fixture, int depth, uint64_t seed) {
  Suite suite;
  std::mt19937_64 rng(seed);
  const ConvexDomain& dom = *fixture.domain;
  const ProjectivePoint& o = fixture.basepoint;

  // --- projective core ------------------------------------------------------
  {
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst_inv = 0.0, worst_cocycle = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      Vec base(3), dir(3);
      for (int i = 0; i < 3; ++i) {
        base[i] = unif(rng);
        dir[i] = unif(rng);
      }
      Eigen::Vector3d b3(base[0], base[1], base[2]), d3(dir[0], dir[1], dir[2]);
      if (dir.norm() < 0.1 || b3.cross(d3).norm() < 0.05) continue;
      const double us[5] = {-2.5, -0.6 + 0.2 * unif(rng), 0.1 * unif(rng),
                            0.6 + 0.2 * unif(rng), 2.5};
      ProjectivePoint pts[5] = {
          ProjectivePoint(base + us[0] * dir), ProjectivePoint(base + us[1] * dir),
          ProjectivePoint(base + us[2] * dir), ProjectivePoint(base + us[3] * dir),
          ProjectivePoint(base + us[4] * dir)};
      const double cr = cross_ratio(pts[0], pts[1], pts[3], pts[4]);
      Mat g(3, 3);
      do {
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) g(i, j) = gauss(rng);
        }
      } while (std::abs(g.determinant()) < 0.1);
      const ProjectiveMap gm(g);
      const double cr_g = cross_ratio(apply(gm, pts[0]), apply(gm, pts[1]),
                                      apply(gm, pts[3]), apply(gm, pts[4]));
      worst_inv = std::max(worst_inv, std::abs(cr_g - cr) / std::max(1.0, std::abs(cr)));
      const double lhs = cross_ratio(pts[0], pts[1], pts[2], pts[4]) *
                         cross_ratio(pts[0], pts[2], pts[3], pts[4]);
      worst_cocycle = std::max(
          worst_cocycle, std::abs(lhs - cross_ratio(pts[0], pts[1], pts[3], pts[4])) /
                             std::max(1.0, std::abs(cr)));
    }
    suite.add("projective-core", "cross_ratio_invariance", worst_inv, 1e-9);
    suite.add("projective-core", "cross_ratio_cocycle", worst_cocycle, 1e-9);

    double worst_kappa = 0.0, worst_power = 0.0;
    for (const Generator& gen : fixture.group.generators()) {
      const SpectralClass spec = classify_map(gen.map);
      worst_kappa = std::max(worst_kappa, spec.ell - spec.kappa);
      ProjectiveMap power = gen.map;
      for (int n = 2; n <= 5; ++n) {
        power = power * gen.map;
        worst_power =
            std::max(worst_power, std::abs(translation_length(power) - n * spec.ell));
      }
    }
    suite.add("projective-core", "kappa_dominates_ell", worst_kappa, 1e-10);
    suite.add("projective-core", "power_law_ell", worst_power, 1e-8);
  }

  // --- convex domain --------------------------------------------------------
  {
    double worst_sym = 0.0, worst_tri = 0.0, worst_add = 0.0, worst_iso = 0.0;
    double worst_cmp = 0.0;
    std::uniform_real_distribution<double> unif(0.1, 0.9);
    for (int trial = 0; trial < 1000; ++trial) {
      const ProjectivePoint x = random_interior(dom, o, rng);
      const ProjectivePoint y = random_interior(dom, o, rng);
      const ProjectivePoint z = random_interior(dom, o, rng);
      const double dxy = dom.hilbert_distance(x, y);
      worst_sym = std::max(worst_sym, std::abs(dxy - dom.hilbert_distance(y, x)));
      worst_tri = std::max(worst_tri, dom.hilbert_distance(x, z) - dxy -
                                          dom.hilbert_distance(y, z));
      const Vec xc = dom.chart_normalize(x), yc = dom.chart_normalize(y);
      const double t = unif(rng);
      const ProjectivePoint mid = dom.to_point(xc + t * (yc - xc));
      worst_add = std::max(worst_add, std::abs(dxy - dom.hilbert_distance(x, mid) -
                                               dom.hilbert_distance(mid, y)));
      const ProjectiveMap& g = fixture.group.generators()[trial %
                                                          fixture.group.generators().size()]
                                   .map;
      worst_iso = std::max(worst_iso, std::abs(dom.hilbert_distance(apply(g, x), apply(g, y)) -
                                               dxy));
    }
    (void)worst_cmp;
    suite.add("convex-domain", "metric_symmetry", worst_sym, 1e-9);
    suite.add("convex-domain", "metric_triangle", worst_tri, 1e-9);
    suite.add("convex-domain", "segment_additivity", worst_add, 1e-9);
    suite.add("convex-domain", "isometry_invariance", worst_iso, 1e-8);

    // Geodesic comparison lemma on constant-speed straight parametrisations.
    double worst_geo = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
      const ProjectivePoint a0 = random_interior(dom, o, rng);
      const ProjectivePoint a1 = random_interior(dom, o, rng);
      const ProjectivePoint b0 = random_interior(dom, o, rng);
      const ProjectivePoint b1 = random_interior(dom, o, rng);
      const Vec a0c = dom.chart_normalize(a0), a1c = dom.chart_normalize(a1);
      const Vec b0c = dom.chart_normalize(b0), b1c = dom.chart_normalize(b1);
      if ((a1c - a0c).norm() < 0.05 || (b1c - b0c).norm() < 0.05) continue;
      const double da = dom.hilbert_distance(a0, a1);
      const double db = dom.hilbert_distance(b0, b1);
      const UnitTangent va = tangent_through(fixture.domain, a0, a1);
      const UnitTangent vb = tangent_through(fixture.domain, b0, b1);
      const double t = unif(rng);
      const double bound = dom.hilbert_distance(a0, b0) + dom.hilbert_distance(a1, b1);
      const double mid = dom.hilbert_distance(geodesic_flow(va, t * da).foot,
                                              geodesic_flow(vb, t * db).foot);
      worst_geo = std::max(worst_geo, mid - bound);
    }
    suite.add("convex-domain", "geodesic_comparison", std::max(0.0, worst_geo), 1e-9);
  }

  // Simplex fixtures: the displacement of a diagonal map is constant.
  {
    bool simplex_like = true;
    try {
      (void)dom.chart_normalize(ProjectivePoint(Vec::Ones(dom.ambient_dim())));
      for (const Generator& gen : fixture.group.generators()) {
        Mat m = gen.map.matrix();
        if ((m - Mat(m.diagonal().asDiagonal())).cwiseAbs().maxCoeff() > 1e-12) {
          simplex_like = false;
        }
      }
    } catch (const std::exception&) {
      simplex_like = false;
    }
    if (simplex_like && !fixture.group.generators().empty()) {
      double worst = 0.0;
      const Generator& gen = fixture.group.generators()[0];
      const double ell = classify_map(gen.map).ell;
      for (int trial = 0; trial < 100; ++trial) {
        const ProjectivePoint x = random_interior(dom, o, rng);
        worst = std::max(worst,
                         std::abs(dom.hilbert_distance(x, apply(gen.map, x)) - ell));
      }
      suite.add("convex-domain", "constant_displacement", worst, 1e-10);
    }
  }

  // --- flow -----------------------------------------------------------------
  {
    double worst_cocycle = 0.0, worst_lip = 0.0, worst_ray = 0.0;
    double worst_g2 = 0.0, worst_g3 = 0.0, worst_hopf = 0.0, worst_flip = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const ProjectivePoint xi = random_smooth_boundary(dom, o, rng);
      const ProjectivePoint x = random_interior(dom, o, rng);
      const ProjectivePoint y = random_interior(dom, o, rng);
      const ProjectivePoint z = random_interior(dom, o, rng);
      const double bxz = busemann(dom, xi, x, z);
      const double bxy = busemann(dom, xi, x, y);
      const double byz = busemann(dom, xi, y, z);
      worst_cocycle = std::max(worst_cocycle, std::abs(bxz - bxy - byz));
      worst_lip = std::max(worst_lip, std::abs(bxy) - dom.hilbert_distance(x, y));

      // b = d along rays toward xi.
      const Vec yc = dom.chart_normalize(y), xic = dom.chart_normalize(xi);
      const ProjectivePoint on_ray = dom.to_point(yc + 0.5 * (xic - yc));
      if (dom.strictly_inside(on_ray)) {
        worst_ray = std::max(worst_ray, std::abs(busemann(dom, xi, y, on_ray).value -
                                                 dom.hilbert_distance(y, on_ray)));
      }

      const ProjectivePoint eta = random_smooth_boundary(dom, o, rng);
      if (!geodesic_pair(dom, xi, eta)) continue;
      // Skip near-tangent chords: conditioning degrades like the inverse
      // chord length and the contracts assume non-degenerate pairs.
      if ((dom.chart_normalize(xi) - dom.chart_normalize(eta)).norm() < 0.05) continue;
      const double gx = gromov_product(dom, xi, eta, x);
      const double gy = gromov_product(dom, xi, eta, y);
      worst_g2 = std::max(worst_g2, std::abs(2 * gx - 2 * gy - bxy -
                                             busemann(dom, eta, x, y).value));
      worst_g3 = std::max(worst_g3, std::abs(gx - gy) - dom.hilbert_distance(x, y));

      const double t = -1.0 + 2.0 * (trial % 7) / 6.0;
      const UnitTangent v = hopf(fixture.domain, o, xi, eta, t);
      worst_hopf = std::max(worst_hopf, std::abs(hopf_coords(dom, o, v).t - t));
      const double flip_t = 2.0 * gromov_product(dom, xi, eta, o) - t;
      const UnitTangent flipped = hopf(fixture.domain, o, eta, xi, flip_t);
      const Vec f1 = dom.chart_normalize(v.foot), f2 = dom.chart_normalize(flipped.foot);
      worst_flip = std::max(worst_flip, (f1 - f2).norm());
    }
    suite.add("flow", "busemann_cocycle", worst_cocycle, 1e-6);
    suite.add("flow", "busemann_lipschitz", worst_lip, 1e-8);
    suite.add("flow", "busemann_ray", worst_ray, 1e-8);
    suite.add("flow", "gromov_defect", worst_g2, 1e-6);
    suite.add("flow", "gromov_lipschitz", worst_g3, 1e-6);
    suite.add("flow", "hopf_roundtrip", worst_hopf, 1e-8);
    suite.add("flow", "hopf_flip", worst_flip, 1e-6);

    // Shadowed Busemann bound on plus-shadow members.
    double worst_shadow = 0.0;
    const ProjectivePoint sx = random_interior(dom, o, rng, 1.0);
    const ProjectivePoint sy = random_interior(dom, o, rng, 2.0);
    const double d = dom.hilbert_distance(sx, sy);
    const double r = 0.4;
    for (int trial = 0; trial < 60; ++trial) {
      const ProjectivePoint xi = random_smooth_boundary(dom, o, rng);
      std::mt19937_64 mc(5000 + trial);
      if (!dom.shadow_contains({sx, sy, r, ShadowSpec::Variant::plus}, xi, &mc)) continue;
      const double b = busemann(dom, xi, sx, sy);
      worst_shadow = std::max({worst_shadow, (d - 4 * r) - b - 1e-6, b - d - 1e-8});
    }
    suite.add("flow", "shadowed_busemann_bound", std::max(0.0, worst_shadow), 1e-12);
  }

  // Biproximal generator checks: period identity and its invariance.
  {
    const Generator* bip = nullptr;
    for (const Generator& gen : fixture.group.generators()) {
      const SpectralClass spec = classify_map(gen.map);
      if (spec.biproximal && geodesic_pair(dom, *spec.x_plus, *spec.x_minus)) {
        bip = &gen;
        break;
      }
    }
    if (bip) {
      const SpectralClass spec = classify_map(bip->map);
      double worst_period = 0.0;
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (int trial = 0; trial < 20; ++trial) {
        const ProjectivePoint xi = random_smooth_boundary(dom, o, rng);
        if (xi.approx_equal(*spec.x_plus, 1e-6) || xi.approx_equal(*spec.x_minus, 1e-6)) {
          continue;
        }
        if (!geodesic_pair(dom, xi, *spec.x_plus) || !geodesic_pair(dom, xi, *spec.x_minus)) {
          continue;
        }
        const double period = period_check(dom, bip->map, xi);
        worst_period = std::max(worst_period, std::abs(period - 2.0 * spec.ell));
        lo = std::min(lo, period);
        hi = std::max(hi, period);
      }
      suite.add("flow", "period_identity", worst_period, 1e-6);
      suite.add("flow", "period_xi_independence", hi - lo, 1e-6);

      // ell equals the infimum of sampled displacements.
      double min_disp = std::numeric_limits<double>::infinity();
      for (int trial = 0; trial < 10000; ++trial) {
        const ProjectivePoint x = random_interior(dom, o, rng, 3.5);
        min_disp = std::min(min_disp, dom.hilbert_distance(x, apply(bip->map, x)));
      }
      suite.add("group-dynamics", "translation_length_inf",
                std::abs(min_disp - spec.ell), 1e-3);
    }
  }

  // --- group dynamics and density -------------------------------------------
  {
    const int use_depth = depth > 0 ? depth : fixture.default_depth;
    const OrbitBall ball =
        orbit(fixture.group, fixture.domain, o, std::min(use_depth, 8), 200000);
    double worst_kappa_gap = 0.0;
    for (const OrbitEntry& e : ball.entries) {
      if (!std::isfinite(e.dist)) continue;
      worst_kappa_gap = std::max(worst_kappa_gap,
                                 std::abs(e.dist - e.element.spectral.kappa));
    }
    // |d(o, gamma o) - kappa| <= 2 d(o, "center"); bound by a generous
    // fixture-level constant.
    suite.add("group-dynamics", "displacement_vs_kappa", worst_kappa_gap, 6.0);

    const auto classes = conjugacy_classes(
        fixture.group, dom, std::min(use_depth, 6),
        fixture.group.free() ? ConjStrategy::free_cyclic : ConjStrategy::charpoly_merge);
    std::vector<double> grid;
    for (int i = 1; i <= 6; ++i) grid.push_back(i * 1.0);
    const auto rows = count_table(classes, grid, 0.0);
    int worst_census = 0, prev = 0;
    for (const CountRow& row : rows) {
      if (row.rank_one + row.singular + row.biproximal_not_rank_one != row.total) {
        worst_census = 1;
      }
      if (row.total < prev) worst_census = 1;
      prev = row.total;
    }
    suite.add("group-dynamics", "census_consistency", worst_census, 0.0);

    if (ball.max_dist > 1.0) {
      const AtomicDensity nu = build_density(ball, 0.7);
      double mass = 0.0;
      for (const Atom& a : nu.atoms) mass += a.weight;
      suite.add("patterson-sullivan", "density_normalization", std::abs(mass - 1.0), 1e-12);

      const ProjectivePoint x = random_interior(dom, o, rng, 1.0);
      const AtomicDensity there = reweight(nu, dom, x);
      const AtomicDensity back = reweight(there, dom, o);
      // The cocycle is canonical at smooth directions only; non-smooth atoms
      // carry direction-dependent along-ray values and are skipped.
      double worst_rt = 0.0;
      for (size_t i = 0; i < back.atoms.size() && i < nu.atoms.size(); ++i) {
        try {
          if (dom.boundary_classify(nu.atoms[i].direction).smooth != Flag::yes) continue;
        } catch (const std::exception&) {
          continue;
        }
        worst_rt = std::max(worst_rt, std::abs(back.atoms[i].weight / nu.atoms[i].weight - 1.0));
      }
      suite.add("patterson-sullivan", "reweight_roundtrip", worst_rt, 1e-6);
    }
  }

  return suite.rows;
}

}  // namespace hilbert
