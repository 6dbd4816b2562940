#include "doctest.h"
#include "hilbertflow/flow.hpp"
#include "oracles.hpp"

#include <random>

using namespace hilbert;

namespace {

UnitTangent disk_tangent(const DomainPtr& disk, const Eigen::Vector2d& foot,
                         const Eigen::Vector2d& toward) {
  return tangent_through(disk, oracle::chart2(foot), oracle::chart2(toward));
}

}  // namespace

TEST_CASE("geodesic flow: identity, round trip, distance law") {
  const auto disk = make_unit_ball(2);
  const UnitTangent v = disk_tangent(disk, {0.0, 0.0}, {0.5, 0.0});
  CHECK(geodesic_flow(v, 0.0).foot.approx_equal(v.foot));

  const UnitTangent moved = geodesic_flow(v, 0.5 * std::log(3.0));
  CHECK(moved.foot.approx_equal(oracle::chart2({0.5, 0.0}), 1e-10));
  CHECK(moved.xi_plus.approx_equal(v.xi_plus));

  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = oracle::random_disk_point(rng), b = oracle::random_disk_point(rng);
    if ((a - b).norm() < 0.05) continue;
    const UnitTangent w = disk_tangent(disk, a, b);
    const double t = unif(rng);
    const UnitTangent wt = geodesic_flow(w, t);
    CHECK(disk->hilbert_distance(w.foot, wt.foot) == doctest::Approx(std::abs(t)).epsilon(1e-10));
    CHECK(geodesic_flow(wt, -t).foot.approx_equal(w.foot, 1e-10));
  }
}

TEST_CASE("busemann: ray values, symmetry, closed form on the disk") {
  const auto disk = make_unit_ball(2);
  const auto xi = oracle::chart2({1.0, 0.0});
  // y on [x, xi) gives b = d.
  const auto x = oracle::chart2({-0.3, 0.0});
  const auto y = oracle::chart2({0.6, 0.0});
  const double d = disk->hilbert_distance(x, y);
  CHECK(busemann(*disk, xi, x, y).value == doctest::Approx(d).epsilon(1e-8));
  CHECK(busemann(*disk, xi, x, x).value == doctest::Approx(0.0));

  std::mt19937_64 rng(67);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 100; ++trial) {
    const double th = unif(rng);
    const Eigen::Vector2d dir(std::cos(th), std::sin(th));
    const auto u = oracle::random_disk_point(rng), v = oracle::random_disk_point(rng);
    const double lib = busemann(*disk, oracle::chart2(dir), oracle::chart2(u), oracle::chart2(v));
    CHECK(std::abs(lib - oracle::klein_busemann(dir, u, v)) <= 1e-6);
  }
}

TEST_CASE("busemann cocycle and 1-Lipschitz bound") {
  const auto disk = make_unit_ball(2);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 60; ++trial) {
    const double th = unif(rng);
    const Eigen::Vector2d dir(std::cos(th), std::sin(th));
    const auto xi = oracle::chart2(dir);
    const auto x = oracle::chart2(oracle::random_disk_point(rng));
    const auto y = oracle::chart2(oracle::random_disk_point(rng));
    const auto z = oracle::chart2(oracle::random_disk_point(rng));
    const double bxz = busemann(*disk, xi, x, z);
    const double bxy = busemann(*disk, xi, x, y);
    const double byz = busemann(*disk, xi, y, z);
    CHECK(std::abs(bxz - bxy - byz) <= 1e-6);
    CHECK(std::abs(bxy) <= disk->hilbert_distance(x, y) + 1e-8);
  }
}

TEST_CASE("busemann on the simplex settles and flags vertices as ambiguous") {
  const auto simplex = make_simplex(2);
  Vec xv(3), yv(3);
  xv << 0.3, 0.3, 0.4;
  yv << 0.5, 0.2, 0.3;
  const ProjectivePoint x(xv), y(yv);
  Vec edge(3);
  edge << 0.55, 0.45, 0.0;  // interior of an edge: smooth
  const auto smooth_val = busemann(*simplex, ProjectivePoint(edge), x, y);
  CHECK(!smooth_val.ambiguous);
  CHECK(std::abs(smooth_val.value) <= simplex->hilbert_distance(x, y) + 1e-8);
  const auto vertex_val = busemann(*simplex, ProjectivePoint::basis(0, 3), x, y);
  CHECK(vertex_val.ambiguous);
}

TEST_CASE("shadowed busemann bound d - 4r <= b <= d") {
  const auto disk = make_unit_ball(2);
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  const auto x = oracle::chart2({-0.2, 0.1});
  const auto y = oracle::chart2({0.7, -0.1});
  const double d = disk->hilbert_distance(x, y);
  const double r = 0.4;
  int members = 0;
  for (int trial = 0; trial < 120; ++trial) {
    const double th = unif(rng);
    const auto xi = oracle::chart2({std::cos(th), std::sin(th)});
    std::mt19937_64 mc(1000 + trial);
    if (!disk->shadow_contains({x, y, r, ShadowSpec::Variant::plus}, xi, &mc)) continue;
    ++members;
    const double b = busemann(*disk, xi, x, y);
    CHECK(b >= d - 4.0 * r - 1e-6);
    CHECK(b <= d + 1e-8);
  }
  CHECK(members > 5);
}

TEST_CASE("gromov product identities") {
  const auto disk = make_unit_ball(2);
  std::mt19937_64 rng(79);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 40; ++trial) {
    const double a = unif(rng), b = unif(rng);
    if (std::abs(std::remainder(a - b, 2.0 * M_PI)) < 0.3) continue;
    const auto xi = oracle::chart2({std::cos(a), std::sin(a)});
    const auto eta = oracle::chart2({std::cos(b), std::sin(b)});
    const auto x = oracle::chart2(oracle::random_disk_point(rng, 2.0));
    const auto y = oracle::chart2(oracle::random_disk_point(rng, 2.0));

    // On the chord the product vanishes.
    const Vec mid = 0.5 * (disk->chart_normalize(xi) + disk->chart_normalize(eta));
    CHECK(std::abs(gromov_product(*disk, xi, eta, disk->to_point(mid))) <= 1e-6);

    const double gx = gromov_product(*disk, xi, eta, x);
    const double gy = gromov_product(*disk, xi, eta, y);
    const double bx = busemann(*disk, xi, x, y);
    const double be = busemann(*disk, eta, x, y);
    CHECK(std::abs(2.0 * gx - 2.0 * gy - bx - be) <= 1e-6);            // (Gromov 2)
    CHECK(std::abs(gx - gy) <= disk->hilbert_distance(x, y) + 1e-6);   // (Gromov 3)
    CHECK(gx == doctest::Approx(gromov_product(*disk, eta, xi, x)));   // symmetry, exact
  }
  CHECK_THROWS_WITH_AS(
      gromov_product(*make_simplex(2), ProjectivePoint::basis(0, 3),
                     ProjectivePoint::basis(0, 3), ProjectivePoint(Vec::Ones(3))),
      doctest::Contains("geodesic pair"), std::invalid_argument);
}

TEST_CASE("hopf coordinates: round trip, flow equivariance, flip") {
  const auto disk = make_unit_ball(2);
  const auto o = oracle::chart2({0.05, -0.1});
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> times(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = unif(rng), b = unif(rng);
    if (std::abs(std::remainder(a - b, 2.0 * M_PI)) < 0.4) continue;
    const auto xi = oracle::chart2({std::cos(a), std::sin(a)});
    const auto eta = oracle::chart2({std::cos(b), std::sin(b)});
    const double t = times(rng);

    const UnitTangent v = hopf(disk, o, xi, eta, t);
    const HopfCoord back = hopf_coords(*disk, o, v);
    CHECK(back.t == doctest::Approx(t).epsilon(1e-8));
    CHECK(back.xi.approx_equal(xi));
    CHECK(back.eta.approx_equal(eta));

    const double s = times(rng);
    CHECK(geodesic_flow(v, s).foot.approx_equal(hopf(disk, o, xi, eta, t + s).foot, 1e-7));

    // Flip: -Hopf(xi,eta,t) = Hopf(eta,xi, 2<xi,eta>_o - t).
    const double flip_t = 2.0 * gromov_product(*disk, xi, eta, o) - t;
    CHECK(v.flipped().foot.approx_equal(hopf(disk, o, eta, xi, flip_t).foot, 1e-6));
  }
}

TEST_CASE("hopf equivariance under a fixture isometry") {
  const auto disk = make_unit_ball(2);
  const auto o = oracle::chart2({0.0, 0.0});
  const ProjectiveMap g(oracle::boost_x(0.8) * oracle::rotation_z(0.5));
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = unif(rng), b = unif(rng);
    if (std::abs(std::remainder(a - b, 2.0 * M_PI)) < 0.4) continue;
    const auto xi = oracle::chart2({std::cos(a), std::sin(a)});
    const auto eta = oracle::chart2({std::cos(b), std::sin(b)});
    const double t = 0.7;
    const UnitTangent gv = {disk, apply(g, xi), apply(g, eta),
                            apply(g, hopf(disk, o, xi, eta, t).foot)};
    const double shift = busemann(*disk, eta, apply(g.inverse(), o), o);
    const UnitTangent rhs = hopf(disk, o, apply(g, xi), apply(g, eta), t + shift);
    CHECK(gv.foot.approx_equal(rhs.foot, 1e-6));
  }
}

TEST_CASE("boundary cross-ratio B: degenerate case and interior-limit oracle") {
  const auto disk = make_unit_ball(2);
  auto bd = [&](double th) { return oracle::chart2({std::cos(th), std::sin(th)}); };
  CHECK(std::abs(cross_ratio_B(*disk, bd(0.3), bd(0.3), bd(2.1), bd(4.0))) <= 1e-9);

  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> unif(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 10; ++trial) {
    double th[4];
    bool ok = true;
    for (int i = 0; i < 4; ++i) {
      th[i] = unif(rng);
      for (int j = 0; j < i; ++j) {
        if (std::abs(std::remainder(th[i] - th[j], 2.0 * M_PI)) < 0.5) ok = false;
      }
    }
    if (!ok) continue;
    const double lib = cross_ratio_B(*disk, bd(th[0]), bd(th[1]), bd(th[2]), bd(th[3]));
    // Interior-limit oracle: push points toward the boundary along rays from
    // the center and take the distance combination.
    const double depth = 12.0;
    auto push = [&](double theta) { return oracle::disk_point(theta, depth); };
    const auto x0 = push(th[0]), x1 = push(th[1]), y0 = push(th[2]), y1 = push(th[3]);
    const double approx = oracle::klein_distance(x0, y0) + oracle::klein_distance(x1, y1) -
                          oracle::klein_distance(x0, y1) - oracle::klein_distance(x1, y0);
    CHECK(std::abs(lib - approx) <= 1e-4);
  }
}

TEST_CASE("period identity B(x+, x-, xi, g xi) = 2 ell(g)") {
  const auto disk = make_unit_ball(2);
  const double s = 1.3;
  const ProjectiveMap g(oracle::boost_x(s));
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> unif(0.3, 2.0 * M_PI - 0.3);
  std::vector<double> values;
  for (int trial = 0; trial < 20; ++trial) {
    const double th = unif(rng);
    if (std::abs(std::sin(th)) < 0.15) continue;
    const auto xi = oracle::chart2({std::cos(th), std::sin(th)});
    values.push_back(period_check(*disk, g, xi));
    CHECK(values.back() == doctest::Approx(2.0 * s).epsilon(1e-6));
    CHECK(period_check(*disk, g.inverse(), xi) == doctest::Approx(2.0 * s).epsilon(1e-6));
  }
  REQUIRE(values.size() > 10);
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  CHECK(*mx - *mn <= 1e-6);
}

TEST_CASE("B is invariant under fixture isometries") {
  const auto disk = make_unit_ball(2);
  const ProjectiveMap g(oracle::rotation_z(0.9) * oracle::boost_x(0.6));
  auto bd = [&](double th) { return oracle::chart2({std::cos(th), std::sin(th)}); };
  const double b0 = cross_ratio_B(*disk, bd(0.2), bd(1.5), bd(3.0), bd(4.7));
  const double b1 = cross_ratio_B(*disk, apply(g, bd(0.2)), apply(g, bd(1.5)),
                                  apply(g, bd(3.0)), apply(g, bd(4.7)));
  CHECK(std::abs(b0 - b1) <= 1e-6);
}

TEST_CASE("strong stable manifolds: horocycle decay") {
  const auto disk = make_unit_ball(2);
  const auto xi = oracle::chart2({1.0, 0.0});
  const UnitTangent v = disk_tangent(disk, {0.0, 0.0}, {0.5, 0.0});

  // Same vector: identically zero.
  const auto zeros = stable_distance(v, v, {0.0, 2.0, 5.0});
  for (double z : zeros) CHECK(z <= 1e-12);

  // Horocycle through the origin at xi: (1-y1)^2 = 1 - |y|^2.
  const double y1 = 0.1;
  const Eigen::Vector2d y(y1, std::sqrt(2.0 * y1 * (1.0 - y1)));
  const Vec yv = disk->chart_normalize(oracle::chart2(y));
  const Vec xiv = disk->chart_normalize(xi);
  const auto [ba, bb] =
      disk->ray_boundary(oracle::chart2(y), disk->to_point(yv + 0.001 * (xiv - yv)));
  const UnitTangent hw{disk, ba, xi, oracle::chart2(y)};

  const std::vector<double> grid = {0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  const auto decay = stable_distance(v, hw, grid);
  for (size_t i = 1; i < decay.size(); ++i) CHECK(decay[i] <= decay[i - 1] + 1e-6);
  CHECK(decay.back() < 1e-3);

  // Violating the common-horosphere precondition raises.
  const UnitTangent off = geodesic_flow(hw, 0.05);
  CHECK_THROWS_AS(stable_distance(v, off, grid), std::invalid_argument);
}
