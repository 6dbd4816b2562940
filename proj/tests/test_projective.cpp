#include "doctest.h"
#include "hilbertflow/projective.hpp"
#include "oracles.hpp"

#include <random>

using namespace hilbert;

namespace {

ProjectivePoint line_point(double u) {
  Vec v(3);
  v << u, 0.0, 1.0;
  return ProjectivePoint(v);
}

ProjectivePoint line_infinity() {
  Vec v(3);
  v << 1.0, 0.0, 0.0;
  return ProjectivePoint(v);
}

Mat random_invertible(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) m(i, j) = gauss(rng);
    }
    if (std::abs(m.determinant()) > 0.1) return m;
  }
}

}  // namespace

TEST_CASE("cross-ratio normalisation [0,1,t,inf] = t") {
  for (double t : {0.3, 2.0, 7.5, -4.0}) {
    CHECK(cross_ratio(line_point(0), line_point(1), line_point(t), line_infinity()) ==
          doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("cross-ratio coincidence and hand values") {
  CHECK(cross_ratio(line_point(-1), line_point(0.2), line_point(0.2), line_point(1)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cross_ratio(line_point(-1), line_point(0), line_point(0.5), line_point(1)) ==
        doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("cross-ratio rejects degenerate and non-collinear tuples") {
  CHECK_THROWS_WITH_AS(
      cross_ratio(line_point(0), line_point(1), line_point(2), line_point(0)),
      doctest::Contains("degenerate"), std::invalid_argument);
  Vec off(3);
  off << 0.5, 1.0, 1.0;
  CHECK_THROWS_WITH_AS(
      cross_ratio(line_point(0), line_point(1), ProjectivePoint(off), line_point(2)),
      doctest::Contains("not collinear"), std::invalid_argument);
}

TEST_CASE("cross-ratio projective invariance on random collinear quadruples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec base(3), dir(3);
    for (int i = 0; i < 3; ++i) {
      base[i] = unif(rng);
      dir[i] = unif(rng);
    }
    if (dir.norm() < 0.1) continue;
    Eigen::Vector3d b3(base[0], base[1], base[2]), d3(dir[0], dir[1], dir[2]);
    if (b3.cross(d3).norm() < 0.05) continue;
    double u[4] = {-2.0 - unif(rng), -0.5 + 0.3 * unif(rng), 0.5 + 0.3 * unif(rng),
                   2.0 + unif(rng)};
    ProjectivePoint pts[4] = {
        ProjectivePoint(base + u[0] * dir), ProjectivePoint(base + u[1] * dir),
        ProjectivePoint(base + u[2] * dir), ProjectivePoint(base + u[3] * dir)};
    const double cr = cross_ratio(pts[0], pts[1], pts[2], pts[3]);
    ProjectiveMap g(random_invertible(rng, 3));
    const double cr_g = cross_ratio(apply(g, pts[0]), apply(g, pts[1]), apply(g, pts[2]),
                                    apply(g, pts[3]));
    CHECK(std::abs(cr_g - cr) <= 1e-9 * std::max(1.0, std::abs(cr)));
  }
}

TEST_CASE("cross-ratio cocycle along a line") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  for (int trial = 0; trial < 200; ++trial) {
    const double x = -1.0 + unif(rng), y = x + 0.2 * unif(rng), z = y + 0.2 * unif(rng);
    const double lhs = cross_ratio(line_point(-2), line_point(x), line_point(y), line_point(2)) *
                       cross_ratio(line_point(-2), line_point(y), line_point(z), line_point(2));
    const double rhs = cross_ratio(line_point(-2), line_point(x), line_point(z), line_point(2));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
  }
}

TEST_CASE("spectral classification of diagonal and rotation maps") {
  Mat d421 = Eigen::Vector3d(4.0, 2.0, 1.0).asDiagonal();
  const SpectralClass s = classify_map(ProjectiveMap(d421));
  CHECK(s.ell == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(s.proximal);
  CHECK(s.biproximal);
  CHECK(s.x_plus->approx_equal(ProjectivePoint::basis(0, 3)));
  CHECK(s.x_minus->approx_equal(ProjectivePoint::basis(2, 3)));

  Mat d211 = Eigen::Vector3d(2.0, 1.0, 1.0).asDiagonal();
  const SpectralClass s2 = classify_map(ProjectiveMap(d211));
  CHECK(s2.proximal);
  CHECK(!s2.biproximal);

  const SpectralClass s3 = classify_map(ProjectiveMap(oracle::rotation_z(0.7)));
  CHECK(!s3.proximal);
  CHECK(s3.ell == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("SO(2,1) boost has translation length s") {
  for (double s : {0.5, 1.0, 2.3}) {
    CHECK(translation_length(ProjectiveMap(oracle::boost_x(s))) ==
          doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("translation length: identity, conjugation invariance, powers") {
  CHECK(translation_length(ProjectiveMap::identity(3)) == doctest::Approx(0.0));
  std::mt19937_64 rng(3);
  const ProjectiveMap g(Mat(Eigen::Vector3d(4.0, 2.0, 1.0).asDiagonal()));
  for (int trial = 0; trial < 20; ++trial) {
    const ProjectiveMap h(random_invertible(rng, 3));
    const ProjectiveMap conj = h * g * h.inverse();
    CHECK(translation_length(conj) == doctest::Approx(std::log(2.0)).epsilon(1e-8));
  }
  ProjectiveMap pow = g;
  for (int n = 2; n <= 5; ++n) {
    pow = pow * g;
    CHECK(translation_length(pow) == doctest::Approx(n * std::log(2.0)).epsilon(1e-10));
  }
}

TEST_CASE("kappa dominates ell; equality for normal maps") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SpectralClass s = classify_map(ProjectiveMap(random_invertible(rng, 4)));
    CHECK(s.kappa >= s.ell - 1e-10);
  }
  const SpectralClass sd = classify_map(ProjectiveMap(Mat(Eigen::Vector3d(4.0, 2.0, 1.0).asDiagonal())));
  CHECK(sd.kappa == doctest::Approx(sd.ell).epsilon(1e-12));
}

TEST_CASE("collinear_param endpoints and midpoint") {
  const auto a = line_point(-0.4), b = line_point(1.7);
  CHECK(collinear_param(a, b, a) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(collinear_param(a, b, b) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(collinear_param(a, b, line_point(0.65)) == doctest::Approx(0.5).epsilon(1e-10));
  Vec off(3);
  off << 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(collinear_param(a, b, ProjectivePoint(off)), std::invalid_argument);
}

TEST_CASE("apply: identity, fixed eigenline, matrix action, composition") {
  const ProjectiveMap g(Mat(Eigen::Vector3d(4.0, 2.0, 1.0).asDiagonal()));
  const ProjectivePoint e2 = ProjectivePoint::basis(1, 3);
  CHECK(apply(ProjectiveMap::identity(3), e2).approx_equal(e2));
  CHECK(apply(g, e2).approx_equal(e2));
  Vec ones(3);
  ones << 1.0, 1.0, 1.0;
  Vec img(3);
  img << 4.0, 2.0, 1.0;
  CHECK(apply(g, ProjectivePoint(ones)).approx_equal(ProjectivePoint(img)));

  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const ProjectiveMap a(random_invertible(rng, 3)), b(random_invertible(rng, 3));
    const ProjectivePoint p(random_invertible(rng, 3).col(0));
    CHECK(apply(a * b, p).approx_equal(apply(a, apply(b, p)), 1e-9));
    CHECK(apply(a, apply(a.inverse(), p)).approx_equal(p, 1e-9));
  }
}
