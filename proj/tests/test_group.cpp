#include "doctest.h"
#include "hilbertflow/fixtures.hpp"
#include "hilbertflow/group.hpp"
#include "oracles.hpp"

#include <map>
#include <set>

using namespace hilbert;

TEST_CASE("word balls of free and cyclic groups") {
  const Fixture schottky = make_disk_schottky();
  CHECK(enumerate_ball(schottky.group, 0).size() == 1);
  CHECK(enumerate_ball(schottky.group, 1).size() == 5);
  CHECK(enumerate_ball(schottky.group, 3).size() == 53);  // 1 + 4 + 12 + 36

  const Fixture cyclic = make_cyclic(1.0);
  CHECK(enumerate_ball(cyclic.group, 10).size() == 21);

  CHECK_THROWS_AS(enumerate_ball(schottky.group, 12, 1000), std::runtime_error);
}

TEST_CASE("reflection relations collapse the triangle-group ball") {
  const Fixture tri = make_triangle_reflection(3, 3, 4);
  // Involutive generators stay single (no separate formal inverses).
  CHECK(tri.group.generators().size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(tri.group.inverse_of(i) == i);
  const auto ball = enumerate_ball(tri.group, 6);
  // The free product of three involutions would give 190 words up to length
  // six; the braid relations (r_i r_j)^m = 1 identify many of them.
  CHECK(ball.size() < 190);
  CHECK(ball.size() > 40);
}

TEST_CASE("orbit geometry: identity, displacement vs kappa, linear growth") {
  const Fixture fx = make_disk_schottky();
  const auto ball = orbit(fx.group, fx.domain, fx.basepoint, 5);
  CHECK(ball.entries[0].dist == 0.0);
  // With the basepoint at the disk center, d(o, gamma o) = kappa(gamma)
  // exactly (orthogonal Cartan factors fix o).
  double worst = 0.0;
  for (const auto& e : ball.entries) {
    worst = std::max(worst, std::abs(e.dist - e.element.spectral.kappa));
  }
  CHECK(worst <= 1e-6);
  // Ping-pong: distances grow linearly in word length.
  std::map<size_t, double> min_by_len;
  for (const auto& e : ball.entries) {
    const size_t len = e.element.word.size();
    if (len == 0) continue;
    auto [it, fresh] = min_by_len.try_emplace(len, e.dist);
    if (!fresh) it->second = std::min(it->second, e.dist);
  }
  for (const auto& [len, dmin] : min_by_len) {
    CHECK(dmin >= 0.6 * 2.0 * static_cast<double>(len));
  }
}

TEST_CASE("orbit rejects non-automorphisms") {
  const Fixture fx = make_disk_schottky();
  auto bad = GroupPresentation::from_generators(
      {{"t", (Mat(3, 3) << 1, 0, 0.4, 0, 1, 0, 0, 0, 1).finished()}}, true);
  CHECK_THROWS_WITH_AS(orbit(bad, fx.domain, fx.basepoint, 2),
                       doctest::Contains("not an automorphism"), std::invalid_argument);
}

TEST_CASE("critical exponent: cyclic orbit growth is flat") {
  // Coarse shells (boost 8): the regression window straddles no shell jump,
  // so the estimator reports the true vanishing exponent.
  const Fixture coarse = make_cyclic(8.0);
  const auto est = critical_exponent(orbit(coarse.group, coarse.domain, coarse.basepoint, 2));
  CHECK(est.delta_hat <= 0.02);
  CHECK(est.delta_hat >= -1e-12);
  CHECK(est.consistent);

  // Unit shells keep the finite-size bias of order 1/r_max visible.
  const Fixture fx = make_cyclic(1.0);
  const auto biased = critical_exponent(orbit(fx.group, fx.domain, fx.basepoint, 14));
  CHECK(biased.delta_hat <= 0.12);

  CHECK_THROWS_WITH_AS(critical_exponent(orbit(fx.group, fx.domain, fx.basepoint, 3)),
                       doctest::Contains("insufficient depth"), std::runtime_error);
}

TEST_CASE("poincare series limits and divergence diagnostic shape") {
  const Fixture fx = make_disk_schottky();
  const auto ball = orbit(fx.group, fx.domain, fx.basepoint, 6);
  CHECK(poincare_series(ball, 50.0) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(poincare_series(ball, 0.0) == doctest::Approx(static_cast<double>(ball.size())));
  const auto report = divergence_diagnostic(ball, 0.0, {2, 4, 6});
  REQUIRE(report.partial_sums.size() == 3);
  CHECK(report.partial_sums[0] < report.partial_sums[1]);
  CHECK(report.partial_sums[1] < report.partial_sums[2]);
  CHECK(report.divergence_consistent);
}

namespace {

// Brute-force necklace census of the free group on {a, b}: freely reduced
// words up to the given length, identified by cyclic reduction and rotation.
int necklace_count(int max_len) {
  const int inverse[4] = {1, 0, 3, 2};
  std::set<std::vector<int>> classes;
  std::vector<std::vector<int>> words = {{}};
  classes.insert(std::vector<int>{});
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<int>> next;
    for (const auto& w : words) {
      for (int g = 0; g < 4; ++g) {
        if (!w.empty() && inverse[w.back()] == g) continue;
        auto word = w;
        word.push_back(g);
        next.push_back(word);
        auto cyc = word;
        while (cyc.size() >= 2 && inverse[cyc.front()] == cyc.back()) {
          cyc.erase(cyc.begin());
          cyc.pop_back();
        }
        auto best = cyc;
        auto rot = cyc;
        for (size_t k = 1; k < cyc.size(); ++k) {
          std::rotate(rot.begin(), rot.begin() + 1, rot.end());
          best = std::min(best, rot);
        }
        classes.insert(best);
      }
    }
    words = std::move(next);
  }
  return static_cast<int>(classes.size());
}

}  // namespace

TEST_CASE("conjugacy classes of free fixtures via cyclic reduction") {
  const Fixture fx = make_disk_schottky();
  const auto classes = conjugacy_classes(fx.group, *fx.domain, 3, ConjStrategy::free_cyclic);
  CHECK(static_cast<int>(classes.size()) == necklace_count(3));

  // aab, aba, baa merge into one class of multiplicity three.
  int aab_mult = 0;
  for (const auto& c : classes) {
    if (c.representative.word == std::vector<int>{0, 0, 2}) aab_mult = c.multiplicity;
  }
  CHECK(aab_mult == 3);

  // Cyclic group: classes with ell <= T number 2 floor(T/s) + 1.
  const Fixture cyc = make_cyclic(1.0);
  const auto cyc_classes =
      conjugacy_classes(cyc.group, *cyc.domain, 10, ConjStrategy::free_cyclic);
  const auto rows = count_table(cyc_classes, {5.0}, 0.0);
  CHECK(rows[0].total == 11);

  CHECK_THROWS_AS(conjugacy_classes(make_simplex_lattice().group, *fx.domain, 3,
                                    ConjStrategy::free_cyclic),
                  std::invalid_argument);
}

TEST_CASE("element classification") {
  const auto disk = make_unit_ball(2);
  const auto simplex = make_simplex(2);
  CHECK(classify_element(*disk, classify_map(ProjectiveMap(oracle::boost_x(1.0)))) ==
        ClassKind::rank_one);
  CHECK(classify_element(*simplex, classify_map(ProjectiveMap(
            Mat(Eigen::Vector3d(4, 2, 1).asDiagonal())))) ==
        ClassKind::biproximal_not_rank_one);
  CHECK(classify_element(*disk, classify_map(ProjectiveMap(oracle::rotation_z(0.4)))) ==
        ClassKind::singular);
  // diag(8,8,1)-type elements of the lattice are not proximal: singular.
  const Mat ab = Eigen::Vector3d(8, 8, 1).asDiagonal();
  CHECK(classify_element(*simplex, classify_map(ProjectiveMap(ab))) == ClassKind::singular);
}

TEST_CASE("simplex lattice is a rank-one desert; census is consistent") {
  const Fixture fx = make_simplex_lattice();
  const auto classes = conjugacy_classes(fx.group, *fx.domain, 6, ConjStrategy::charpoly_merge);
  std::vector<double> grid;
  for (int i = 1; i <= 8; ++i) grid.push_back(i * 0.75);
  const auto rows = count_table(classes, grid, 0.0);
  int prev = 0;
  for (const auto& row : rows) {
    CHECK(row.rank_one == 0);
    CHECK(row.total >= prev);
    CHECK(row.rank_one + row.singular + row.biproximal_not_rank_one == row.total);
    prev = row.total;
  }
  CHECK(rows.back().total > 1);
}

TEST_CASE("conjugation invariance of classification and length") {
  const Fixture fx = make_disk_schottky();
  const auto ball = enumerate_ball(fx.group, 4);
  const GroupElement& g = ball.entries[7].element;
  for (size_t i = 1; i < ball.entries.size(); ++i) {
    const GroupElement& h = ball.entries[i].element;
    if (h.word.size() > 2) continue;  // longer conjugators stack condition numbers
    const ProjectiveMap conj = h.map * g.map * h.map.inverse();
    const auto spec = classify_map(conj);
    CHECK(spec.ell == doctest::Approx(g.spectral.ell).epsilon(1e-6));
    CHECK(classify_element(*fx.domain, spec) == classify_element(*fx.domain, g.spectral));
  }
}

TEST_CASE("closing search recovers the generator near its axis") {
  const Fixture fx = make_disk_schottky();  // ell(a) = 2
  const auto ball = orbit(fx.group, fx.domain, fx.basepoint, 5);
  const double s = 2.0;

  const UnitTangent on_axis =
      tangent_through(fx.domain, oracle::chart2({0.0, 0.0}), oracle::chart2({0.5, 0.0}));
  const auto exact = closing_search(ball, on_axis, s, 0.01);
  REQUIRE(exact.has_value());
  CHECK(exact->element.word == std::vector<int>{0});
  CHECK(exact->period == doctest::Approx(s).epsilon(1e-9));

  const UnitTangent perturbed =
      tangent_through(fx.domain, oracle::chart2({0.0, 1e-3}), oracle::chart2({0.5, 1e-3}));
  const auto found = closing_search(ball, perturbed, s, 0.01);
  REQUIRE(found.has_value());
  // The match is a conjugate of a: cyclic reduction leaves the letter a.
  std::vector<int> word = found->element.word;
  const auto inverse = [&](int g) { return fx.group.inverse_of(g); };
  while (word.size() >= 2 && inverse(word.front()) == word.back()) {
    word.erase(word.begin());
    word.pop_back();
  }
  CHECK(word == std::vector<int>{0});
  CHECK(std::abs(found->period - s) <= 1e-2);

  const UnitTangent wandering =
      tangent_through(fx.domain, oracle::chart2({0.3, 0.4}), oracle::chart2({0.5, 0.1}));
  CHECK(!closing_search(ball, wandering, 1.0, 0.01).has_value());
}

TEST_CASE("dirichlet reduction: basepoint, generators, idempotence") {
  const Fixture fx = make_disk_schottky();
  const auto& dom = *fx.domain;
  const auto o = fx.basepoint;

  const auto at_o = dirichlet_reduce(fx.group, dom, o, o);
  CHECK(at_o.gamma.word.empty());
  CHECK(at_o.reduced.approx_equal(o));

  const ProjectivePoint go = apply(fx.group.generators()[0].map, o);
  const auto at_go = dirichlet_reduce(fx.group, dom, o, go);
  CHECK(at_go.reduced.approx_equal(o, 1e-9));
  CHECK(at_go.gamma.word == std::vector<int>{0});

  std::mt19937_64 rng(113);
  for (int trial = 0; trial < 100; ++trial) {
    const ProjectivePoint x = oracle::chart2(oracle::random_disk_point(rng, 3.5));
    const auto first = dirichlet_reduce(fx.group, dom, o, x);
    const auto second = dirichlet_reduce(fx.group, dom, o, first.reduced);
    CHECK(second.gamma.word.empty());
    CHECK(second.reduced.approx_equal(first.reduced, 1e-10));
  }
}

TEST_CASE("builtin fixture specs parse") {
  CHECK(builtin_fixture("disk-schottky").name == "disk-schottky");
  CHECK(builtin_fixture("cyclic:boost=1.5").group.generators().size() == 2);
  CHECK(builtin_fixture("triangle-reflection:p=2,q=3,r=7").group.generators().size() == 3);
  CHECK_THROWS_AS(builtin_fixture("nonsense"), std::invalid_argument);
  CHECK_THROWS_AS(builtin_fixture("disk-schottky:s=1.0,gap=0.5"), std::invalid_argument);
}
