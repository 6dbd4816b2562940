#include "hilbertflow/group.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

namespace hilbert {

namespace {

// Bucket key: matrix entries on a 1e-6 grid; candidates in the same or an
// adjacent straddling bucket are re-checked against the 1e-8 dedup tolerance.
struct MatrixKey {
  std::vector<int64_t> cells;
  bool operator==(const MatrixKey& o) const { return cells == o.cells; }
};

struct MatrixKeyHash {
  size_t operator()(const MatrixKey& k) const {
    uint64_t h = 1469598103934665603ull;
    for (int64_t c : k.cells) {
      h ^= static_cast<uint64_t>(c);
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

MatrixKey bucket_key(const Mat& m) {
  MatrixKey key;
  key.cells.reserve(m.size());
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < m.rows(); ++i) {
      const double cell = m(i, j) * 1e6;
      key.cells.push_back(std::llround(std::clamp(cell, -4.6e18, 4.6e18)));
    }
  }
  return key;
}

std::vector<int> reduce_word(const GroupPresentation& group, const std::vector<int>& word) {
  std::vector<int> out;
  for (int letter : word) {
    if (!out.empty() && group.inverse_of(out.back()) == letter) {
      out.pop_back();
    } else {
      out.push_back(letter);
    }
  }
  return out;
}

GroupElement element_from_word(const GroupPresentation& group, const std::vector<int>& word) {
  const int n = group.generators()[0].map.ambient_dim();
  Mat m = Mat::Identity(n, n);
  for (int letter : word) m = m * group.generators()[letter].map.matrix();
  ProjectiveMap map = ProjectiveMap::from_canonical(std::move(m));
  SpectralClass spec = classify_map(map);
  return {word, std::move(map), std::move(spec)};
}

}  // namespace

GroupPresentation GroupPresentation::from_generators(
    const std::vector<std::pair<std::string, Mat>>& generators, bool free) {
  GroupPresentation out;
  out.free_ = free;
  for (const auto& [label, raw] : generators) {
    ProjectiveMap g(raw);
    ProjectiveMap ginv = g.inverse();
    const int index = static_cast<int>(out.gens_.size());
    if (ginv.approx_equal(g, 1e-10)) {
      out.gens_.push_back({label, std::move(g), index});
      continue;
    }
    out.gens_.push_back({label, std::move(g), index + 1});
    out.gens_.push_back({label + "^-1", std::move(ginv), index});
  }
  for (const Generator& gen : out.gens_) {
    const ProjectiveMap prod = gen.map * out.gens_[gen.inverse_index].map;
    const double scale = gen.map.matrix().cwiseAbs().maxCoeff();
    const double tolerance = std::max(1e-10, scale * scale * 1e-14);
    if (!prod.approx_equal(ProjectiveMap::identity(prod.ambient_dim()), tolerance)) {
      throw std::invalid_argument("GroupPresentation: inconsistent inverse pair");
    }
  }
  return out;
}

OrbitBall enumerate_ball(const GroupPresentation& group, int depth, size_t cap) {
  if (depth < 0) throw std::invalid_argument("enumerate_ball: negative depth");
  if (group.generators().empty()) {
    throw std::invalid_argument("enumerate_ball: no generators");
  }
  const int n = group.generators()[0].map.ambient_dim();

  OrbitBall ball;
  ball.depth = depth;
  std::unordered_map<MatrixKey, std::vector<int>, MatrixKeyHash> buckets;

  auto is_known = [&](const MatrixKey& key, const ProjectiveMap& map) {
    auto it = buckets.find(key);
    if (it == buckets.end()) return false;
    for (int idx : it->second) {
      if (ball.entries[idx].element.map.approx_equal(map, tol::dedup)) return true;
    }
    return false;
  };

  auto try_insert = [&](GroupElement&& elem) {
    const MatrixKey key = bucket_key(elem.map.matrix());
    if (is_known(key, elem.map)) return;
    const int rows = static_cast<int>(elem.map.matrix().rows());
    for (size_t cell = 0; cell < key.cells.size(); ++cell) {
      const double frac = elem.map.matrix()(static_cast<int>(cell) % rows,
                                            static_cast<int>(cell) / rows) *
                              1e6 -
                          static_cast<double>(key.cells[cell]);
      for (int step : {-1, 1}) {
        if (std::abs(frac - 0.5 * step) > 0.02) continue;
        MatrixKey nb = key;
        nb.cells[cell] += step;
        if (is_known(nb, elem.map)) return;
      }
    }
    buckets[key].push_back(static_cast<int>(ball.entries.size()));
    ball.entries.push_back({std::move(elem), std::numeric_limits<double>::quiet_NaN(), {}});
  };

  try_insert({{}, ProjectiveMap::identity(n), classify_map(ProjectiveMap::identity(n))});

  size_t level_begin = 0, level_end = 1;
  for (int len = 1; len <= depth; ++len) {
    for (size_t i = level_begin; i < level_end; ++i) {
      const GroupElement parent = ball.entries[i].element;  // copy: vector grows
      for (int g = 0; g < static_cast<int>(group.generators().size()); ++g) {
        if (!parent.word.empty() && group.inverse_of(parent.word.back()) == g) continue;
        if (ball.entries.size() >= cap) {
          throw std::runtime_error("enumerate_ball: element cap exceeded");
        }
        std::vector<int> word = parent.word;
        word.push_back(g);
        ProjectiveMap map =
            ProjectiveMap::from_canonical(parent.map.matrix() * group.generators()[g].map.matrix());
        SpectralClass spec = classify_map(map);
        try_insert({std::move(word), std::move(map), std::move(spec)});
      }
    }
    level_begin = level_end;
    level_end = ball.entries.size();
    if (level_begin == level_end) break;  // group exhausted below the depth
  }
  return ball;
}

OrbitBall orbit(const GroupPresentation& group, DomainPtr domain, const ProjectivePoint& o,
                int depth, size_t cap) {
  if (!domain->strictly_inside(o)) {
    throw std::invalid_argument("orbit: basepoint must lie in the open domain");
  }
  std::mt19937_64 rng(424243);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<ProjectivePoint> samples = {o};
  const Vec oc = domain->chart_normalize(o);
  for (int k = 0; k < 8; ++k) {
    Vec w(domain->ambient_dim());
    for (int i = 0; i < w.size(); ++i) w[i] = gauss(rng);
    w -= (domain->chart().dot(w) / domain->chart().squaredNorm()) * domain->chart();
    if (w.norm() < 1e-9) continue;
    w.normalize();
    const ChordRoots roots = domain->chord_roots(oc, oc + w);
    samples.push_back(domain->to_point(oc + (0.8 * roots.u_b) * w));
  }
  for (const Generator& gen : group.generators()) {
    for (const ProjectivePoint& p : samples) {
      if (!domain->strictly_inside(apply(gen.map, p))) {
        throw std::invalid_argument("orbit: not an automorphism of the domain");
      }
    }
  }

  OrbitBall ball = enumerate_ball(group, depth, cap);
  ball.domain = domain;
  ball.basepoint = o;
  for (OrbitEntry& entry : ball.entries) {
    const ProjectivePoint image = apply(entry.element.map, o);
    if (image.approx_equal(o, 1e-12)) {
      entry.dist = 0.0;
      continue;
    }
    if (!domain->strictly_inside(image)) {
      // Orbit point beyond the double-precision horizon (chart coordinates
      // saturate onto the boundary near Hilbert distance 18): keep the entry
      // with infinite distance; the saturated image is its own direction.
      entry.dist = std::numeric_limits<double>::infinity();
      entry.direction = image;
      ball.saturated += 1;
      continue;
    }
    entry.dist = domain->hilbert_distance(o, image);
    entry.direction = domain->ray_boundary(o, image).second;
    ball.max_dist = std::max(ball.max_dist, entry.dist);
  }
  return ball;
}

namespace {

struct Regression {
  double slope = 0.0;
  double stderr_ = 0.0;
  int points = 0;
};

Regression fit_log_counts(const std::vector<double>& values, double lo, double hi,
                          int grid_points) {
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> rs, logs;
  for (int k = 0; k < grid_points; ++k) {
    const double r = lo + (hi - lo) * k / (grid_points - 1);
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), r);
    const auto count = static_cast<double>(it - sorted.begin());
    if (count < 2) continue;
    rs.push_back(r);
    logs.push_back(std::log(count));
  }
  Regression out;
  out.points = static_cast<int>(rs.size());
  if (out.points < 3) return out;
  const double n = out.points;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < out.points; ++i) {
    sx += rs[i];
    sy += logs[i];
    sxx += rs[i] * rs[i];
    sxy += rs[i] * logs[i];
  }
  const double denom = n * sxx - sx * sx;
  out.slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - out.slope * sx) / n;
  double ss_res = 0;
  for (int i = 0; i < out.points; ++i) {
    const double resid = logs[i] - (intercept + out.slope * rs[i]);
    ss_res += resid * resid;
  }
  const double var = ss_res / std::max(1.0, n - 2.0);
  out.stderr_ = std::sqrt(var * n / denom);
  return out;
}

}  // namespace

ExponentEstimate critical_exponent(const OrbitBall& ball) {
  if (ball.entries.empty() || !(ball.max_dist >= 5.0)) {
    throw std::runtime_error("critical_exponent: insufficient depth");
  }
  std::vector<double> dists, kappas;
  for (const OrbitEntry& e : ball.entries) {
    if (std::isnan(e.dist)) {
      throw std::runtime_error("critical_exponent: ball carries no geometry");
    }
    if (!std::isfinite(e.dist)) continue;
    dists.push_back(e.dist);
    kappas.push_back(e.element.spectral.kappa);
  }
  const double r_max = ball.max_dist;
  const Regression rd = fit_log_counts(dists, r_max / 2.0, r_max - 1.0, 25);
  const double k_max = *std::max_element(kappas.begin(), kappas.end());
  const Regression rk = fit_log_counts(kappas, k_max / 2.0, k_max - 1.0, 25);
  if (rd.points < 3 || rk.points < 3) {
    throw std::runtime_error("critical_exponent: insufficient depth");
  }
  ExponentEstimate out;
  out.delta_hat = rd.slope;
  out.stderr_ = rd.stderr_;
  out.delta_kappa = rk.slope;
  out.stderr_kappa = rk.stderr_;
  out.shells = rd.points;
  out.consistent = std::abs(rd.slope - rk.slope) <= rd.stderr_ + rk.stderr_ + 1e-12;
  return out;
}

double poincare_series(const OrbitBall& ball, double s) {
  double sum = 0.0;
  for (const OrbitEntry& e : ball.entries) {
    if (std::isnan(e.dist)) throw std::runtime_error("poincare_series: ball carries no geometry");
    if (!std::isfinite(e.dist)) continue;  // saturated entries contribute e^{-inf}
    sum += std::exp(-s * e.dist);
  }
  return sum;
}

DivergenceReport divergence_diagnostic(const OrbitBall& ball, double s,
                                       const std::vector<int>& depths) {
  DivergenceReport out;
  out.s = s;
  for (int depth : depths) {
    double sum = 0.0;
    for (const OrbitEntry& e : ball.entries) {
      if (static_cast<int>(e.element.word.size()) <= depth) sum += std::exp(-s * e.dist);
    }
    out.depths.push_back(depth);
    out.partial_sums.push_back(sum);
  }
  if (out.partial_sums.size() >= 3) {
    const size_t k = out.partial_sums.size();
    const double first = out.partial_sums[1] - out.partial_sums[0];
    const double last = out.partial_sums[k - 1] - out.partial_sums[k - 2];
    out.divergence_consistent = first > 0.0 && last > 0.3 * first;
  }
  return out;
}

ClassKind classify_element(const ConvexDomain& domain, const SpectralClass& spectral) {
  if (!spectral.biproximal || spectral.ell <= 0.0) return ClassKind::singular;
  const SimplicialDistance d =
      domain.simplicial_distance(*spectral.x_plus, *spectral.x_minus);
  if (d.kind == SimplicialDistance::Kind::unknown) {
    const BoundaryPoint bp = domain.boundary_classify(*spectral.x_plus);
    const BoundaryPoint bm = domain.boundary_classify(*spectral.x_minus);
    const bool sse = bp.smooth == Flag::yes && bp.strongly_extremal == Flag::yes &&
                     bm.smooth == Flag::yes && bm.strongly_extremal == Flag::yes;
    return sse ? ClassKind::rank_one : ClassKind::biproximal_not_rank_one;
  }
  return d.at_least(3) ? ClassKind::rank_one : ClassKind::biproximal_not_rank_one;
}

namespace {

std::vector<int> cyclic_reduce(const GroupPresentation& group, std::vector<int> word) {
  while (word.size() >= 2 && group.inverse_of(word.front()) == word.back()) {
    word.erase(word.begin());
    word.pop_back();
  }
  return word;
}

std::vector<int> min_rotation(const std::vector<int>& word) {
  if (word.empty()) return word;
  std::vector<int> best = word;
  std::vector<int> rot = word;
  for (size_t k = 1; k < word.size(); ++k) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

}  // namespace

std::vector<ConjClass> conjugacy_classes(const GroupPresentation& group,
                                         const ConvexDomain& domain, int depth,
                                         ConjStrategy strategy, size_t cap) {
  const OrbitBall ball = enumerate_ball(group, depth, cap);
  std::vector<ConjClass> out;

  if (strategy == ConjStrategy::free_cyclic) {
    if (!group.free()) {
      throw std::invalid_argument("conjugacy_classes: free_cyclic needs a free presentation");
    }
    std::map<std::vector<int>, int> classes;  // necklace -> index into out
    for (const OrbitEntry& e : ball.entries) {
      const std::vector<int> necklace = min_rotation(cyclic_reduce(group, e.element.word));
      auto [it, fresh] = classes.try_emplace(necklace, static_cast<int>(out.size()));
      if (fresh) {
        GroupElement rep =
            necklace.empty() ? e.element : element_from_word(group, necklace);
        const double ell = rep.spectral.ell;
        const ClassKind kind = classify_element(domain, rep.spectral);
        out.push_back(ConjClass{std::move(rep), ell, kind, 0});
      }
      out[it->second].multiplicity += 1;
    }
    return out;
  }

  // charpoly_merge: heuristic merge by (characteristic polynomial, ell),
  // both rounded to 1e-6; over/under-counting possible on non-free fixtures.
  std::map<std::vector<int64_t>, int> classes;
  for (const OrbitEntry& e : ball.entries) {
    const Mat& m = e.element.map.matrix();
    Eigen::VectorXcd eigs = m.eigenvalues();
    const int n = static_cast<int>(m.rows());
    std::vector<std::complex<double>> sym(n + 1, 0.0);
    sym[0] = 1.0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j >= 1; --j) sym[j] += eigs[i] * sym[j - 1];
    }
    std::vector<int64_t> key;
    for (int j = 1; j <= n; ++j) key.push_back(std::llround(sym[j].real() * 1e6));
    key.push_back(std::llround(e.element.spectral.ell * 1e6));
    auto [it, fresh] = classes.try_emplace(key, static_cast<int>(out.size()));
    if (fresh) {
      out.push_back(ConjClass{e.element, e.element.spectral.ell,
                              classify_element(domain, e.element.spectral), 0});
    } else {
      ConjClass& cls = out[it->second];
      if (e.element.word.size() < cls.representative.word.size()) {
        cls.representative = e.element;
      }
    }
    out[it->second].multiplicity += 1;
  }
  return out;
}

std::vector<CountRow> count_table(const std::vector<ConjClass>& classes,
                                  const std::vector<double>& T_grid, double delta_hat) {
  std::vector<CountRow> rows;
  for (double T : T_grid) {
    CountRow row;
    row.T = T;
    for (const ConjClass& c : classes) {
      if (c.ell > T + 1e-9) continue;
      row.total += 1;
      switch (c.kind) {
        case ClassKind::rank_one: row.rank_one += 1; break;
        case ClassKind::biproximal_not_rank_one: row.biproximal_not_rank_one += 1; break;
        case ClassKind::singular: row.singular += 1; break;
      }
    }
    row.normalized = T * row.total * std::exp(-delta_hat * T);
    rows.push_back(row);
  }
  return rows;
}

std::optional<ClosingResult> closing_search(const OrbitBall& ball, const UnitTangent& v,
                                            double t, double epsilon) {
  const ConvexDomain& dom = *v.domain;
  const ProjectivePoint x0 = v.foot;
  const ProjectivePoint x1 = geodesic_flow(v, 1.0).foot;
  const ProjectivePoint xt = geodesic_flow(v, t).foot;
  const ProjectivePoint xt1 = geodesic_flow(v, t + 1.0).foot;

  std::optional<ClosingResult> best;
  for (const OrbitEntry& e : ball.entries) {
    if (e.element.word.empty()) continue;
    if (std::abs(e.element.spectral.kappa - t) > 2.0 + 4.0 * epsilon) continue;
    const ProjectivePoint g_x0 = apply(e.element.map, x0);
    if (!dom.strictly_inside(g_x0)) continue;
    const double d0 = dom.hilbert_distance(g_x0, xt);
    if (best && d0 >= best->defect) continue;
    const double d1 = dom.hilbert_distance(apply(e.element.map, x1), xt1);
    const double score = std::max(d0, d1);
    if (!best || score < best->defect) {
      best = ClosingResult{e.element, e.element.spectral.ell, score};
    }
  }
  if (!best || best->defect > epsilon || !best->element.spectral.biproximal) {
    return std::nullopt;
  }
  return best;
}

DirichletResult dirichlet_reduce(const GroupPresentation& group, const ConvexDomain& domain,
                                 const ProjectivePoint& o, const ProjectivePoint& x,
                                 int max_steps) {
  if (!domain.strictly_inside(x)) {
    throw std::invalid_argument("dirichlet_reduce: x must lie in the open domain");
  }
  ProjectivePoint cur = x;
  double cur_dist = domain.hilbert_distance(o, cur);
  std::vector<int> applied;  // letters h_k ... h_1 with reduced = h_k ... h_1 x
  for (int step = 0; step < max_steps; ++step) {
    int best_gen = -1;
    double best_dist = cur_dist - 1e-12;
    ProjectivePoint best_point = cur;
    for (int g = 0; g < static_cast<int>(group.generators().size()); ++g) {
      const ProjectivePoint cand = apply(group.generators()[g].map, cur);
      if (!domain.strictly_inside(cand)) continue;
      const double d = domain.hilbert_distance(o, cand);
      if (d < best_dist) {
        best_dist = d;
        best_gen = g;
        best_point = cand;
      }
    }
    if (best_gen < 0) break;
    cur = best_point;
    cur_dist = best_dist;
    applied.push_back(best_gen);
  }
  // gamma^{-1} = h_k ... h_1, so gamma reads the applied inverses in reverse.
  std::vector<int> gamma_word;
  for (auto it = applied.rbegin(); it != applied.rend(); ++it) {
    gamma_word.push_back(group.inverse_of(*it));
  }
  return {cur, element_from_word(group, reduce_word(group, gamma_word))};
}

DirichletResult dirichlet_reduce_exhaustive(const GroupPresentation& group,
                                            const OrbitBall& ball,
                                            const ConvexDomain& domain,
                                            const ProjectivePoint& o,
                                            const ProjectivePoint& x) {
  // Scan forward images: min over h of d(o, h x); the winner is h = gamma^{-1}
  // and gamma is rebuilt from the reversed inverse word, avoiding matrix
  // inversion of ill-conditioned elements.
  const OrbitEntry* best = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  ProjectivePoint best_point = x;
  for (const OrbitEntry& e : ball.entries) {
    const ProjectivePoint cand = apply(e.element.map, x);
    if (!domain.strictly_inside(cand)) continue;
    const double d = domain.hilbert_distance(o, cand);
    if (d < best_dist) {
      best_dist = d;
      best = &e;
      best_point = cand;
    }
  }
  if (!best) throw std::runtime_error("dirichlet_reduce_exhaustive: empty ball");
  std::vector<int> gamma_word;
  for (auto it = best->element.word.rbegin(); it != best->element.word.rend(); ++it) {
    gamma_word.push_back(group.inverse_of(*it));
  }
  return {best_point, element_from_word(group, gamma_word)};
}

}  // namespace hilbert
