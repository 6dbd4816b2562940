#include "hilbertflow/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hilbert {

AtomicDensity build_density(const OrbitBall& ball, double s,
                            const std::function<double(double)>& h) {
  if (!ball.basepoint || !ball.domain) {
    throw std::invalid_argument("build_density: ball carries no geometry");
  }
  AtomicDensity out{*ball.basepoint, s, ball.depth, {}, 0.0};
  for (size_t i = 0; i < ball.entries.size(); ++i) {
    const OrbitEntry& e = ball.entries[i];
    if (e.element.word.empty() || !e.direction || !std::isfinite(e.dist)) continue;
    const double weight = (h ? h(e.dist) : 1.0) * std::exp(-s * e.dist);
    if (!(weight > 0.0)) continue;
    out.atoms.push_back({*e.direction, weight, i, e.dist});
  }
  if (out.atoms.empty()) throw std::runtime_error("build_density: empty ball");
  double mass = 0.0;
  for (const Atom& a : out.atoms) mass += a.weight;
  for (Atom& a : out.atoms) a.weight /= mass;
  out.total_mass = 1.0;
  return out;
}

AtomicDensity reweight(const AtomicDensity& density, const ConvexDomain& domain,
                       const ProjectivePoint& x, ReweightStats* stats) {
  AtomicDensity out{x, density.s, density.depth, {}, 0.0};
  int excluded = 0, ambiguous = 0;
  for (const Atom& a : density.atoms) {
    try {
      const BusemannValue b = busemann(domain, a.direction, x, density.basepoint);
      ambiguous += b.ambiguous ? 1 : 0;
      const double w = a.weight * std::exp(-density.s * b.value);
      out.atoms.push_back({a.direction, w, a.carrier, a.carrier_dist});
      out.total_mass += w;
    } catch (const std::exception&) {
      ++excluded;
    }
  }
  if (stats) *stats = {excluded, ambiguous, out.total_mass};
  return out;
}

namespace {

// Does the segment [o, xi) pass within Hilbert distance r of y?  Ternary
// search with early exit; Hilbert-ball convexity makes the restriction
// unimodal.
bool segment_passes_within(const ConvexDomain& domain, const Vec& oc, const Vec& xic,
                           const Vec& yc, double r) {
  const Vec w = xic - oc;
  auto f = [&](double t) {
    const Vec p = oc + t * w;
    const ChordRoots roots = domain.chord_roots(yc, p);
    return 0.5 * std::log(((1.0 - roots.u_a) * roots.u_b) /
                          ((-roots.u_a) * (roots.u_b - 1.0)));
  };
  double lo = 0.0, hi = 1.0 - 1e-12;
  double best = std::min(f(lo), f(hi - 1e-6));
  if (best < r) return true;
  for (int iter = 0; iter < 60 && (hi - lo) > 1e-5; ++iter) {
    const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
    const double f1 = f(m1), f2 = f(m2);
    best = std::min({best, f1, f2});
    if (best < r) return true;
    if (f1 <= f2) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return best < r;
}

}  // namespace

double default_shadow_radius(const GroupPresentation& group, const ConvexDomain& domain,
                             const ProjectivePoint& o) {
  double worst = 0.0;
  for (const Generator& gen : group.generators()) {
    const ProjectivePoint image = apply(gen.map, o);
    if (image.approx_equal(o)) continue;
    worst = std::max(worst, domain.hilbert_distance(o, image));
  }
  return 2.0 * worst;
}

ShadowReport shadow_lemma_report(const AtomicDensity& density, const OrbitBall& ball,
                                 const ConvexDomain& domain, double R, double delta_hat,
                                 const ShadowAnnulus& annulus) {
  if (!ball.basepoint) throw std::invalid_argument("shadow report: ball carries no geometry");
  const Vec oc = domain.chart_normalize(*ball.basepoint);
  ShadowReport report;
  report.R = R;
  report.delta_hat = delta_hat;

  const size_t min_len = std::max(0, annulus.min_len);
  const size_t max_len = annulus.max_len >= 0 ? annulus.max_len
                                              : std::max<size_t>(2, ball.depth / 2);
  const double min_dist =
      annulus.min_dist >= 0.0 ? annulus.min_dist : std::min(R + 1.0, ball.max_dist / 2.0);
  std::vector<Vec> atom_charts;
  atom_charts.reserve(density.atoms.size());
  for (const Atom& a : density.atoms) atom_charts.push_back(domain.chart_normalize(a.direction));

  for (size_t i = 0; i < ball.entries.size(); ++i) {
    const OrbitEntry& e = ball.entries[i];
    const size_t len = e.element.word.size();
    if (len < min_len || len > max_len || !std::isfinite(e.dist) || e.dist < min_dist) {
      continue;
    }
    const Vec yc = domain.chart_normalize(apply(e.element.map, *ball.basepoint));
    double mass = 0.0;
    if (domain.exact_segment_distance()) {
      for (size_t a = 0; a < density.atoms.size(); ++a) {
        if (domain.segment_distance_chart(oc, atom_charts[a], yc) < R) {
          mass += density.atoms[a].weight;
        }
      }
    } else {
      for (size_t a = 0; a < density.atoms.size(); ++a) {
        if (segment_passes_within(domain, oc, atom_charts[a], yc, R)) {
          mass += density.atoms[a].weight;
        }
      }
    }
    report.rows.push_back({i, e.dist, mass, mass * std::exp(delta_hat * e.dist)});
  }
  if (report.rows.empty()) return report;

  report.min_ratio = report.max_ratio = report.rows.front().ratio;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const ShadowRow& row : report.rows) {
    report.min_ratio = std::min(report.min_ratio, row.ratio);
    report.max_ratio = std::max(report.max_ratio, row.ratio);
    if (row.ratio > 0.0) {
      sx += row.dist;
      sy += std::log(row.ratio);
      sxx += row.dist * row.dist;
      sxy += row.dist * std::log(row.ratio);
      ++n;
    }
  }
  if (n >= 2 && n * sxx - sx * sx > 1e-12) {
    report.log_ratio_slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return report;
}

BMSampleSet bm_sampler(const AtomicDensity& density, const ConvexDomain& domain,
                       double delta_hat, size_t n, double t_window, uint64_t seed) {
  const size_t k = density.atoms.size();
  if (k < 2) throw std::invalid_argument("bm_sampler: need at least two atoms");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto gromov = [&](size_t i, size_t j) {
    return gromov_product(domain, density.atoms[i].direction, density.atoms[j].direction,
                          density.basepoint);
  };
  auto pair_ok = [&](size_t i, size_t j) {
    return i != j &&
           geodesic_pair(domain, density.atoms[i].direction, density.atoms[j].direction);
  };

  BMSampleSet out;
  if (k * k <= 1000000) {
    // Exhaustive joint distribution over ordered atom pairs.
    out.exhaustive = true;
    std::vector<double> weights;
    std::vector<std::pair<size_t, size_t>> pairs;
    for (size_t i = 0; i < k; ++i) {
      for (size_t j = 0; j < k; ++j) {
        if (!pair_ok(i, j)) continue;
        const double w = density.atoms[i].weight * density.atoms[j].weight *
                         std::exp(2.0 * delta_hat * gromov(i, j));
        pairs.emplace_back(i, j);
        weights.push_back(w);
      }
    }
    if (pairs.empty()) throw std::runtime_error("bm_sampler: all atom pairs degenerate");
    std::discrete_distribution<size_t> pick(weights.begin(), weights.end());
    for (size_t m = 0; m < n; ++m) {
      const size_t idx = pick(rng);
      out.samples.push_back({pairs[idx].first, pairs[idx].second, t_window * unif(rng), 1.0});
    }
    out.effective_sample_size = static_cast<double>(n);
    return out;
  }

  // Product-form proposal with importance weight e^{2 delta <xi,eta>_o}.
  std::vector<double> marginal(k);
  for (size_t i = 0; i < k; ++i) marginal[i] = density.atoms[i].weight;
  std::discrete_distribution<size_t> pick(marginal.begin(), marginal.end());
  double sum_w = 0.0, sum_w2 = 0.0;
  size_t attempts = 0;
  const size_t max_attempts = 50 * n + 1000;
  while (out.samples.size() < n && attempts < max_attempts) {
    ++attempts;
    const size_t i = pick(rng), j = pick(rng);
    if (!pair_ok(i, j)) continue;
    const double w = std::exp(2.0 * delta_hat * gromov(i, j));
    out.samples.push_back({i, j, t_window * unif(rng), w});
    sum_w += w;
    sum_w2 += w * w;
  }
  if (out.samples.empty()) throw std::runtime_error("bm_sampler: all atom pairs degenerate");
  out.effective_sample_size = sum_w * sum_w / std::max(sum_w2, 1e-300);
  return out;
}

UnitTangent bm_tangent(const AtomicDensity& density, DomainPtr domain,
                       const BMSample& sample) {
  return hopf(std::move(domain), density.basepoint, density.atoms[sample.xi].direction,
              density.atoms[sample.eta].direction, sample.t);
}

namespace {

// Samples on very short chords squeezed against the boundary can fail to
// materialise in chart coordinates; consumers skip and count them.
std::optional<UnitTangent> try_bm_tangent(const AtomicDensity& density,
                                          const DomainPtr& domain, const BMSample& sample) {
  try {
    UnitTangent v = bm_tangent(density, domain, sample);
    if (!domain->strictly_inside(v.foot)) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

double geodesic_average(DomainPtr domain, const ConjClass& cls, const Observable& f,
                        int min_steps) {
  if (cls.kind != ClassKind::rank_one) {
    throw std::invalid_argument("geodesic_average: class is not rank-one");
  }
  const SpectralClass& spec = cls.representative.spectral;
  const ProjectivePoint& xp = *spec.x_plus;
  const ProjectivePoint& xm = *spec.x_minus;
  const Vec mid = 0.5 * (domain->chart_normalize(xp) + domain->chart_normalize(xm));
  UnitTangent v{domain, xm, xp, domain->to_point(mid)};
  const int steps = std::max(min_steps, 256);
  const double step = cls.ell / steps;
  double sum = 0.0;
  for (int k = 0; k < steps; ++k) sum += f(geodesic_flow(v, k * step));
  return sum / steps;
}

std::vector<EquidistRow> equidistribution_report(
    DomainPtr domain, const std::vector<ConjClass>& classes, const AtomicDensity& density,
    const BMSampleSet& samples, const std::vector<double>& T_grid, const Observable& f) {
  double t_max = 0.0;
  for (double T : T_grid) t_max = std::max(t_max, T);
  int rank_one_below = 0;
  for (const ConjClass& c : classes) {
    if (c.kind == ClassKind::rank_one && c.ell <= t_max) ++rank_one_below;
  }
  if (rank_one_below < 5) {
    throw std::invalid_argument("equidistribution_report: need >= 5 rank-one classes");
  }

  double sw = 0, swf = 0, swf2 = 0;
  for (const BMSample& s : samples.samples) {
    const auto v = try_bm_tangent(density, domain, s);
    if (!v) continue;
    const double val = f(*v);
    sw += s.weight;
    swf += s.weight * val;
    swf2 += s.weight * val * val;
  }
  const double bm_mean = swf / sw;
  const double bm_var = std::max(0.0, swf2 / sw - bm_mean * bm_mean);
  const double bm_stderr = std::sqrt(bm_var / std::max(1.0, samples.effective_sample_size));

  std::vector<std::pair<double, double>> class_values;  // (ell, average)
  for (const ConjClass& c : classes) {
    if (c.kind != ClassKind::rank_one || c.ell > t_max) continue;
    class_values.emplace_back(c.ell, geodesic_average(domain, c, f));
  }
  std::sort(class_values.begin(), class_values.end());

  std::vector<EquidistRow> rows;
  for (double T : T_grid) {
    EquidistRow row;
    row.T = T;
    double sum = 0, sum2 = 0;
    int count = 0;
    for (const auto& [ell, val] : class_values) {
      if (ell > T) break;
      sum += val;
      sum2 += val * val;
      ++count;
    }
    row.classes = count;
    if (count > 0) {
      row.geodesic_mean = sum / count;
      const double var = std::max(0.0, sum2 / count - row.geodesic_mean * row.geodesic_mean);
      row.geodesic_stderr = std::sqrt(var / count);
      row.bm_mean = bm_mean;
      row.bm_stderr = bm_stderr;
      row.discrepancy = std::abs(row.geodesic_mean - bm_mean);
    }
    rows.push_back(row);
  }
  return rows;
}

MixingCurve mixing_correlation(DomainPtr domain, const AtomicDensity& density,
                               const BMSampleSet& samples, const Observable& indicator_a,
                               const Observable& indicator_b,
                               const std::vector<double>& t_grid) {
  std::vector<UnitTangent> tangents;
  std::vector<double> tangent_weights;
  for (const BMSample& s : samples.samples) {
    if (const auto v = try_bm_tangent(density, domain, s)) {
      tangents.push_back(*v);
      tangent_weights.push_back(s.weight);
    }
  }
  double sw = 0, swa = 0, swb = 0;
  for (size_t i = 0; i < tangents.size(); ++i) {
    const double w = tangent_weights[i];
    sw += w;
    swa += w * (indicator_a(tangents[i]) > 0.5 ? 1.0 : 0.0);
    swb += w * (indicator_b(tangents[i]) > 0.5 ? 1.0 : 0.0);
  }
  MixingCurve curve;
  curve.mass_a = swa / sw;
  curve.mass_b = swb / sw;
  if (curve.mass_a <= 0.0 || curve.mass_b <= 0.0) {
    throw std::invalid_argument("mixing_correlation: degenerate observable");
  }
  const double ess = std::max(1.0, samples.effective_sample_size);
  for (double t : t_grid) {
    double swc = 0;
    for (size_t i = 0; i < tangents.size(); ++i) {
      const double w = tangent_weights[i];
      const double a = indicator_a(tangents[i]) > 0.5 ? 1.0 : 0.0;
      const double b = indicator_b(geodesic_flow(tangents[i], t)) > 0.5 ? 1.0 : 0.0;
      swc += w * a * b;
    }
    const double c = swc / sw;
    const double se = std::sqrt(std::max(c * (1.0 - c), 1e-12) / ess);
    curve.points.push_back({t, c, se});
  }
  return curve;
}

namespace {

// Allocation-lean kernel for the packing: chart vectors, cached generator
// matrices, and the chord solve called directly.  Quadric backends in
// P(R^3) run on fixed-size types with the form inlined.
struct PackingKernel {
  const ConvexDomain& dom;
  std::vector<Mat> gens;
  Vec oc;
  bool fast3 = false;
  Eigen::Matrix3d form3;
  Eigen::Vector3d chart3, oc3;
  std::vector<Eigen::Matrix3d> gens3;
  std::vector<Eigen::Matrix3d> translates3;

  PackingKernel(const GroupPresentation& group, const ConvexDomain& domain,
                const ProjectivePoint& o)
      : dom(domain), oc(domain.chart_normalize(o)) {
    for (const Generator& g : group.generators()) gens.push_back(g.map.matrix());
    const auto form = domain.quadratic_form();
    if (form && domain.ambient_dim() == 3) {
      fast3 = true;
      form3 = *form;
      chart3 = Eigen::Vector3d(domain.chart()[0], domain.chart()[1], domain.chart()[2]);
      oc3 = Eigen::Vector3d(oc[0], oc[1], oc[2]);
      for (const Mat& g : gens) gens3.push_back(Eigen::Matrix3d(g));
      // Quotient-distance translates: generators plus their pair products
      // (torsion rotations of reflection groups live there).
      std::vector<Eigen::Matrix3d> pairs;
      for (const auto& a : gens3) {
        for (const auto& b : gens3) {
          const Eigen::Matrix3d ab = a * b;
          if (ab.isApprox(Eigen::Matrix3d::Identity(), 1e-9)) continue;
          bool known = false;
          for (const auto& known_mat : gens3) {
            if (ab.isApprox(known_mat, 1e-9) || ab.isApprox(-known_mat, 1e-9)) known = true;
          }
          for (const auto& known_mat : pairs) {
            if (ab.isApprox(known_mat, 1e-9) || ab.isApprox(-known_mat, 1e-9)) known = true;
          }
          if (!known) pairs.push_back(ab);
        }
      }
      translates3 = gens3;
      translates3.insert(translates3.end(), pairs.begin(), pairs.end());
    }
  }

  static double chord_dist(double A, double B, double C) {
    const double disc = B * B - A * C;
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double s = B >= 0.0 ? 1.0 : -1.0;
    const double Q = -(B + s * sq);
    const double r1 = Q / A, r2 = C / Q;
    const double u_a = std::min(r1, r2), u_b = std::max(r1, r2);
    return 0.5 * std::log(((1.0 - u_a) * u_b) / ((-u_a) * (u_b - 1.0)));
  }

  double dist3(const Eigen::Vector3d& a, const Eigen::Vector3d& b) const {
    const Eigen::Vector3d w = b - a;
    if (w.squaredNorm() <= 1e-28 * b.squaredNorm()) return 0.0;
    const Eigen::Vector3d qw = form3 * w;
    return chord_dist(w.dot(qw), a.dot(qw), a.dot(form3 * a));
  }

  bool inside3(const Eigen::Vector3d& v) const { return v.dot(form3 * v) < 0.0; }

  double dist(const Vec& a, const Vec& b) const {
    if (fast3) {
      return dist3(Eigen::Vector3d(a[0], a[1], a[2]), Eigen::Vector3d(b[0], b[1], b[2]));
    }
    if ((a - b).norm() <= 1e-14 * b.norm()) return 0.0;
    const ChordRoots r = dom.chord_roots(a, b);
    return 0.5 * std::log(((1.0 - r.u_a) * r.u_b) / ((-r.u_a) * (r.u_b - 1.0)));
  }

  // Greedy nearest-point reduction on chart coordinates.
  bool reduce(Vec x, Vec* out) const {
    if (fast3) {
      Eigen::Vector3d v(x[0], x[1], x[2]);
      if (!inside3(v)) return false;
      double cur = dist3(oc3, v);
      for (int iter = 0; iter < 256; ++iter) {
        int best = -1;
        double best_dist = cur - 1e-12;
        Eigen::Vector3d best_point = v;
        for (const Eigen::Matrix3d& g : gens3) {
          Eigen::Vector3d cand = g * v;
          cand /= chart3.dot(cand);
          if (!inside3(cand)) continue;
          const double d = dist3(oc3, cand);
          if (d < best_dist) {
            best_dist = d;
            best = 0;
            best_point = cand;
          }
        }
        if (best < 0) break;
        v = best_point;
        cur = best_dist;
      }
      Vec res(3);
      res << v[0], v[1], v[2];
      *out = std::move(res);
      return true;
    }
    if (!(dom.signed_gap(x) > 0.0)) return false;
    double cur = dist(oc, x);
    for (int iter = 0; iter < 256; ++iter) {
      int best = -1;
      double best_dist = cur - 1e-12;
      Vec best_point = x;
      for (size_t g = 0; g < gens.size(); ++g) {
        Vec cand = gens[g] * x;
        cand /= dom.chart().dot(cand);
        if (!(dom.signed_gap(cand) > 0.0)) continue;
        const double d = dist(oc, cand);
        if (d < best_dist) {
          best_dist = d;
          best = static_cast<int>(g);
          best_point = std::move(cand);
        }
      }
      if (best < 0) break;
      x = std::move(best_point);
      cur = best_dist;
    }
    *out = std::move(x);
    return true;
  }

  // d_M(x, y) >= eps on reduced representatives and generator translates.
  bool quotient_far(const Vec& x, const Vec& y, double eps) const {
    if (fast3) {
      const Eigen::Vector3d a(x[0], x[1], x[2]), b(y[0], y[1], y[2]);
      if (dist3(a, b) < eps) return false;
      for (const Eigen::Matrix3d& g : translates3) {
        Eigen::Vector3d gy = g * b;
        gy /= chart3.dot(gy);
        if (inside3(gy) && dist3(a, gy) < eps) return false;
      }
      return true;
    }
    if (dist(x, y) < eps) return false;
    for (const Mat& g : gens) {
      Vec gy = gens.empty() ? y : Vec(g * y);
      gy /= dom.chart().dot(gy);
      if (dom.signed_gap(gy) > 0.0 && dist(x, gy) < eps) return false;
    }
    return true;
  }
};

}  // namespace

EntropyEstimate entropy_estimate(const GroupPresentation& group, DomainPtr domain,
                                 const ProjectivePoint& o,
                                 const std::vector<UnitTangent>& samples, double t,
                                 double epsilon, double step) {
  if (samples.size() < 8) throw std::invalid_argument("entropy_estimate: sample too small");
  if (!(t >= 5.0)) throw std::invalid_argument("entropy_estimate: need t >= 5");

  const PackingKernel kernel(group, *domain, o);
  const int n_total = static_cast<int>(std::ceil((t + 1.0) / step)) + 1;

  // Reduced trajectories, stored flat; saturating trajectories are skipped.
  std::vector<std::vector<Vec>> tracks;
  tracks.reserve(samples.size());
  for (const UnitTangent& v : samples) {
    std::vector<Vec> track;
    track.reserve(n_total);
    bool ok = true;
    for (int k = 0; k < n_total && ok; ++k) {
      const ProjectivePoint foot = geodesic_flow(v, k * step).foot;
      Vec reduced;
      try {
        ok = domain->strictly_inside(foot) &&
             kernel.reduce(domain->chart_normalize(foot), &reduced);
      } catch (const std::exception&) {
        ok = false;
      }
      if (ok) track.push_back(std::move(reduced));
    }
    if (ok) tracks.push_back(std::move(track));
  }
  if (tracks.size() < 8) throw std::invalid_argument("entropy_estimate: sample too small");

  // Rejection pruning: a pack member can only fail to separate from the
  // candidate if the reduced footpoints stay within epsilon at every sampled
  // step, in particular at three probe steps (start, middle, end).  On the
  // Klein ball chart distance is dominated by Hilbert distance, so members
  // outside the end-cell window or the probe windows are separated for free.
  const bool cells_ok = domain->exact_segment_distance();
  const double cell = epsilon;

  auto packing = [&](double horizon) {
    const size_t n_steps = static_cast<size_t>(std::ceil((horizon + 1.0) / step)) + 1;
    const size_t probe_mid = n_steps / 2, probe_end = n_steps - 1;
    auto at = [&](size_t track_index, size_t k) -> const Vec& {
      const auto& track = tracks[track_index];
      return track[std::min(k, track.size() - 1)];
    };
    auto separated = [&](size_t c, size_t p) {
      for (size_t k = 0; k < n_steps; ++k) {
        if (kernel.quotient_far(at(c, k), at(p, k), epsilon)) return true;
      }
      return false;
    };
    auto cell_of = [&](const Vec& v) {
      return std::make_pair(static_cast<int>(std::floor(v[0] / cell)),
                            static_cast<int>(std::floor(v[1] / cell)));
    };
    auto probe_near = [&](size_t c, size_t p, size_t k) {
      const Vec& a = at(c, k);
      const Vec& b = at(p, k);
      const double dx = a[0] - b[0], dy = a[1] - b[1];
      return dx * dx + dy * dy < epsilon * epsilon;
    };

    std::vector<size_t> pack;
    std::map<std::pair<int, int>, std::vector<size_t>> end_cells;
    for (size_t c = 0; c < tracks.size(); ++c) {
      bool separated_from_all = true;
      if (cells_ok) {
        const auto [ci, cj] = cell_of(at(c, probe_end));
        for (int di = -1; di <= 1 && separated_from_all; ++di) {
          for (int dj = -1; dj <= 1 && separated_from_all; ++dj) {
            const auto it = end_cells.find({ci + di, cj + dj});
            if (it == end_cells.end()) continue;
            for (size_t p : it->second) {
              if (!probe_near(c, p, 0) || !probe_near(c, p, probe_mid) ||
                  !probe_near(c, p, probe_end)) {
                continue;  // separated at a probe step already
              }
              if (!separated(c, p)) {
                separated_from_all = false;
                break;
              }
            }
          }
        }
      } else {
        for (size_t p : pack) {
          if (!separated(c, p)) {
            separated_from_all = false;
            break;
          }
        }
      }
      if (separated_from_all) {
        if (cells_ok) end_cells[cell_of(at(c, probe_end))].push_back(c);
        pack.push_back(c);
      }
    }
    return static_cast<int>(pack.size());
  };

  EntropyEstimate out;
  out.packed_full = packing(t);
  out.packed_half = packing(t / 2.0);
  out.rate_full = std::log(std::max(1, out.packed_full)) / t;
  out.rate_half = std::log(std::max(1, out.packed_half)) / (t / 2.0);
  out.slope =
      (std::log(std::max(1, out.packed_full)) - std::log(std::max(1, out.packed_half))) /
      (t - t / 2.0);
  return out;
}

double dynamical_ball_mass(DomainPtr domain, const AtomicDensity& density,
                           const BMSampleSet& samples, const UnitTangent& v, double r,
                           double t, double step) {
  double sw = 0.0, hit = 0.0;
  for (const BMSample& s : samples.samples) {
    const auto wv = try_bm_tangent(density, domain, s);
    if (!wv) continue;
    const UnitTangent& w = *wv;
    sw += s.weight;
    bool inside = true;
    for (double u = 0.0; u <= t + 1.0 && inside; u += step) {
      if (domain->hilbert_distance(geodesic_flow(v, u).foot, geodesic_flow(w, u).foot) >= r) {
        inside = false;
      }
    }
    if (inside) hit += s.weight;
  }
  return sw > 0.0 ? hit / sw : 0.0;
}

}  // namespace hilbert
