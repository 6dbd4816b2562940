#include "hilbertflow/pipelines.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace hilbert {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string canonical_config(const RunConfig& c) {
  std::string grid;
  for (double t : c.t_grid) grid += fmt(t) + ",";
  return "fixture=" + c.fixture + ";depth=" + std::to_string(c.depth) +
         ";seed=" + std::to_string(c.seed) + ";tgrid=" + grid + ";radius=" + fmt(c.radius) +
         ";epsilon=" + fmt(c.epsilon) + ";time=" + fmt(c.time_horizon) +
         ";samples=" + std::to_string(c.samples) + ";cap=" + std::to_string(c.cap);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file " + dir + "/" + name);
  return out;
}

struct Session {
  RunConfig config;
  Fixture fixture;
  int depth;
  std::string hash;

  explicit Session(const RunConfig& cfg)
      : config(cfg),
        fixture(resolve_fixture(cfg.fixture)),
        depth(cfg.depth > 0 ? cfg.depth : fixture.default_depth),
        hash(config_hash(cfg)) {}

  OrbitBall ball() const {
    return orbit(fixture.group, fixture.domain, fixture.basepoint, depth, config.cap);
  }

  std::vector<double> grid_or(double t_max) const {
    if (!config.t_grid.empty()) return config.t_grid;
    std::vector<double> grid;
    for (int k = 1; k <= 12; ++k) grid.push_back(t_max * k / 12.0);
    return grid;
  }
};

// Largest depth (up to the configured one) whose orbit ball keeps the atom
// count within the exhaustive-pair budget of the sampler, so Monte-Carlo
// outputs carry unit weights and full effective sample size.
int sampling_depth(const Session& session) {
  OrbitBall probe = enumerate_ball(session.fixture.group, session.depth, session.config.cap);
  std::vector<size_t> cumulative(session.depth + 1, 0);
  for (const OrbitEntry& e : probe.entries) {
    const size_t len = e.element.word.size();
    for (int d = static_cast<int>(len); d <= session.depth; ++d) cumulative[d] += 1;
  }
  int best = 1;
  for (int d = 1; d <= session.depth; ++d) {
    if (cumulative[d] <= 1000) best = d;
  }
  return best;
}

std::vector<ConjClass> census_classes(const Session& session) {
  return conjugacy_classes(session.fixture.group, *session.fixture.domain, session.depth,
                           session.fixture.group.free() ? ConjStrategy::free_cyclic
                                                        : ConjStrategy::charpoly_merge,
                           session.config.cap);
}

double max_ell(const std::vector<ConjClass>& classes) {
  double top = 0.0;
  for (const ConjClass& c : classes) {
    if (std::isfinite(c.ell)) top = std::max(top, c.ell);
  }
  return top;
}

// Gamma-invariant ball indicator around the basepoint, radius picked so the
// sampled mass lands inside (0.15, 0.85).
Observable invariant_ball_indicator(const Session& session, const AtomicDensity& density,
                                    const BMSampleSet& samples, double* chosen_radius) {
  const Fixture& fx = session.fixture;
  auto indicator_at = [&fx](double radius) {
    return Observable([&fx, radius](const UnitTangent& v) {
      if (!fx.domain->strictly_inside(v.foot)) return 0.0;
      const ProjectivePoint reduced =
          dirichlet_reduce(fx.group, *fx.domain, fx.basepoint, v.foot).reduced;
      return fx.domain->hilbert_distance(fx.basepoint, reduced) < radius ? 1.0 : 0.0;
    });
  };
  const double candidates[] = {0.6, 0.8, 1.0, 1.3, 1.7, 2.2};
  double fallback = 1.0;
  for (double radius : candidates) {
    const Observable f = indicator_at(radius);
    double sw = 0.0, hit = 0.0;
    size_t used = 0;
    for (const BMSample& s : samples.samples) {
      if (used++ >= 400) break;
      try {
        UnitTangent v = bm_tangent(density, fx.domain, s);
        sw += s.weight;
        hit += s.weight * f(v);
      } catch (const std::exception&) {
      }
    }
    const double mass = sw > 0 ? hit / sw : 0.0;
    if (mass > 0.15 && mass < 0.85) {
      *chosen_radius = radius;
      return f;
    }
    fallback = radius;
  }
  *chosen_radius = fallback;
  return indicator_at(fallback);
}

}  // namespace

std::string config_hash(const RunConfig& config) {
  uint64_t h = 1469598103934665603ull;
  for (char c : canonical_config(config)) {
    h ^= static_cast<uint64_t>(static_cast<unsigned char>(c));
    h *= 1099511628211ull;
  }
  char buffer[20];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(h));
  return buffer;
}

CensusArtifacts run_census(const RunConfig& config) {
  Session session(config);
  const OrbitBall ball = session.ball();
  const ExponentEstimate est = critical_exponent(ball);
  const auto classes = census_classes(session);
  const auto grid = session.grid_or(max_ell(classes));
  const auto rows = count_table(classes, grid, est.delta_hat);

  CensusArtifacts out;
  out.delta_hat = est.delta_hat;
  out.total_classes = static_cast<int>(classes.size());
  for (const ConjClass& c : classes) out.rank_one += c.kind == ClassKind::rank_one ? 1 : 0;

  {
    auto csv = open_out(config.out_dir, "census.csv");
    csv << "# config " << session.hash << "\n";
    csv << "T,total,rank_one,singular,normalized_stat\n";
    for (const CountRow& row : rows) {
      csv << fmt(row.T) << "," << row.total << "," << row.rank_one << "," << row.singular
          << "," << fmt(row.normalized) << "\n";
    }
    out.census_csv = config.out_dir + "/census.csv";
  }
  {
    const std::vector<int> depths = {std::max(1, session.depth - 4),
                                     std::max(2, session.depth - 2), session.depth};
    const DivergenceReport div = divergence_diagnostic(ball, est.delta_hat, depths);
    json doc;
    doc["config_hash"] = session.hash;
    doc["fixture"] = session.fixture.name;
    doc["depth"] = session.depth;
    doc["delta_hat"] = est.delta_hat;
    doc["stderr"] = est.stderr_;
    doc["delta_kappa"] = est.delta_kappa;
    doc["stderr_kappa"] = est.stderr_kappa;
    doc["estimators_consistent"] = est.consistent;
    doc["divergence"] = {{"s", div.s},
                         {"depths", div.depths},
                         {"partial_sums", div.partial_sums},
                         {"divergence_consistent", div.divergence_consistent}};
    auto file = open_out(config.out_dir, "delta.json");
    file << doc.dump(2) << "\n";
    out.delta_json = config.out_dir + "/delta.json";
  }
  {
    int bnr1 = 0, sing = 0;
    for (const ConjClass& c : classes) {
      bnr1 += c.kind == ClassKind::biproximal_not_rank_one ? 1 : 0;
      sing += c.kind == ClassKind::singular ? 1 : 0;
    }
    json doc;
    doc["config_hash"] = session.hash;
    doc["strategy"] = session.fixture.group.free() ? "free_cyclic" : "charpoly_merge";
    doc["heuristic"] = !session.fixture.group.free();
    doc["classes"] = classes.size();
    doc["rank_one"] = out.rank_one;
    doc["biproximal_not_rank_one"] = bnr1;
    doc["singular"] = sing;
    doc["max_ell"] = max_ell(classes);
    auto file = open_out(config.out_dir, "classification.json");
    file << doc.dump(2) << "\n";
    out.classification_json = config.out_dir + "/classification.json";
  }
  return out;
}

VerifyArtifacts run_verify(const RunConfig& config) {
  Session session(config);
  VerifyArtifacts out;
  out.rows = run_invariant_suite(session.fixture, session.depth, config.seed);
  out.all_pass = true;
  json checks = json::array();
  for (const CheckRow& row : out.rows) {
    out.all_pass = out.all_pass && row.pass;
    checks.push_back({{"module", row.module},
                      {"name", row.name},
                      {"residual", row.residual},
                      {"threshold", row.threshold},
                      {"pass", row.pass}});
  }
  json doc;
  doc["config_hash"] = session.hash;
  doc["fixture"] = session.fixture.name;
  doc["checks"] = checks;
  doc["all_pass"] = out.all_pass;
  auto file = open_out(config.out_dir, "verify.json");
  file << doc.dump(2) << "\n";
  out.report_json = config.out_dir + "/verify.json";
  return out;
}

SampleArtifacts run_sample(const RunConfig& config) {
  Session session(config);
  const Fixture& fx = session.fixture;
  const OrbitBall ball = session.ball();
  const ExponentEstimate est = critical_exponent(ball);
  const int s_depth = sampling_depth(session);
  const OrbitBall s_ball =
      s_depth == session.depth
          ? ball
          : orbit(fx.group, fx.domain, fx.basepoint, s_depth, config.cap);
  const AtomicDensity density = build_density(s_ball, est.delta_hat + 1.0 / session.depth);
  const BMSampleSet samples =
      bm_sampler(density, *fx.domain, est.delta_hat, config.samples, 1.0, config.seed);

  SampleArtifacts out;
  {
    auto file = open_out(config.out_dir, "samples.jsonl");
    json meta;
    meta["config_hash"] = session.hash;
    meta["n"] = samples.samples.size();
    meta["effective_sample_size"] = samples.effective_sample_size;
    meta["exhaustive"] = samples.exhaustive;
    file << meta.dump() << "\n";
    for (const BMSample& s : samples.samples) {
      json line;
      line["xi"] = s.xi;
      line["eta"] = s.eta;
      line["t"] = s.t;
      line["weight"] = s.weight;
      file << line.dump() << "\n";
    }
    out.samples_jsonl = config.out_dir + "/samples.jsonl";
  }

  if (!samples.samples.empty()) {
    double radius = 1.0;
    const Observable ball_indicator =
        invariant_ball_indicator(session, density, samples, &radius);
    std::vector<double> t_grid;
    for (double t = 0.0; t <= config.time_horizon + 1e-9; t += config.time_horizon / 8.0) {
      t_grid.push_back(t);
    }
    out.mixing = mixing_correlation(fx.domain, density, samples, ball_indicator,
                                    ball_indicator, t_grid);
    auto file = open_out(config.out_dir, "mixing_curve.csv");
    file << "# config " << session.hash << "\n";
    file << "t,correlation,stderr,mass_a,mass_b\n";
    for (const MixingPoint& p : out.mixing.points) {
      file << fmt(p.t) << "," << fmt(p.correlation) << "," << fmt(p.stderr_) << ","
           << fmt(out.mixing.mass_a) << "," << fmt(out.mixing.mass_b) << "\n";
    }
    out.mixing_csv = config.out_dir + "/mixing_curve.csv";

    const auto classes = census_classes(session);
    const auto grid = session.grid_or(max_ell(classes));
    // Smoothed ball indicator for the closed-geodesic comparison.
    const double r0 = radius;
    const Observable smoothed = [&fx, r0](const UnitTangent& v) {
      if (!fx.domain->strictly_inside(v.foot)) return 0.0;
      const ProjectivePoint reduced =
          dirichlet_reduce(fx.group, *fx.domain, fx.basepoint, v.foot).reduced;
      const double d = fx.domain->hilbert_distance(fx.basepoint, reduced);
      return 1.0 / (1.0 + std::exp((d - r0) / 0.2));
    };
    out.equidistribution = equidistribution_report(fx.domain, classes, density, samples,
                                                   grid, smoothed);
    auto eq = open_out(config.out_dir, "equidistribution.csv");
    eq << "# config " << session.hash << "\n";
    eq << "T,classes,geodesic_mean,geodesic_stderr,bm_mean,bm_stderr,discrepancy\n";
    for (const EquidistRow& row : out.equidistribution) {
      eq << fmt(row.T) << "," << row.classes << "," << fmt(row.geodesic_mean) << ","
         << fmt(row.geodesic_stderr) << "," << fmt(row.bm_mean) << "," << fmt(row.bm_stderr)
         << "," << fmt(row.discrepancy) << "\n";
    }
    out.equidistribution_csv = config.out_dir + "/equidistribution.csv";
  } else {
    auto file = open_out(config.out_dir, "mixing_curve.csv");
    file << "# config " << session.hash << "\n";
    file << "t,correlation,stderr,mass_a,mass_b\n";
    out.mixing_csv = config.out_dir + "/mixing_curve.csv";
    auto eq = open_out(config.out_dir, "equidistribution.csv");
    eq << "# config " << session.hash << "\n";
    eq << "T,classes,geodesic_mean,geodesic_stderr,bm_mean,bm_stderr,discrepancy\n";
    out.equidistribution_csv = config.out_dir + "/equidistribution.csv";
  }
  return out;
}

DensityArtifacts run_density(const RunConfig& config) {
  Session session(config);
  const Fixture& fx = session.fixture;
  const OrbitBall ball = session.ball();
  const ExponentEstimate est = critical_exponent(ball);
  const double R = config.radius > 0.0
                       ? config.radius
                       : default_shadow_radius(fx.group, *fx.domain, fx.basepoint);

  DensityArtifacts out;
  // The conformality check runs on the density at its own critical exponent;
  // the +1/depth shift stays the default for sampling densities.
  const AtomicDensity critical = build_density(ball, est.delta_hat);
  out.report = shadow_lemma_report(critical, ball, *fx.domain, R, est.delta_hat);
  const AtomicDensity sub = build_density(ball, est.delta_hat / 2.0);
  out.subcritical = shadow_lemma_report(sub, ball, *fx.domain, R, est.delta_hat);

  auto write_csv = [&](const std::string& name, const ShadowReport& report) {
    auto file = open_out(config.out_dir, name);
    file << "# config " << session.hash << "\n";
    file << "carrier,dist,mass,ratio\n";
    for (const ShadowRow& row : report.rows) {
      file << row.carrier << "," << fmt(row.dist) << "," << fmt(row.mass) << ","
           << fmt(row.ratio) << "\n";
    }
    return config.out_dir + "/" + name;
  };
  out.shadow_csv = write_csv("shadow_report.csv", out.report);
  out.shadow_subcritical_csv = write_csv("shadow_report_subcritical.csv", out.subcritical);

  json doc;
  doc["config_hash"] = session.hash;
  doc["fixture"] = fx.name;
  doc["depth"] = session.depth;
  doc["delta_hat"] = est.delta_hat;
  doc["s_critical"] = critical.s;
  doc["s_subcritical"] = sub.s;
  doc["atoms"] = critical.atoms.size();
  doc["R"] = R;
  doc["critical"] = {{"min_ratio", out.report.min_ratio},
                     {"max_ratio", out.report.max_ratio},
                     {"log_ratio_slope", out.report.log_ratio_slope},
                     {"rows", out.report.rows.size()}};
  doc["subcritical"] = {{"min_ratio", out.subcritical.min_ratio},
                        {"max_ratio", out.subcritical.max_ratio},
                        {"log_ratio_slope", out.subcritical.log_ratio_slope}};
  auto file = open_out(config.out_dir, "density.json");
  file << doc.dump(2) << "\n";
  out.density_json = config.out_dir + "/density.json";
  return out;
}

EntropyArtifacts run_entropy(const RunConfig& config) {
  Session session(config);
  const Fixture& fx = session.fixture;
  const OrbitBall ball = session.ball();
  const ExponentEstimate est = critical_exponent(ball);
  // Entropy candidates draw on the full-depth ball: the boundary resolution
  // of the atom directions caps the horizon the packing can resolve.
  const AtomicDensity density = build_density(ball, est.delta_hat + 1.0 / session.depth);

  // Candidate vectors for the packing: uniform atom pairs (endpoints in the
  // orbit-limit directions) with a uniform time jitter; uniform coverage
  // fills the separated set faster than measure-weighted draws.
  std::vector<UnitTangent> tangents;
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<size_t> pick(0, density.atoms.size() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  size_t attempts = 0;
  while (tangents.size() < config.samples && attempts < 20 * config.samples) {
    ++attempts;
    const size_t i = pick(rng), j = pick(rng);
    if (i == j) continue;
    const ProjectivePoint& xi = density.atoms[i].direction;
    const ProjectivePoint& eta = density.atoms[j].direction;
    if (!geodesic_pair(*fx.domain, xi, eta)) continue;
    try {
      UnitTangent v = hopf(fx.domain, fx.basepoint, xi, eta, unif(rng));
      if (fx.domain->strictly_inside(v.foot)) tangents.push_back(std::move(v));
    } catch (const std::exception&) {
    }
  }

  EntropyArtifacts out;
  out.delta_hat = est.delta_hat;
  out.estimate = entropy_estimate(fx.group, fx.domain, fx.basepoint, tangents,
                                  config.time_horizon, config.epsilon);
  json doc;
  doc["config_hash"] = session.hash;
  doc["fixture"] = fx.name;
  doc["t"] = config.time_horizon;
  doc["epsilon"] = config.epsilon;
  doc["candidates"] = tangents.size();
  doc["packed_full"] = out.estimate.packed_full;
  doc["packed_half"] = out.estimate.packed_half;
  doc["rate_full"] = out.estimate.rate_full;
  doc["rate_half"] = out.estimate.rate_half;
  doc["slope"] = out.estimate.slope;
  doc["delta_hat"] = est.delta_hat;
  auto file = open_out(config.out_dir, "entropy.json");
  file << doc.dump(2) << "\n";
  out.entropy_json = config.out_dir + "/entropy.json";
  return out;
}

}  // namespace hilbert
