#include "hilbertflow/fixtures.hpp"

#include <json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>

namespace hilbert {

namespace {

Mat boost_x(double s) {
  Mat m(3, 3);
  m << std::cosh(s), 0, std::sinh(s), 0, 1, 0, std::sinh(s), 0, std::cosh(s);
  return m;
}

Mat boost_y(double s) {
  Mat m(3, 3);
  m << 1, 0, 0, 0, std::cosh(s), std::sinh(s), 0, std::sinh(s), std::cosh(s);
  return m;
}

ProjectivePoint chart_point(double x, double y) {
  Vec v(3);
  v << x, y, 1.0;
  return ProjectivePoint(v);
}

}  // namespace

Fixture make_disk_schottky(double s, double gap) {
  const double margin = std::sinh(0.5 * s);
  if (margin * margin < 1.0 + gap) {
    throw std::invalid_argument(
        "disk-schottky: boosts too short for the ping-pong margin (need sinh(s/2)^2 >= 1+gap)");
  }
  auto group = GroupPresentation::from_generators(
      {{"a", boost_x(s)}, {"b", boost_y(s)}}, /*free=*/true);
  return {"disk-schottky", std::move(group), make_unit_ball(2), chart_point(0.0, 0.0), 8};
}

Fixture make_triangle_reflection(int p, int q, int r) {
  if (p < 2 || q < 2 || r < 2 || 1.0 / p + 1.0 / q + 1.0 / r >= 1.0) {
    throw std::invalid_argument("triangle-reflection: need 1/p + 1/q + 1/r < 1");
  }
  Mat gram(3, 3);
  gram << 1.0, -std::cos(M_PI / p), -std::cos(M_PI / q),
      -std::cos(M_PI / p), 1.0, -std::cos(M_PI / r),
      -std::cos(M_PI / q), -std::cos(M_PI / r), 1.0;
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  // Order eigenvalues descending so the signature matches diag(1,1,-1).
  Eigen::Vector3d d = eig.eigenvalues().reverse();
  Mat q_cols(3, 3);
  for (int i = 0; i < 3; ++i) q_cols.col(i) = eig.eigenvectors().col(2 - i);
  if (!(d[0] > 0 && d[1] > 0 && d[2] < 0)) {
    throw std::runtime_error("triangle-reflection: Gram matrix not Lorentzian");
  }
  Mat m = q_cols * d.cwiseAbs().cwiseSqrt().asDiagonal();
  const Mat form = Eigen::Vector3d(1, 1, -1).asDiagonal();

  std::vector<std::pair<std::string, Mat>> gens;
  Mat vb(3, 3);  // rows: B v_i, for the chamber solve below
  for (int i = 0; i < 3; ++i) {
    const Vec v = m.row(i).transpose();
    gens.emplace_back("r" + std::to_string(i + 1),
                      Mat(Mat::Identity(3, 3) - 2.0 * v * (form * v).transpose()));
    vb.row(i) = (form * v).transpose();
  }

  // Chamber interior point: equidistant from the three mirrors, then a small
  // asymmetric nudge off the symmetry axes.
  Vec x = vb.colPivHouseholderQr().solve(Vec::Constant(3, -1.0));
  if (x.dot(form * x) >= 0.0) x = -x;
  if (x.dot(form * x) >= 0.0) {
    throw std::runtime_error("triangle-reflection: chamber solve left the disk");
  }
  ProjectivePoint o = chart_point(x[0] / x[2] + 0.017, x[1] / x[2] + 0.009);

  auto group = GroupPresentation::from_generators(gens, /*free=*/false);
  return {"triangle-reflection", std::move(group), make_unit_ball(2), o, 40};
}

Fixture make_simplex_lattice() {
  auto group = GroupPresentation::from_generators(
      {{"a", Mat(Eigen::Vector3d(4, 2, 1).asDiagonal())},
       {"b", Mat(Eigen::Vector3d(2, 4, 1).asDiagonal())}},
      /*free=*/false);
  return {"simplex-lattice", std::move(group), make_simplex(2),
          ProjectivePoint(Vec::Ones(3)), 10};
}

Fixture make_cyclic(double boost) {
  if (!(boost > 0.0)) throw std::invalid_argument("cyclic: boost length must be positive");
  auto group =
      GroupPresentation::from_generators({{"g", boost_x(boost)}}, /*free=*/true);
  return {"cyclic", std::move(group), make_unit_ball(2), chart_point(0.0, 0.0), 10};
}

namespace {

std::map<std::string, double> parse_params(const std::string& spec, std::string* name) {
  const auto colon = spec.find(':');
  *name = spec.substr(0, colon);
  std::map<std::string, double> params;
  if (colon == std::string::npos) return params;
  std::string rest = spec.substr(colon + 1);
  size_t pos = 0;
  while (pos < rest.size()) {
    const auto comma = rest.find(',', pos);
    const std::string item = rest.substr(pos, comma == std::string::npos ? comma : comma - pos);
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("fixture spec: expected key=value in '" + item + "'");
    }
    params[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    pos = comma == std::string::npos ? rest.size() : comma + 1;
  }
  return params;
}

double param(const std::map<std::string, double>& params, const std::string& key,
             double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

Fixture builtin_fixture(const std::string& spec) {
  std::string name;
  const auto params = parse_params(spec, &name);
  if (name == "disk-schottky") {
    return make_disk_schottky(param(params, "s", 2.0), param(params, "gap", 0.2));
  }
  if (name == "triangle-reflection") {
    return make_triangle_reflection(static_cast<int>(param(params, "p", 3)),
                                    static_cast<int>(param(params, "q", 3)),
                                    static_cast<int>(param(params, "r", 4)));
  }
  if (name == "simplex-lattice") return make_simplex_lattice();
  if (name == "cyclic") return make_cyclic(param(params, "boost", 1.0));
  throw std::invalid_argument("unknown builtin fixture '" + name + "'");
}

namespace {

using nlohmann::json;

Mat parse_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("fixture: matrix must be an array of rows");
  const int n = static_cast<int>(rows.size());
  Mat m(n, static_cast<int>(rows[0].size()));
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != m.cols()) {
      throw std::invalid_argument("fixture: ragged matrix rows");
    }
    for (int j = 0; j < m.cols(); ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

Vec parse_vector(const json& arr) {
  Vec v(static_cast<int>(arr.size()));
  for (int i = 0; i < v.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

DomainPtr parse_domain(const json& dom) {
  const std::string type = dom.at("type").get<std::string>();
  if (type == "ellipsoid") {
    return make_ellipsoid(parse_matrix(dom.at("form")), parse_vector(dom.at("chart")));
  }
  if (type == "unit_ball") return make_unit_ball(dom.value("dim", 2));
  if (type == "simplex") return make_simplex(dom.value("dim", 2));
  if (type == "polytope" || type == "orbit_hull") {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& row : dom.at(type == "polytope" ? "vertices" : "points")) {
      pts.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
    return type == "polytope" ? make_polytope(pts) : make_orbit_hull(pts);
  }
  throw std::invalid_argument("fixture: unknown domain type '" + type + "'");
}

}  // namespace

Fixture parse_fixture_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("fixture: JSON parse error: ") + err.what());
  }
  std::vector<std::pair<std::string, Mat>> gens;
  if (!doc.contains("generators") || !doc["generators"].is_array() || doc["generators"].empty()) {
    throw std::invalid_argument("fixture: missing generators array");
  }
  for (const auto& g : doc["generators"]) {
    const Mat m = parse_matrix(g.at("matrix"));
    if (std::abs(m.determinant()) < 1e-12) {
      throw std::invalid_argument("fixture: generator '" +
                                  g.value("label", std::string("?")) + "' is singular");
    }
    gens.emplace_back(g.value("label", "g" + std::to_string(gens.size())), m);
  }
  Fixture out{doc.value("name", "user"),
              GroupPresentation::from_generators(gens, doc.value("free", false)),
              doc.contains("domain") ? parse_domain(doc["domain"]) : make_unit_ball(2),
              ProjectivePoint(Vec::Ones(3)), doc.value("depth", 8)};
  if (doc.contains("basepoint")) {
    out.basepoint = ProjectivePoint(parse_vector(doc["basepoint"]));
  } else if (!doc.contains("domain")) {
    out.basepoint = chart_point(0.0, 0.0);
  } else {
    // Default basepoint: kept only if inside; otherwise callers must supply one.
    Vec ones = Vec::Ones(out.domain->ambient_dim());
    out.basepoint = ProjectivePoint(ones);
  }
  if (!out.domain->strictly_inside(out.basepoint)) {
    throw std::invalid_argument("fixture: basepoint not inside the domain");
  }
  return out;
}

Fixture load_fixture_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("fixture: cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_fixture_json(text);
}

Fixture resolve_fixture(const std::string& spec) {
  if (spec.find(".json") != std::string::npos || spec.find('/') != std::string::npos) {
    return load_fixture_json(spec);
  }
  return builtin_fixture(spec);
}

}  // namespace hilbert
