#include "hilbertflow/projective.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>

namespace hilbert {

namespace {

int first_significant_index(const Vec& v) {
  const double scale = v.cwiseAbs().maxCoeff();
  for (int i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-9 * scale) return i;
  }
  return -1;
}

}  // namespace

ProjectivePoint::ProjectivePoint(Vec coords) : coords_(std::move(coords)) {
  const double norm = coords_.norm();
  if (!(norm > 0.0) || !coords_.allFinite()) {
    throw std::invalid_argument("ProjectivePoint: coordinates must be nonzero and finite");
  }
  coords_ /= norm;
  const int lead = first_significant_index(coords_);
  if (lead >= 0 && coords_[lead] < 0.0) coords_ = -coords_;
}

bool ProjectivePoint::approx_equal(const ProjectivePoint& other, double tolerance) const {
  if (coords_.size() != other.coords_.size()) return false;
  return (coords_ - other.coords_).cwiseAbs().maxCoeff() <= tolerance ||
         (coords_ + other.coords_).cwiseAbs().maxCoeff() <= tolerance;
}

ProjectivePoint ProjectivePoint::basis(int i, int n) {
  Vec v = Vec::Zero(n);
  v[i] = 1.0;
  return ProjectivePoint(std::move(v));
}

ProjectivePoint ProjectivePoint::from_chart(const Vec& chart_coords) {
  Vec v(chart_coords.size() + 1);
  v.head(chart_coords.size()) = chart_coords;
  v[chart_coords.size()] = 1.0;
  return ProjectivePoint(std::move(v));
}

ProjectiveMap::ProjectiveMap(Mat m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 2) {
    throw std::invalid_argument("ProjectiveMap: matrix must be square of size >= 2");
  }
  const int n = static_cast<int>(m_.rows());
  if (!m_.allFinite()) {
    throw std::invalid_argument("ProjectiveMap: matrix must be invertible and finite");
  }
  // |det| through singular values in log space, which stays usable for
  // moderately ill-conditioned matrices where a direct determinant fails.
  Eigen::JacobiSVD<Mat> svd(m_);
  const auto& sv = svd.singularValues();
  if (!(sv[n - 1] > 0.0)) {
    throw std::invalid_argument("ProjectiveMap: matrix must be invertible and finite");
  }
  double log_scale = 0.0;
  for (int i = 0; i < n; ++i) log_scale += std::log(sv[i]);
  m_ *= std::exp(-log_scale / n);
  canonical_sign();
}

void ProjectiveMap::canonical_sign() {
  Eigen::Map<const Vec> flat(m_.data(), m_.size());
  const int lead = first_significant_index(flat);
  if (lead >= 0 && flat[lead] < 0.0) m_ = -m_;
}

ProjectiveMap ProjectiveMap::from_canonical(Mat m) {
  ProjectiveMap out(Mat::Identity(m.rows(), m.cols()));
  if (!m.allFinite()) {
    throw std::invalid_argument("ProjectiveMap: matrix must be invertible and finite");
  }
  out.m_ = std::move(m);
  out.canonical_sign();
  return out;
}

ProjectiveMap ProjectiveMap::identity(int n) { return ProjectiveMap(Mat::Identity(n, n)); }

ProjectiveMap ProjectiveMap::inverse() const { return from_canonical(m_.inverse()); }

ProjectiveMap ProjectiveMap::operator*(const ProjectiveMap& rhs) const {
  return from_canonical(m_ * rhs.m_);
}

bool ProjectiveMap::approx_equal(const ProjectiveMap& other, double tolerance) const {
  if (m_.rows() != other.m_.rows()) return false;
  return (m_ - other.m_).cwiseAbs().maxCoeff() <= tolerance ||
         (m_ + other.m_).cwiseAbs().maxCoeff() <= tolerance;
}

bool collinear(std::span<const ProjectivePoint> points, double tolerance) {
  if (points.size() <= 2) return true;
  const int n = points[0].ambient_dim();
  Mat stack(static_cast<int>(points.size()), n);
  for (size_t i = 0; i < points.size(); ++i) stack.row(static_cast<int>(i)) = points[i].coords();
  Eigen::JacobiSVD<Mat> svd(stack);
  const auto& sv = svd.singularValues();
  if (sv.size() < 3) return true;
  return sv[2] <= tolerance * sv[0];
}

namespace {

// Coefficients of each point in an orthonormal basis of the spanned line,
// providing affine coordinates for cross-ratio arithmetic.
Mat line_coefficients(std::span<const ProjectivePoint> points) {
  const int n = points[0].ambient_dim();
  Mat stack(static_cast<int>(points.size()), n);
  for (size_t i = 0; i < points.size(); ++i) stack.row(static_cast<int>(i)) = points[i].coords();
  Eigen::JacobiSVD<Mat> svd(stack, Eigen::ComputeThinV);
  Mat basis = svd.matrixV().leftCols(2);  // n x 2
  return stack * basis;                   // k x 2 coefficients (alpha_i, beta_i)
}

double pair_det(const Mat& coeff, int i, int j) {
  return coeff(i, 0) * coeff(j, 1) - coeff(j, 0) * coeff(i, 1);
}

}  // namespace

double cross_ratio(const ProjectivePoint& a, const ProjectivePoint& x,
                   const ProjectivePoint& y, const ProjectivePoint& b) {
  const ProjectivePoint pts[4] = {a, x, y, b};
  if (!collinear(pts)) throw std::invalid_argument("cross_ratio: not collinear");
  const Mat coeff = line_coefficients(pts);
  const double d_ay = pair_det(coeff, 0, 2);
  const double d_xb = pair_det(coeff, 1, 3);
  const double d_ax = pair_det(coeff, 0, 1);
  const double d_yb = pair_det(coeff, 2, 3);
  // a=x, a=y, a=b, x=b or y=b collapse the ratio; x=y is the allowed
  // coincidence and gives 1.
  const double scale = coeff.cwiseAbs().maxCoeff();
  const double degenerate = 1e-12 * scale * scale;
  if (std::abs(d_ax) <= degenerate || std::abs(d_yb) <= degenerate ||
      std::abs(pair_det(coeff, 0, 3)) <= degenerate) {
    throw std::invalid_argument("cross_ratio: degenerate tuple");
  }
  return (d_ay * d_xb) / (d_ax * d_yb);
}

double collinear_param(const ProjectivePoint& a, const ProjectivePoint& b,
                       const ProjectivePoint& p) {
  const ProjectivePoint pts[3] = {a, b, p};
  if (!collinear(pts)) throw std::invalid_argument("collinear_param: point off the line");
  // Fix the affine chart of the line by the coordinate all three points see
  // most strongly, then read off the affine combination p = (1-t) a + t b.
  const Vec &av = a.coords(), &bv = b.coords(), &pv = p.coords();
  int chart = -1;
  double best = 0.0;
  for (int i = 0; i < av.size(); ++i) {
    const double m = std::min({std::abs(av[i]), std::abs(bv[i]), std::abs(pv[i])});
    if (m > best) {
      best = m;
      chart = i;
    }
  }
  if (chart < 0 || best <= 1e-12) {
    throw std::invalid_argument("collinear_param: p at infinity of the [a,b] chart");
  }
  const Vec ac = av / av[chart], bc = bv / bv[chart], pc = pv / pv[chart];
  const Vec dir = bc - ac;
  const double denom = dir.squaredNorm();
  if (denom <= 1e-24) throw std::invalid_argument("collinear_param: a and b coincide");
  return (pc - ac).dot(dir) / denom;
}

ProjectivePoint apply(const ProjectiveMap& g, const ProjectivePoint& p) {
  return ProjectivePoint(g.matrix() * p.coords());
}

namespace {

ProjectivePoint real_eigenvector(const Mat& m, double eigenvalue) {
  const int n = static_cast<int>(m.rows());
  Mat shifted = m - eigenvalue * Mat::Identity(n, n);
  // Smallest right singular vector spans the eigenline.
  Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeFullV);
  return ProjectivePoint(svd.matrixV().col(n - 1));
}

}  // namespace

SpectralClass classify_map(const ProjectiveMap& g) {
  const Mat& m = g.matrix();
  const int n = static_cast<int>(m.rows());

  Eigen::EigenSolver<Mat> eig(m, /*computeEigenvectors=*/false);
  if (eig.info() != Eigen::Success) throw std::runtime_error("classify_map: spectral failure");
  Eigen::JacobiSVD<Mat> svd(m);

  SpectralClass out;
  std::vector<std::complex<double>> values(eig.eigenvalues().data(),
                                           eig.eigenvalues().data() + n);
  std::sort(values.begin(), values.end(),
            [](const auto& l, const auto& r) { return std::abs(l) > std::abs(r); });
  out.eigen_moduli.reserve(n);
  for (const auto& v : values) out.eigen_moduli.push_back(std::abs(v));
  out.singular_values.assign(svd.singularValues().data(), svd.singularValues().data() + n);
  // Canonical maps have |det| = 1, so the product of the moduli is 1; the
  // smallest one is recovered from the others, which stay accurate at norms
  // where the direct small eigenvalue/singular value drowns in roundoff.
  auto rebalance = [n](std::vector<double>& vals) {
    double prod = 1.0;
    for (int i = 0; i + 1 < n; ++i) prod *= vals[i];
    if (prod > 0.0 && std::isfinite(prod)) vals[n - 1] = 1.0 / prod;
  };
  rebalance(out.eigen_moduli);
  rebalance(out.singular_values);

  out.ell = 0.5 * std::log(out.eigen_moduli.front() / out.eigen_moduli.back());
  out.kappa = 0.5 * std::log(out.singular_values.front() / out.singular_values.back());

  const double top = out.eigen_moduli[0];
  const double gap_top = out.eigen_moduli[0] / out.eigen_moduli[1];
  const double gap_bot = out.eigen_moduli[n - 2] / out.eigen_moduli[n - 1];
  const double threshold = 1.0 + tol::spectral_gap;
  out.gap_borderline = (gap_top > 1.0 + tol::spectral_gap / 10 && gap_top < 1.0 + tol::spectral_gap * 10) ||
                       (gap_bot > 1.0 + tol::spectral_gap / 10 && gap_bot < 1.0 + tol::spectral_gap * 10);

  const bool top_real = std::abs(values.front().imag()) <= tol::spectral_imag * top;
  const bool bot_real = std::abs(values.back().imag()) <= tol::spectral_imag * top;
  out.proximal = gap_top > threshold && top_real;
  out.biproximal = out.proximal && gap_bot > threshold && bot_real;

  if (out.proximal) out.x_plus = real_eigenvector(m, values.front().real());
  if (out.biproximal) {
    out.x_minus = real_eigenvector(m, values.back().real());
    // Invariant complement: span of the remaining eigenvectors, realified.
    Eigen::EigenSolver<Mat> eigv(m, /*computeEigenvectors=*/true);
    if (eigv.info() == Eigen::Success && n > 2) {
      std::vector<int> order(n);
      for (int i = 0; i < n; ++i) order[i] = i;
      std::sort(order.begin(), order.end(), [&](int l, int r) {
        return std::abs(eigv.eigenvalues()[l]) > std::abs(eigv.eigenvalues()[r]);
      });
      Mat zero(n, n - 2);
      int col = 0;
      bool ok = true;
      for (int k = 1; k + 1 < n && col < n - 2; ++k) {
        Eigen::VectorXcd v = eigv.eigenvectors().col(order[k]);
        Vec re = v.real(), im = v.imag();
        if (im.cwiseAbs().maxCoeff() > 1e-9 * re.cwiseAbs().maxCoeff()) {
          zero.col(col++) = re.normalized();
          if (col < n - 2) zero.col(col++) = im.normalized();
        } else {
          zero.col(col++) = re.normalized();
        }
      }
      if (col == n - 2) {
        Eigen::ColPivHouseholderQR<Mat> qr(zero);
        ok = qr.rank() == n - 2;
      } else {
        ok = false;
      }
      if (ok) {
        out.x_zero = zero;
      } else {
        out.x_zero_ambiguous = true;
      }
    }
  }
  return out;
}

double translation_length(const ProjectiveMap& g) { return classify_map(g).ell; }

}  // namespace hilbert
