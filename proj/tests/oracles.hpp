#pragma once

// Independent closed-form oracles used to freeze expected values.  These
// deliberately avoid the library's cross-ratio machinery: the Klein-model
// formulas go through the Minkowski form, the simplex formula through
// coordinate ratios.

#include "hilbertflow/projective.hpp"

#include <cmath>
#include <random>

namespace oracle {

// Hyperbolic distance in the Klein disk via the Minkowski lift:
// cosh d = (1 - u.v) / sqrt((1-|u|^2)(1-|v|^2)).
inline double klein_distance(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
  const double num = 1.0 - u.dot(v);
  const double den = std::sqrt((1.0 - u.squaredNorm()) * (1.0 - v.squaredNorm()));
  return std::acosh(std::max(1.0, num / den));
}

// Busemann function of the Klein disk at boundary direction xi (unit vector):
// b_xi(u, v) = log((1 - u.xi)/sqrt(1-|u|^2)) - log((1 - v.xi)/sqrt(1-|v|^2)).
inline double klein_busemann(const Eigen::Vector2d& xi, const Eigen::Vector2d& u,
                             const Eigen::Vector2d& v) {
  auto horo = [&](const Eigen::Vector2d& p) {
    return std::log((1.0 - p.dot(xi)) / std::sqrt(1.0 - p.squaredNorm()));
  };
  return horo(u) - horo(v);
}

// Hilbert distance on the open simplex: half the largest log coordinate-ratio
// discrepancy.
inline double simplex_distance(const hilbert::Vec& x, const hilbert::Vec& y) {
  double best = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    for (int j = 0; j < x.size(); ++j) {
      best = std::max(best, std::log((x[i] * y[j]) / (x[j] * y[i])));
    }
  }
  return 0.5 * best;
}

// Point at Euclidean radius tanh(r) in direction theta: Hilbert distance r
// from the disk center.
inline Eigen::Vector2d disk_point(double theta, double r) {
  return std::tanh(r) * Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

inline hilbert::ProjectivePoint chart2(const Eigen::Vector2d& u) {
  hilbert::Vec v(3);
  v << u.x(), u.y(), 1.0;
  return hilbert::ProjectivePoint(v);
}

inline Eigen::Vector2d chart2_of(const hilbert::ProjectivePoint& p) {
  const auto& c = p.coords();
  return Eigen::Vector2d(c[0] / c[2], c[1] / c[2]);
}

// Random interior point of the disk, radius capped away from the boundary.
inline Eigen::Vector2d random_disk_point(std::mt19937_64& rng, double max_radius = 2.5) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return disk_point(2.0 * M_PI * unif(rng), max_radius * unif(rng));
}

// Random interior point of the standard simplex, bounded away from the faces.
inline hilbert::Vec random_simplex_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  hilbert::Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = unif(rng);
  return v / v.sum();
}

// SO(2,1) boost of translation length s along the x-axis of the Klein disk.
inline hilbert::Mat boost_x(double s) {
  hilbert::Mat m(3, 3);
  m << std::cosh(s), 0.0, std::sinh(s), 0.0, 1.0, 0.0, std::sinh(s), 0.0, std::cosh(s);
  return m;
}

// Rotation of the Klein disk about its center.
inline hilbert::Mat rotation_z(double theta) {
  hilbert::Mat m(3, 3);
  m << std::cos(theta), -std::sin(theta), 0.0, std::sin(theta), std::cos(theta), 0.0, 0.0,
      0.0, 1.0;
  return m;
}

}  // namespace oracle
