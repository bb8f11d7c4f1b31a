#pragma once

#include <cmath>
#include <limits>

namespace cppll::numeric {

/// Euclidean remainder: result in [0, m) for m > 0.
inline double euclid_mod(double x, double m) {
  double r = std::fmod(x, m);
  if (r < 0.0) r += m;
  // fmod of a tiny negative x can round up to exactly m.
  if (r >= m) r = 0.0;
  return r;
}

/// Non-negative root of a*x^2 + b*x + q = 0 for a > 0, q <= 0.
///
/// With q <= 0 the discriminant is at least b^2, so the "+" root is real and
/// non-negative. When b > 0 the textbook form (-b + sqrt(D)) / (2a) cancels;
/// the conjugate form -2q / (b + sqrt(D)) is used there instead.
inline double nonnegative_root(double a, double b, double q, double disc) {
  double s = std::sqrt(disc);
  if (b > 0.0) return (-2.0 * q) / (b + s);
  return (-b + s) / (2.0 * a);
}

/// Smallest strictly positive root of a*x^2 + b*x + q = 0, or +inf when none.
/// Handles a == 0 as the linear case.
inline double smallest_positive_root(double a, double b, double q) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a == 0.0) {
    if (b == 0.0) return kInf;
    double x = -q / b;
    return x > 0.0 ? x : kInf;
  }
  double disc = b * b - 4.0 * a * q;
  if (disc < 0.0) return kInf;
  double s = std::sqrt(disc);
  double t = -0.5 * (b >= 0.0 ? b + s : b - s);
  double r1 = t / a;
  double r2 = t != 0.0 ? q / t : r1;
  double best = kInf;
  if (r1 > 0.0) best = r1;
  if (r2 > 0.0 && r2 < best) best = r2;
  return best;
}

}  // namespace cppll::numeric
