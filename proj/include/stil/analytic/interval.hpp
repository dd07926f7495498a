#pragma once

// Closed real intervals with outward rounding, so enclosures stay sound
// under the default round-to-nearest mode.

#include <algorithm>
#include <cmath>
#include <limits>

namespace stil::analytic {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double v) { return {v, v}; }
  static Interval entire() {
    return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }
  bool empty() const { return !(lo <= hi); }
  double width() const { return hi - lo; }
  double mid() const { return lo + (hi - lo) / 2.0; }
  bool contains(double v) const { return lo <= v && v <= hi; }
  double magnitude() const { return std::max(std::abs(lo), std::abs(hi)); }
};

inline double round_down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
inline double round_up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }

inline Interval widen(double lo, double hi) { return {round_down(lo), round_up(hi)}; }

// Directed operations: the rounding error is recovered exactly (TwoSum, fma)
// and the result is moved one ulp only when it was rounded the wrong way.
namespace rounding {
inline double sum_err(double a, double b, double s) {
  const double bb = s - a;
  return (a - (s - bb)) + (b - bb);
}
inline double add_dn(double a, double b) {
  const double s = a + b;
  return std::isfinite(s) && sum_err(a, b, s) < 0.0 ? round_down(s) : s;
}
inline double add_up(double a, double b) {
  const double s = a + b;
  return std::isfinite(s) && sum_err(a, b, s) > 0.0 ? round_up(s) : s;
}
// 0 * inf is taken as 0: the factors enclose finite values.
inline double mul_dn(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  return std::isfinite(p) && std::fma(a, b, -p) < 0.0 ? round_down(p) : p;
}
inline double mul_up(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  const double p = a * b;
  return std::isfinite(p) && std::fma(a, b, -p) > 0.0 ? round_up(p) : p;
}
inline double div_dn(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q) || !std::isfinite(a)) return q;
  const double r = std::fma(-q, b, a);  // a - q*b, exact
  return (r != 0.0 && (r > 0.0) != (b > 0.0)) ? round_down(q) : q;
}
inline double div_up(double a, double b) {
  const double q = a / b;
  if (!std::isfinite(q) || !std::isfinite(a)) return q;
  const double r = std::fma(-q, b, a);
  return (r != 0.0 && (r > 0.0) == (b > 0.0)) ? round_up(q) : q;
}
}  // namespace rounding

inline Interval operator+(const Interval& a, const Interval& b) {
  return {rounding::add_dn(a.lo, b.lo), rounding::add_up(a.hi, b.hi)};
}
inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }
inline Interval operator-(const Interval& a, const Interval& b) { return a + (-b); }

inline Interval operator*(const Interval& a, const Interval& b) {
  using namespace rounding;
  return {std::min({mul_dn(a.lo, b.lo), mul_dn(a.lo, b.hi), mul_dn(a.hi, b.lo), mul_dn(a.hi, b.hi)}),
          std::max({mul_up(a.lo, b.lo), mul_up(a.lo, b.hi), mul_up(a.hi, b.lo), mul_up(a.hi, b.hi)})};
}

/// Division where the divisor excludes zero; otherwise the entire line.
inline Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo <= 0.0 && b.hi >= 0.0) return Interval::entire();
  using namespace rounding;
  return {std::min({div_dn(a.lo, b.lo), div_dn(a.lo, b.hi), div_dn(a.hi, b.lo), div_dn(a.hi, b.hi)}),
          std::max({div_up(a.lo, b.lo), div_up(a.lo, b.hi), div_up(a.hi, b.lo), div_up(a.hi, b.hi)})};
}

inline Interval pow(const Interval& x, int k) {
  if (k == 0) return Interval::point(1.0);
  if (k == 1) return x;
  Interval r = x;
  for (int i = 1; i < k; ++i) r = r * x;
  if (k % 2 == 0) r.lo = std::max(r.lo, 0.0);
  if (k % 2 == 0 && x.lo >= 0.0) return r;
  if (k % 2 == 0 && x.lo < 0.0 && x.hi > 0.0) {
    // tighter even power: [0, max(|lo|,|hi|)^k]
    Interval m{0.0, x.magnitude()};
    Interval t = m;
    for (int i = 1; i < k; ++i) t = t * m;
    return {0.0, std::min(r.hi, t.hi)};
  }
  return r;
}

inline Interval intersect(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }
inline Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

}  // namespace stil::analytic
