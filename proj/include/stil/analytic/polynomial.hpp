#pragma once

// Sparse multivariate polynomials with exact rational coefficients over
// named real variables.

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "stil/analytic/interval.hpp"
#include "stil/error.hpp"

namespace stil::analytic {

using Rational = boost::multiprecision::cpp_rational;

/// Sorted (variable, exponent) pairs; empty for the constant monomial.
using Monomial = std::vector<std::pair<std::string, int>>;

/// Exact rational from a decimal such as "-12.5", "3/4", "1e-6" or "7".
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw Error("parse-error", "empty number");
  if (auto slash = text.find('/'); slash != std::string::npos)
    return Rational(parse_rational(text.substr(0, slash)) / parse_rational(text.substr(slash + 1)));
  std::string mant = text;
  long exp10 = 0;
  if (auto e = text.find_first_of("eE"); e != std::string::npos) {
    mant = text.substr(0, e);
    exp10 = std::stol(text.substr(e + 1));
  }
  bool neg = false;
  std::size_t i = 0;
  if (i < mant.size() && (mant[i] == '-' || mant[i] == '+')) neg = mant[i++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  bool any = false;
  for (; i < mant.size(); ++i) {
    if (mant[i] == '.') {
      for (std::size_t j = i + 1; j < mant.size(); ++j) {
        if (!std::isdigit(static_cast<unsigned char>(mant[j]))) throw Error("parse-error", "bad number " + text);
        digits = digits * 10 + (mant[j] - '0');
        --exp10;
        any = true;
      }
      break;
    }
    if (!std::isdigit(static_cast<unsigned char>(mant[i]))) throw Error("parse-error", "bad number " + text);
    digits = digits * 10 + (mant[i] - '0');
    any = true;
  }
  if (!any) throw Error("parse-error", "bad number " + text);
  Rational r(digits);
  boost::multiprecision::cpp_int scale = boost::multiprecision::pow(boost::multiprecision::cpp_int(10),
                                                                    static_cast<unsigned>(std::abs(exp10)));
  if (exp10 > 0) r *= Rational(scale);
  if (exp10 < 0) r /= Rational(scale);
  return neg ? Rational(-r) : r;
}

inline std::string to_string(const Rational& r) {
  if (boost::multiprecision::denominator(r) == 1) return boost::multiprecision::numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

/// Outward enclosure of a rational as a double interval.
inline Interval enclose(const Rational& r) {
  const double d = r.convert_to<double>();
  if (Rational(d) == r) return Interval::point(d);
  return widen(d, d);
}

class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(const Rational& c) {  // NOLINT: implicit constant
    if (c != 0) terms_[{}] = c;
  }
  Polynomial(int c) : Polynomial(Rational(c)) {}  // NOLINT

  static Polynomial var(const std::string& name) {
    Polynomial p;
    p.terms_[{{name, 1}}] = 1;
    return p;
  }
  static Polynomial constant(double v) { return Polynomial(Rational(v)); }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }
  Rational constant_term() const {
    auto it = terms_.find({});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
      int s = 0;
      for (const auto& [v, e] : m) s += e;
      d = std::max(d, s);
    }
    return d;
  }
  bool is_linear() const { return degree() <= 1; }

  /// Coefficient of a linear variable term (0 when absent).
  Rational linear_coeff(const std::string& v) const {
    auto it = terms_.find({{v, 1}});
    return it == terms_.end() ? Rational(0) : it->second;
  }

  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    for (const auto& [m, c] : terms_)
      for (const auto& [v, e] : m) out.push_back(v);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(const Polynomial& a) { return Polynomial{} - a; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial r;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) r.add_term(multiply(ma, mb), ca * cb);
    return r;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  Polynomial pow(int k) const {
    Polynomial r(1);
    for (int i = 0; i < k; ++i) r = r * *this;
    return r;
  }

  Polynomial derivative(const std::string& v) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].first != v) continue;
        Monomial md = m;
        const int e = md[i].second;
        if (e == 1)
          md.erase(md.begin() + static_cast<std::ptrdiff_t>(i));
        else
          md[i].second = e - 1;
        r.add_term(md, c * e);
      }
    }
    return r;
  }

  /// Substitutes a rational value for a variable.
  Polynomial substitute(const std::string& v, const Rational& value) const {
    Polynomial r;
    for (const auto& [m, c] : terms_) {
      Monomial rest;
      Rational coeff = c;
      for (const auto& [name, e] : m) {
        if (name == v) {
          for (int k = 0; k < e; ++k) coeff *= value;
        } else {
          rest.emplace_back(name, e);
        }
      }
      r.add_term(rest, coeff);
    }
    return r;
  }

  template <typename Lookup>
  Rational eval_exact(Lookup&& value_of) const {
    Rational s = 0;
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (const auto& [v, e] : m) {
        const Rational x = value_of(v);
        for (int k = 0; k < e; ++k) t *= x;
      }
      s += t;
    }
    return s;
  }

  template <typename Lookup>
  double eval(Lookup&& value_of) const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c.template convert_to<double>();
      for (const auto& [v, e] : m) t *= std::pow(value_of(v), e);
      s += t;
    }
    return s;
  }

  /// Natural interval extension.
  template <typename Lookup>
  Interval eval_interval(Lookup&& box_of) const {
    Interval s = Interval::point(0.0);
    for (const auto& [m, c] : terms_) {
      Interval t = enclose(c);
      for (const auto& [v, e] : m) t = t * analytic::pow(box_of(v), e);
      s = s + t;
    }
    return s;
  }

 private:
  static Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial r;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
        r.push_back(a[i++]);
      } else if (i == a.size() || b[j].first < a[i].first) {
        r.push_back(b[j++]);
      } else {
        r.emplace_back(a[i].first, a[i].second + b[j].second);
        ++i;
        ++j;
      }
    }
    return r;
  }
  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::map<Monomial, Rational> terms_;
};

inline Polynomial var(const std::string& name) { return Polynomial::var(name); }

}  // namespace stil::analytic
