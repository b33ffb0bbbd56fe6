#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cassert>
#include <string>
#include <utility>
#include <vector>

#include "twirl/errors.hpp"

namespace twirl {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

/// Dense univariate polynomial over arbitrary-precision integers, in the
/// symbolic matrix dimension N.  Canonical form: coefficient list ascending
/// in N with a nonzero trailing entry; the zero polynomial is the empty list.
class Polynomial {
 public:
  Polynomial() = default;

  explicit Polynomial(std::vector<BigInt> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

  static Polynomial constant(BigInt c) {
    Polynomial p;
    if (c != 0) p.coeffs_.push_back(std::move(c));
    return p;
  }

  static Polynomial variable() { return Polynomial({BigInt(0), BigInt(1)}); }

  // N - root
  static Polynomial linear_root(const BigInt& root) { return Polynomial({-root, BigInt(1)}); }

  bool is_zero() const { return coeffs_.empty(); }
  bool is_one() const { return coeffs_.size() == 1 && coeffs_[0] == 1; }

  /// degree() is -1 for the zero polynomial.
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

  const std::vector<BigInt>& coeffs() const { return coeffs_; }

  const BigInt& leading() const {
    assert(!coeffs_.empty());
    return coeffs_.back();
  }

  BigInt coeff(std::size_t i) const { return i < coeffs_.size() ? coeffs_[i] : BigInt(0); }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }
  friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<BigInt> r(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
    return Polynomial(std::move(r));
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<BigInt> r(std::max(a.coeffs_.size(), b.coeffs_.size()));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
    return Polynomial(std::move(r));
  }

  Polynomial operator-() const {
    std::vector<BigInt> r(coeffs_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = -coeffs_[i];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<BigInt> r(a.coeffs_.size() + b.coeffs_.size() - 1);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const Polynomial& a, const BigInt& c) {
    if (c == 0) return Polynomial();
    std::vector<BigInt> r(a.coeffs_.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeffs_[i] * c;
    return Polynomial(std::move(r));
  }

  friend Polynomial operator*(const BigInt& c, const Polynomial& a) { return a * c; }

  /// Quotient of an exact division; the remainder must vanish.
  friend Polynomial divide_exact(const Polynomial& a, const Polynomial& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw Error("divide_exact: non-exact polynomial division");
    return q;
  }

  /// Euclidean division over the rationals; only valid here when every
  /// intermediate quotient coefficient stays integral (callers guarantee it).
  friend std::pair<Polynomial, Polynomial> divmod(const Polynomial& a, const Polynomial& b) {
    if (b.is_zero()) throw Error("polynomial division by zero");
    if (a.degree() < b.degree()) return {Polynomial(), a};
    std::vector<BigInt> rem = a.coeffs_;
    std::vector<BigInt> quot(a.degree() - b.degree() + 1);
    for (int i = a.degree(); i >= b.degree(); --i) {
      BigInt& top = rem[static_cast<std::size_t>(i)];
      if (top == 0) continue;
      if (top % b.leading() != 0) throw Error("polynomial division: non-integral quotient");
      BigInt q = top / b.leading();
      quot[static_cast<std::size_t>(i - b.degree())] = q;
      for (int j = 0; j <= b.degree(); ++j)
        rem[static_cast<std::size_t>(i - b.degree() + j)] -= q * b.coeffs_[static_cast<std::size_t>(j)];
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
  }

  /// gcd of all coefficients, non-negative; 0 for the zero polynomial.
  BigInt content() const {
    BigInt g = 0;
    for (const auto& c : coeffs_) {
      g = boost::multiprecision::gcd(g, c);
      if (g == 1) break;
    }
    return g;
  }

  Polynomial primitive_part() const {
    if (is_zero()) return Polynomial();
    BigInt g = content();
    if (leading() < 0) g = -g;
    return divide_by_int(g);
  }

  Polynomial divide_by_int(const BigInt& c) const {
    assert(c != 0);
    std::vector<BigInt> r(coeffs_.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
      assert(coeffs_[i] % c == 0);
      r[i] = coeffs_[i] / c;
    }
    return Polynomial(std::move(r));
  }

  /// Primitive-part Euclid via pseudo-remainders; result has positive leading
  /// coefficient (or is zero).
  static Polynomial gcd(Polynomial a, Polynomial b) {
    if (a.is_zero()) return b.primitive_part() * boost::multiprecision::gcd(a.content(), b.content());
    if (b.is_zero()) return a.primitive_part() * boost::multiprecision::gcd(a.content(), b.content());
    BigInt cont = boost::multiprecision::gcd(a.content(), b.content());
    a = a.primitive_part();
    b = b.primitive_part();
    if (a.degree() < b.degree()) std::swap(a, b);
    while (!b.is_zero()) {
      Polynomial r = pseudo_rem(a, b);
      a = std::move(b);
      b = r.is_zero() ? Polynomial() : r.primitive_part();
    }
    return a.primitive_part() * cont;
  }

  /// lc(b)^(deg a - deg b + 1) * a  mod  b  (up to skipped scalings on zero tops)
  static Polynomial pseudo_rem(const Polynomial& a, const Polynomial& b) {
    assert(!b.is_zero());
    int da = a.degree(), db = b.degree();
    if (da < db) return a;
    std::vector<BigInt> rem = a.coeffs_;
    const BigInt& lb = b.leading();
    for (int i = da; i >= db; --i) {
      BigInt top = rem[static_cast<std::size_t>(i)];
      if (top != 0) {
        for (auto& c : rem) c *= lb;
        for (int j = 0; j <= db; ++j)
          rem[static_cast<std::size_t>(i - db + j)] -= top * b.coeffs_[static_cast<std::size_t>(j)];
      }
      rem.resize(static_cast<std::size_t>(i));  // top term cancelled
    }
    return Polynomial(std::move(rem));
  }

  BigRat evaluate(const BigRat& x) const {
    BigRat r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + BigRat(*it);
    return r;
  }

  BigInt evaluate(const BigInt& x) const {
    BigInt r = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) r = r * x + *it;
    return r;
  }

  /// Human-readable form, highest degree first, e.g. "N^3+3N^2-N-2".
  std::string to_string(const std::string& var = "N") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const BigInt& c = coeffs_[static_cast<std::size_t>(i)];
      if (c == 0) continue;
      BigInt ab = boost::multiprecision::abs(c);
      if (out.empty()) {
        if (c < 0) out += "-";
      } else {
        out += (c < 0) ? "-" : "+";
      }
      bool show_coeff = (ab != 1) || (i == 0);
      if (show_coeff) out += ab.str();
      if (i > 0) {
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
  }

  std::vector<BigInt> coeffs_;
};

}  // namespace twirl
