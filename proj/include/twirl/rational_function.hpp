#pragma once

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

#include "twirl/errors.hpp"
#include "twirl/polynomial.hpp"

namespace twirl {

/// Reduced ratio of integer polynomials in N.  Invariants: den != 0,
/// gcd(num, den) is constant, leading coefficient of den positive.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Polynomial::constant(1)) {}

  RationalFunction(Polynomial num, Polynomial den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw DivisionByZero();
    reduce();
  }

  static RationalFunction constant(BigInt c) {
    return RationalFunction(Polynomial::constant(std::move(c)), Polynomial::constant(1));
  }

  static RationalFunction constant(const BigRat& q) {
    return RationalFunction(Polynomial::constant(boost::multiprecision::numerator(q)),
                            Polynomial::constant(boost::multiprecision::denominator(q)));
  }

  static RationalFunction variable() {
    return RationalFunction(Polynomial::variable(), Polynomial::constant(1));
  }

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  friend bool operator==(const RationalFunction& a, const RationalFunction& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const RationalFunction& a, const RationalFunction& b) { return !(a == b); }

  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }

  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }

  RationalFunction operator-() const {
    RationalFunction r = *this;
    r.num_ = -r.num_;
    return r;
  }

  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
  }

  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.is_zero()) throw DivisionByZero();
    return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
  }

  RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
  RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
  RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }

  /// Exact evaluation at integer or rational N; throws PoleAtN on a
  /// denominator root.
  BigRat evaluate(const BigRat& x) const {
    BigRat d = den_.evaluate(x);
    if (d == 0) throw PoleAtN("pole at N = " + x.str());
    return num_.evaluate(x) / d;
  }

  std::string to_string(const std::string& var = "N") const {
    if (is_zero()) return "0";
    std::string n = num_.to_string(var);
    if (den_.is_one()) return n;
    bool wrap_num = num_.degree() > 0;
    std::string out = wrap_num ? "(" + n + ")" : n;
    out += "/";
    std::string d = den_.to_string(var);
    out += den_.degree() > 0 ? "(" + d + ")" : d;
    return out;
  }

 private:
  void reduce() {
    if (num_.is_zero()) {
      den_ = Polynomial::constant(1);
      return;
    }
    Polynomial g = Polynomial::gcd(num_, den_);
    if (!g.is_one()) {
      num_ = divide_exact(num_, g);
      den_ = divide_exact(den_, g);
    }
    if (den_.leading() < 0) {
      num_ = -num_;
      den_ = -den_;
    }
  }

  Polynomial num_, den_;
};

/// Truncated Laurent expansion at N = infinity: f = sum_i coeffs[i] *
/// N^-(start_power + i).  Exactly `order` coefficients are stored;
/// coefficients beyond the last one are undetermined, not zero.
struct SeriesTail {
  long start_power = 0;
  std::vector<BigRat> coeffs;

  int order() const { return static_cast<int>(coeffs.size()); }

  /// Coefficient of N^-power.  Returns 0 below start_power; throws when the
  /// requested power lies beyond the computed window.
  BigRat coeff_of(long power) const {
    if (power < start_power) return BigRat(0);
    long idx = power - start_power;
    if (idx >= static_cast<long>(coeffs.size()))
      throw Error("series coefficient beyond computed order");
    return coeffs[static_cast<std::size_t>(idx)];
  }

  std::string to_string(const std::string& var = "N") const {
    std::string out;
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      long p = start_power + static_cast<long>(i);
      const BigRat& c = coeffs[i];
      BigRat ab = c < 0 ? BigRat(-c) : c;
      std::string cs = ab.str();
      if (boost::multiprecision::denominator(ab) != 1) cs = "(" + cs + ")";
      std::string term;
      if (p == 0)
        term = cs;
      else if (p > 0)
        term = cs + "/" + var + (p == 1 ? "" : "^" + std::to_string(p));
      else
        term = cs + "*" + var + (p == -1 ? "" : "^" + std::to_string(-p));
      if (out.empty())
        out += (c < 0 ? "-" : "") + term;
      else
        out += (c < 0 ? " - " : " + ") + term;
    }
    out += " + ...";
    return out;
  }
};

/// First `order` exact coefficients of the Laurent expansion of f at
/// N = infinity.  start_power = deg(den) - deg(num) (negative when f grows).
inline SeriesTail series_in_inverse_n(const RationalFunction& f, int order) {
  if (f.is_zero()) throw ZeroFunction();
  if (order < 1) throw Error("series order must be >= 1");
  const auto& nc = f.num().coeffs();
  const auto& dc = f.den().coeffs();
  int dn = f.num().degree(), dd = f.den().degree();
  SeriesTail out;
  out.start_power = dd - dn;
  // reversed-coefficient power series division: c_n = (a_n - sum b_j c_{n-j}) / b_0
  auto a = [&](int i) { return i <= dn ? BigRat(nc[static_cast<std::size_t>(dn - i)]) : BigRat(0); };
  auto b = [&](int i) { return i <= dd ? BigRat(dc[static_cast<std::size_t>(dd - i)]) : BigRat(0); };
  out.coeffs.reserve(static_cast<std::size_t>(order));
  for (int n = 0; n < order; ++n) {
    BigRat s = a(n);
    for (int j = 1; j <= n; ++j) s -= b(j) * out.coeffs[static_cast<std::size_t>(n - j)];
    out.coeffs.push_back(s / b(0));
  }
  return out;
}

// ---- bit-exact JSON coefficient format: {"num": ["c0","c1",...], "den": [...]},
//      decimal strings ascending in N.

inline nlohmann::json to_json(const Polynomial& p) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : p.coeffs()) arr.push_back(c.str());
  return arr;
}

inline Polynomial polynomial_from_json(const nlohmann::json& j) {
  std::vector<BigInt> coeffs;
  for (const auto& s : j) coeffs.emplace_back(s.get<std::string>());
  return Polynomial(std::move(coeffs));
}

inline nlohmann::json to_json(const RationalFunction& f) {
  return nlohmann::json{{"num", to_json(f.num())}, {"den", to_json(f.den())}};
}

inline RationalFunction rational_function_from_json(const nlohmann::json& j) {
  return RationalFunction(polynomial_from_json(j.at("num")), polynomial_from_json(j.at("den")));
}

inline nlohmann::json to_json(const SeriesTail& s) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : s.coeffs) arr.push_back(c.str());
  return nlohmann::json{{"start_power", s.start_power}, {"coeffs", arr}};
}

}  // namespace twirl
