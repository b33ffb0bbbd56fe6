#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "twirl/linear_solve.hpp"
#include "twirl/polynomial.hpp"
#include "twirl/rational_function.hpp"

using namespace twirl;

namespace {

Polynomial P(std::initializer_list<long> coeffs) {
  std::vector<BigInt> c;
  for (long x : coeffs) c.emplace_back(x);
  return Polynomial(std::move(c));
}

RationalFunction RF(std::initializer_list<long> num, std::initializer_list<long> den) {
  return RationalFunction(P(num), P(den));
}

const Polynomial kOne = Polynomial::constant(1);
const Polynomial kN = Polynomial::variable();

// M_3(N) = 3(N^3+3N^2-N-2) / ((N-1)(N+1)(N+3))
RationalFunction m3() { return RF({-6, -3, 9, 3}, {-3, -1, 3, 1}); }

// M_5(N) = (5N^5+25N^4-25N^3-125N^2+20N+80) / ((N-2)(N-1)(N+1)(N+2)(N+5))
RationalFunction m5() { return RF({80, 20, -125, -25, 25, 5}, {20, 4, -25, -5, 5, 1}); }

Polynomial random_poly(std::mt19937_64& rng, int max_deg = 4) {
  std::uniform_int_distribution<int> deg(0, max_deg), coeff(-9, 9);
  std::vector<BigInt> c(static_cast<std::size_t>(deg(rng)) + 1);
  for (auto& x : c) x = coeff(rng);
  return Polynomial(std::move(c));
}

RationalFunction n_to_minus(long p) {
  if (p >= 0) {
    std::vector<BigInt> den(static_cast<std::size_t>(p) + 1);
    den.back() = 1;
    return RationalFunction(kOne, Polynomial(std::move(den)));
  }
  std::vector<BigInt> num(static_cast<std::size_t>(-p) + 1);
  num.back() = 1;
  return RationalFunction(Polynomial(std::move(num)), kOne);
}

}  // namespace

TEST_CASE("polynomial arithmetic basics") {
  CHECK(P({1, 1}) + P({-1, 1}) == P({0, 2}));                    // (1+N)+(-1+N) = 2N
  CHECK(P({-1, 1}) * P({1, 1}) == P({-1, 0, 1}));                // (N-1)(N+1) = N^2-1
  CHECK(Polynomial() * P({7, 0, 0, 1}) == Polynomial());         // 0 * (N^3+7) = 0
  CHECK(P({0}) == Polynomial());                                 // canonical zero
  CHECK(Polynomial().degree() == -1);
  CHECK(P({-1, 0, 1}).degree() == 2);
}

TEST_CASE("polynomial gcd and exact division") {
  Polynomial a = P({-1, 0, 1});  // (N-1)(N+1)
  Polynomial b = P({-1, 1}) * P({3, 1});
  Polynomial g = Polynomial::gcd(a, b);
  CHECK(g == P({-1, 1}));
  CHECK(divide_exact(a, g) == P({1, 1}));
  CHECK(Polynomial::gcd(P({0, 2}), P({0, 0, 4})) == P({0, 2}));  // content handling
}

TEST_CASE("rational function arithmetic") {
  RationalFunction one_over_n = RF({1}, {0, 1});
  CHECK(one_over_n + one_over_n == RF({2}, {0, 1}));

  RationalFunction f = RationalFunction(P({2, 1}), kN * P({1, 1}) * P({3, 1}));
  CHECK((f - f).is_zero());
  CHECK(f - f == RationalFunction());

  SECTION("k=2 recursion instance reduces to 1/N") {
    RationalFunction lhs = RF({0, 1}, {-1, 0, 1}) - RF({1}, {0, -1, 0, 1});
    CHECK(lhs == one_over_n);
    // independent expansion: N*N - 1 == N^2 - 1 over the common denominator
    // N(N^2-1), and (N^2-1)*N == 1*(N(N^2-1)) as raw polynomials
    Polynomial common = kN * P({-1, 0, 1});
    Polynomial combined = kN * kN - kOne;
    CHECK(combined * kN == kOne * common);
  }

  SECTION("division by zero") {
    CHECK_THROWS_AS(RF({1}, {1}) / RationalFunction(), DivisionByZero);
    CHECK_THROWS_AS(RationalFunction(kOne, Polynomial()), DivisionByZero);
  }

  SECTION("reduced and sign-normalized invariants") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
      Polynomial num = random_poly(rng);
      Polynomial den = random_poly(rng);
      if (den.is_zero()) continue;
      RationalFunction f2(num, den);
      if (f2.is_zero()) {
        CHECK(f2.den() == kOne);
        continue;
      }
      CHECK(f2.den().leading() > 0);
      CHECK(Polynomial::gcd(f2.num(), f2.den()).degree() == 0);
    }
  }
}

TEST_CASE("ring axioms on random polynomials") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 300; ++i) {
    Polynomial a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
    CHECK((a + b) * c == a * c + b * c);
    CHECK(a * b == b * a);
    CHECK((a + b) + c == a + (b + c));
  }
}

TEST_CASE("series in 1/N") {
  SECTION("third moment function") {
    SeriesTail s = series_in_inverse_n(m3(), 4);
    CHECK(s.start_power == 0);
    CHECK(s.coeffs == std::vector<BigRat>{BigRat(3), BigRat(0), BigRat(0), BigRat(3)});
  }
  SECTION("geometric series") {
    SeriesTail s = series_in_inverse_n(RF({1}, {1, 1}), 3);
    CHECK(s.start_power == 1);
    CHECK(s.coeffs == std::vector<BigRat>{BigRat(1), BigRat(-1), BigRat(1)});
  }
  SECTION("fifth moment function") {
    SeriesTail s = series_in_inverse_n(m5(), 8);
    CHECK(s.start_power == 0);
    CHECK(s.coeffs == std::vector<BigRat>{BigRat(5), BigRat(0), BigRat(0), BigRat(0), BigRat(0),
                                          BigRat(-20), BigRat(100), BigRat(-600)});
  }
  SECTION("zero function rejected") {
    CHECK_THROWS_AS(series_in_inverse_n(RationalFunction(), 2), ZeroFunction);
  }
  SECTION("polynomial part gives negative start") {
    SeriesTail s = series_in_inverse_n(RationalFunction(kN * kN, kOne), 3);
    CHECK(s.start_power == -2);
    CHECK(s.coeffs[0] == BigRat(1));
  }
}

TEST_CASE("series truncation residual has the right order at infinity") {
  std::mt19937_64 rng(11);
  int tested = 0;
  while (tested < 60) {
    Polynomial num = random_poly(rng), den = random_poly(rng);
    if (num.is_zero() || den.is_zero()) continue;
    RationalFunction f(num, den);
    if (f.is_zero()) continue;
    ++tested;
    for (int order : {1, 3, 5}) {
      SeriesTail s = series_in_inverse_n(f, order);
      RationalFunction trunc;
      for (int i = 0; i < order; ++i)
        trunc += RationalFunction::constant(s.coeffs[static_cast<std::size_t>(i)]) *
                 n_to_minus(s.start_power + i);
      RationalFunction residual = f - trunc;
      if (!residual.is_zero()) {
        long ord = residual.den().degree() - residual.num().degree();
        CHECK(ord >= s.start_power + order);
      }
    }
  }
}

TEST_CASE("json round trip") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    Polynomial num = random_poly(rng), den = random_poly(rng);
    if (den.is_zero()) continue;
    RationalFunction f(num, den);
    CHECK(rational_function_from_json(to_json(f)) == f);
  }
  // big coefficients keep decimal-string exactness
  RationalFunction big(Polynomial({BigInt("123456789012345678901234567890")}), kOne);
  CHECK(rational_function_from_json(to_json(big)) == big);
}

TEST_CASE("linear solve") {
  SECTION("2x2 orthogonality system") {
    // A = [[N,1],[1,N]], b = [1/N, 0]; hand elimination:
    // x2 = -x1/N from row 2, then (N - 1/N) x1 = 1/N
    std::vector<std::vector<RationalFunction>> A = {
        {RationalFunction(kN, kOne), RationalFunction(kOne, kOne)},
        {RationalFunction(kOne, kOne), RationalFunction(kN, kOne)}};
    std::vector<RationalFunction> b = {RF({1}, {0, 1}), RationalFunction()};
    auto x = solve_linear_system(A, b);
    CHECK(x[0] == RF({1}, {-1, 0, 1}));
    CHECK(x[1] == RF({-1}, {0, -1, 0, 1}));
    // residual: A x == b
    for (int i = 0; i < 2; ++i) {
      RationalFunction r = A[static_cast<std::size_t>(i)][0] * x[0] +
                           A[static_cast<std::size_t>(i)][1] * x[1] - b[static_cast<std::size_t>(i)];
      CHECK(r.is_zero());
    }
  }
  SECTION("identity system") {
    std::vector<std::vector<RationalFunction>> A = {
        {RationalFunction(kOne, kOne), RationalFunction()},
        {RationalFunction(), RationalFunction(kOne, kOne)}};
    std::vector<RationalFunction> b = {m3(), RF({1}, {0, 1})};
    auto x = solve_linear_system(A, b);
    CHECK(x[0] == b[0]);
    CHECK(x[1] == b[1]);
  }
  SECTION("rank-1 matrix is singular") {
    std::vector<std::vector<RationalFunction>> A = {
        {RationalFunction(kN, kOne), RationalFunction(kN, kOne)},
        {RationalFunction(kOne, kOne), RationalFunction(kOne, kOne)}};
    std::vector<RationalFunction> b = {RationalFunction(kOne, kOne), RationalFunction(kOne, kOne)};
    CHECK_THROWS_AS(solve_linear_system(A, b), SingularSystem);
  }
  SECTION("rectangular solver handles redundancy, deficiency and inconsistency") {
    auto one = RationalFunction(kOne, kOne);
    auto n = RationalFunction(kN, kOne);
    // consistent overdetermined: x = 1/N, y = N with a redundant third row
    std::vector<std::vector<RationalFunction>> M = {{n, RationalFunction()},
                                                    {RationalFunction(), one},
                                                    {n, one}};
    std::vector<RationalFunction> rhs = {one, n, one + n};
    auto x = solve_rectangular_system(M, rhs, 2);
    CHECK(x[0] == RF({1}, {0, 1}));
    CHECK(x[1] == n);
    // rank deficient: the second unknown never appears
    std::vector<std::vector<RationalFunction>> U = {{one, RationalFunction()},
                                                    {n, RationalFunction()}};
    CHECK_THROWS_AS(solve_rectangular_system(U, {one, n}, 2), RankDeficient);
    // inconsistent rows
    std::vector<std::vector<RationalFunction>> I2 = {{one, one}, {one, one}, {one, RationalFunction()}};
    CHECK_THROWS_AS(solve_rectangular_system(I2, {one, n, one}, 2), SingularSystem);
  }
  SECTION("random systems verify by residual") {
    std::mt19937_64 rng(3);
    int done = 0;
    while (done < 25) {
      const std::size_t n = 3;
      std::vector<std::vector<RationalFunction>> A(n, std::vector<RationalFunction>(n));
      std::vector<RationalFunction> b(n);
      for (auto& row : A)
        for (auto& e : row) e = RationalFunction(random_poly(rng, 1), kOne);
      for (auto& e : b) e = RationalFunction(random_poly(rng, 1), kOne);
      try {
        auto x = solve_linear_system(A, b);
        for (std::size_t i = 0; i < n; ++i) {
          RationalFunction r;
          for (std::size_t j = 0; j < n; ++j) r += A[i][j] * x[j];
          CHECK((r - b[i]).is_zero());
        }
        ++done;
      } catch (const SingularSystem&) {
        // random singular draw; try another
      }
    }
  }
}
