#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "juliaflow/error.hpp"
#include "juliaflow/polynomial.hpp"
#include "support/oracles.hpp"

using namespace juliaflow;

namespace {

const Polynomial quad = Polynomial::parse("-6+0i,0+0i,1+0i");
const Polynomial cubic = Polynomial::parse("0+0i,0+0i,-3+0i,1+0i");

// High-precision escape-rate values, 50 significant digits.
constexpr double kQuadG0 = 0.84946275269655038026092770541285214542793905084146;
constexpr double kCubicG2 = 0.52525668756165873234373071391402582607092460789231;
constexpr double kQuadG1i = 0.89151600206201685673160544104366621058541240808287;

}  // namespace

TEST_CASE("parse and print round trip") {
  CHECK(quad.degree() == 2);
  CHECK(cubic.degree() == 3);
  CHECK(Polynomial::parse(quad.to_string()).to_string() == quad.to_string());
  const Polynomial skew = Polynomial::parse("1.5-2i,0.25+0i,2+1i");
  CHECK(skew.coeffs()[0] == Complex(1.5, -2));
  CHECK(skew.leading() == Complex(2, 1));
  CHECK_THROWS_AS(Polynomial::parse("1+0i,2+0i"), InvalidPolynomial);
  CHECK_THROWS_AS(Polynomial::parse("1+0i,0+0i,0+0i"), InvalidPolynomial);
  CHECK_THROWS_AS(Polynomial::parse("abc"), InvalidPolynomial);
}

TEST_CASE("evaluate by Horner") {
  CHECK(evaluate(quad, 3.0) == Complex(3, 0));
  CHECK(evaluate(cubic, 0.0) == Complex(0, 0));
  CHECK(std::abs(evaluate(quad, Complex(1, 1)) - Complex(-6, 2)) < 1e-15);
  const auto [v, dv] = cubic.value_and_derivative(Complex(2, 0));
  CHECK(std::abs(v - Complex(-4, 0)) < 1e-15);
  CHECK(std::abs(dv) < 1e-15);
}

TEST_CASE("orbits record escape") {
  const Orbit fixed = orbit(quad, 3.0, 10);
  CHECK_FALSE(fixed.escaped_at.has_value());
  const Orbit esc = orbit(cubic, 2.0, 10);
  REQUIRE(esc.escaped_at.has_value());
  CHECK(std::abs(esc.points[1] - Complex(-4, 0)) < 1e-12);
  for (std::size_t k = 0; k + 1 < esc.points.size(); ++k) {
    CHECK(std::abs(esc.points[k + 1] - evaluate(cubic, esc.points[k])) <= 1e-12 * std::abs(esc.points[k + 1]));
  }
}

TEST_CASE("critical points") {
  const auto q = critical_points(quad);
  REQUIRE(q.size() == 1);
  CHECK(std::abs(q[0].location) < 1e-12);
  CHECK(q[0].escaping);

  const auto c = critical_points(cubic);
  REQUIRE(c.size() == 2);
  CHECK(std::abs(c[0].location) < 1e-12);
  CHECK_FALSE(c[0].escaping);
  CHECK(c[0].green_value == 0.0);
  CHECK(std::abs(c[1].location - Complex(2, 0)) < 1e-12);
  CHECK(c[1].escaping);

  const auto triple = critical_points(Polynomial::parse("0+0i,0+0i,0+0i,1+0i"));
  REQUIRE(triple.size() == 1);
  CHECK(triple[0].multiplicity == 2);
}

TEST_CASE("critical multiplicities sum to d - 1") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 2.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 5;
    std::vector<Complex> coeffs;
    for (int k = 0; k < d; ++k) coeffs.emplace_back(n(rng), n(rng));
    coeffs.emplace_back(1.0 + std::abs(n(rng)), 0.0);
    const Polynomial p(coeffs);
    int total = 0;
    for (const auto& cp : critical_points(p)) {
      total += cp.multiplicity;
      CHECK(cp.escaping == (cp.green_value > 0.0));
    }
    CHECK(total == d - 1);
  }
}

TEST_CASE("green values") {
  const Polynomial z2 = Polynomial::parse("0+0i,0+0i,1+0i");
  CHECK(green_value(z2, 4.0) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  CHECK(green_value(quad, 3.0) == 0.0);
  CHECK(green_value(cubic, 0.0) == 0.0);
  CHECK(std::abs(green_value(quad, 0.0) - kQuadG0) < 1e-11);
  CHECK(std::abs(green_value(cubic, 2.0) - kCubicG2) < 1e-11);
  CHECK(std::abs(green_value(quad, Complex(1, 1)) - kQuadG1i) < 1e-11);
}

TEST_CASE("green values agree with a long double escape-rate oracle") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  const std::vector<std::complex<long double>> qc{-6.0L, 0.0L, 1.0L};
  const std::vector<std::complex<long double>> cc{0.0L, 0.0L, -3.0L, 1.0L};
  for (int k = 0; k < 200; ++k) {
    const Complex z(u(rng), u(rng));
    CHECK(std::abs(green_value(quad, z) - static_cast<double>(oracle::escape_rate(qc, z))) < 1e-10);
    CHECK(std::abs(green_value(cubic, z) - static_cast<double>(oracle::escape_rate(cc, z))) < 1e-10);
  }
}

TEST_CASE("functional equation g(f(z)) = d g(z)") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (const Polynomial* p : {&quad, &cubic}) {
    int tested = 0;
    while (tested < 100) {
      const Complex z(u(rng), u(rng));
      const double g = green_value(*p, z);
      if (g <= 0.0) continue;
      ++tested;
      CHECK(std::abs(green_value(*p, evaluate(*p, z)) - p->degree() * g) <= 10 * kDefaultGreenTolerance * p->degree() + 1e-11);
    }
  }
}

TEST_CASE("non-monic escape radius") {
  const Polynomial p = Polynomial::parse("0.3+0.1i,1+0i,0.05+0i");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(0.0, 6.283185307179586);
  for (int k = 0; k < 50; ++k) {
    const Complex z = std::polar(p.escape_radius() * 1.0001, angle(rng));
    CHECK(std::abs(evaluate(p, z)) >= 2.0 * std::abs(z));
    CHECK(green_value(p, z) <= p.green_bound_in_disk() + 1e-9);
  }
}

TEST_CASE("gradient") {
  const Polynomial z2 = Polynomial::parse("0+0i,0+0i,1+0i");
  const Vec2 a = green_gradient(z2, 2.0);
  CHECK(a.x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(std::abs(a.y) < 1e-12);
  const Vec2 b = green_gradient(z2, Complex(0, 2));
  CHECK(std::abs(b.x) < 1e-12);
  CHECK(b.y == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(green_gradient(quad, 0.0), DegenerateGradient);
  CHECK_THROWS_AS(green_gradient(quad, 3.0), DegenerateGradient);
}

TEST_CASE("gradient matches central differences") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const Polynomial* p : {&quad, &cubic}) {
    int tested = 0;
    while (tested < 100) {
      const Complex z(u(rng), u(rng));
      if (green_value(*p, z) <= 0.05) continue;
      ++tested;
      const double h = 1e-6 * std::max(1.0, std::abs(z));
      const double gx = (green_value(*p, z + h) - green_value(*p, z - h)) / (2 * h);
      const double gy = (green_value(*p, z + Complex(0, h)) - green_value(*p, z - Complex(0, h))) / (2 * h);
      const Vec2 g = green_gradient(*p, z);
      const double scale = std::hypot(gx, gy);
      CHECK(std::hypot(g.x - gx, g.y - gy) <= 1e-4 * scale);
    }
  }
  const Vec2 at5 = green_gradient(quad, 5.0);
  const double h = 1e-6;
  CHECK(at5.x == doctest::Approx((green_value(quad, 5.0 + h) - green_value(quad, 5.0 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("green_value_floor") {
  CHECK(green_value_floor(quad, 0.0, 0.1) == doctest::Approx(kQuadG0).epsilon(1e-9));
  CHECK(green_value_floor(quad, 3.0, 0.1) == 0.0);
  const double g = green_value(quad, Complex(2.9, 0.01));
  CHECK(green_value_floor(quad, Complex(2.9, 0.01), 2 * g) < 2 * g);
}
