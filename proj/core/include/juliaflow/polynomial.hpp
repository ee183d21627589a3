#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace juliaflow {

using Complex = std::complex<double>;

struct OrbitBudget {
  int max_iterations = 10000;
};

// Coefficients are stored constant term first.
class Polynomial {
 public:
  explicit Polynomial(std::vector<Complex> coeffs);

  static Polynomial parse(std::string_view text);
  std::string to_string() const;

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  Complex leading() const { return coeffs_.back(); }

  Complex operator()(Complex z) const;
  // Returns {p(z), p'(z)}.
  std::pair<Complex, Complex> value_and_derivative(Complex z) const;
  std::vector<Complex> derivative_coeffs() const;

  // |z| > escape_radius() implies |f(z)| > 2|z|, so the orbit escapes.
  double escape_radius() const { return escape_radius_; }
  // Upper bound for g on the closed disk of radius escape_radius().
  double green_bound_in_disk() const { return green_bound_; }
  // Centroid of the roots, -a_{d-1}/(d a_d).
  Complex centroid() const;
  bool has_real_coefficients() const;

 private:
  std::vector<Complex> coeffs_;
  double escape_radius_ = 0.0;
  double green_bound_ = 0.0;
};

Complex evaluate(const Polynomial& p, Complex z);

struct Orbit {
  Complex start;
  std::vector<Complex> points;
  std::optional<int> escaped_at;
};

Orbit orbit(const Polynomial& p, Complex z, int max_points = 64);

struct RootOptions {
  int max_iterations = 2000;
  double tolerance = 1e-14;
};

// Simultaneous Aberth-Ehrlich iteration on a coefficient list (constant first).
std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs,
                                      const RootOptions& options = {});

struct CriticalPoint {
  Complex location;
  int multiplicity = 1;
  double green_value = 0.0;
  bool escaping = false;
};

inline constexpr double kDefaultClusterTolerance = 1e-6;

std::vector<CriticalPoint> critical_points(const Polynomial& p,
                                           double tol = kDefaultClusterTolerance);

inline constexpr double kDefaultGreenTolerance = 1e-12;

double green_value(const Polynomial& p, Complex z, double tol = kDefaultGreenTolerance);

// Same as green_value, but returns 0 as soon as g(z) < floor is certain.
double green_value_floor(const Polynomial& p, Complex z, double floor);

struct GreenSample {
  double value = 0.0;
  Complex gradient;  // (dg/dx, dg/dy) packed as a complex number
};

// Throws DegenerateGradient where g = 0 or the gradient vanishes.
GreenSample green_with_gradient(const Polynomial& p, Complex z);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

Vec2 green_gradient(const Polynomial& p, Complex z);

}  // namespace juliaflow
