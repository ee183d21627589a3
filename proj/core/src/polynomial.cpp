#include "juliaflow/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "juliaflow/error.hpp"

namespace juliaflow {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double coefficient_ratio_sum(std::span<const Complex> c) {
  const double lead = std::abs(c.back());
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < c.size(); ++k) s += std::abs(c[k]) / lead;
  return s;
}

std::pair<Complex, Complex> horner2(std::span<const Complex> c, Complex z) {
  Complex value = c.back();
  Complex deriv = 0.0;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    deriv = deriv * z + value;
    value = value * z + c[k];
  }
  return {value, deriv};
}

bool parse_real(std::string_view text, std::size_t& pos, double& out) {
  std::string buffer(text.substr(pos));
  const char* begin = buffer.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  pos += static_cast<std::size_t>(end - begin);
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Accepts "a+bi", "a-bi", "a", "bi".
Complex parse_complex(std::string_view token) {
  token = trim(token);
  if (token.empty()) throw InvalidPolynomial("empty coefficient");
  std::size_t pos = 0;
  double first = 0.0;
  if (!parse_real(token, pos, first)) {
    throw InvalidPolynomial("cannot parse coefficient '" + std::string(token) + "'");
  }
  if (pos == token.size()) return {first, 0.0};
  if (token[pos] == 'i' && pos + 1 == token.size()) return {0.0, first};
  if (token[pos] != '+' && token[pos] != '-') {
    throw InvalidPolynomial("cannot parse coefficient '" + std::string(token) + "'");
  }
  double second = 0.0;
  std::size_t imag_start = pos;
  if (!parse_real(token, pos, second)) {
    // "a+i" / "a-i"
    second = token[imag_start] == '-' ? -1.0 : 1.0;
    pos = imag_start + 1;
  }
  if (pos + 1 != token.size() || token[pos] != 'i') {
    throw InvalidPolynomial("cannot parse coefficient '" + std::string(token) + "'");
  }
  return {first, second};
}

}  // namespace

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 3) throw InvalidPolynomial("degree must be at least 2");
  for (const Complex& c : coeffs_) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw InvalidPolynomial("non-finite coefficient");
    }
  }
  if (std::abs(coeffs_.back()) == 0.0) throw InvalidPolynomial("leading coefficient is zero");

  const int d = degree();
  const double s = coefficient_ratio_sum(coeffs_);
  const double lead = std::abs(coeffs_.back());
  // |z| >= R implies |f(z)| >= 2|z|.
  escape_radius_ = std::max(1.0 + std::max(1.0, s), s + std::max(1.0, std::pow(2.0 / lead, 1.0 / (d - 1))));
  const double b = std::log(lead * (1.0 + s));
  green_bound_ = std::log(escape_radius_) + std::max(b, 0.0) / (d - 1);
}

Polynomial Polynomial::parse(std::string_view text) {
  std::vector<Complex> coeffs;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    coeffs.push_back(parse_complex(text.substr(start, comma - start)));
    start = comma + 1;
  }
  return Polynomial(std::move(coeffs));
}

std::string Polynomial::to_string() const {
  std::string out;
  char buf[96];
  for (std::size_t k = 0; k < coeffs_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", coeffs_[k].real(), coeffs_[k].imag());
    if (k) out += ',';
    out += buf;
  }
  return out;
}

Complex Polynomial::operator()(Complex z) const {
  Complex value = coeffs_.back();
  for (std::size_t k = coeffs_.size() - 1; k-- > 0;) value = value * z + coeffs_[k];
  return value;
}

std::pair<Complex, Complex> Polynomial::value_and_derivative(Complex z) const {
  return horner2(coeffs_, z);
}

std::vector<Complex> Polynomial::derivative_coeffs() const {
  std::vector<Complex> out(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) out[k - 1] = coeffs_[k] * static_cast<double>(k);
  return out;
}

Complex Polynomial::centroid() const {
  const int d = degree();
  return -coeffs_[d - 1] / (static_cast<double>(d) * coeffs_[d]);
}

bool Polynomial::has_real_coefficients() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](Complex c) { return c.imag() == 0.0; });
}

Complex evaluate(const Polynomial& p, Complex z) { return p(z); }

Orbit orbit(const Polynomial& p, Complex z, int max_points) {
  Orbit o{z, {}, std::nullopt};
  Complex w = z;
  for (int k = 0; k < max_points; ++k) {
    o.points.push_back(w);
    if (std::abs(w) > p.escape_radius()) {
      o.escaped_at = k;
      break;
    }
    w = p(w);
  }
  return o;
}

std::vector<Complex> polynomial_roots(std::span<const Complex> coeffs, const RootOptions& options) {
  std::size_t top = coeffs.size();
  while (top > 0 && std::abs(coeffs[top - 1]) == 0.0) --top;
  if (top < 2) return {};
  const std::size_t n = top - 1;
  std::vector<Complex> b(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(top));
  const Complex lead = b.back();
  for (Complex& c : b) c /= lead;
  if (n == 1) return {-b[0]};

  // Fujiwara bound for the initial circle.
  double bound = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double term = std::pow(std::abs(b[k]) / (k == 0 ? 2.0 : 1.0), 1.0 / static_cast<double>(n - k));
    bound = std::max(bound, 2.0 * term);
  }
  const Complex center = -b[n - 1] / static_cast<double>(n);
  const double radius = std::max(0.5 * bound, 1e-3);
  std::vector<Complex> z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = kTwoPi * static_cast<double>(k) / static_cast<double>(n) + 0.7 / static_cast<double>(n);
    z[k] = center + std::polar(radius, angle);
  }

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double max_step = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      auto [value, deriv] = horner2(b, z[k]);
      if (value == Complex(0.0)) continue;
      Complex sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      }
      const Complex ratio = value / deriv;
      const Complex step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[k])));
    }
    if (max_step < options.tolerance) return z;
  }

  // Multiple roots converge only linearly; accept if residuals are small.
  double worst = 0.0;
  for (const Complex& root : z) {
    double scale = 0.0;
    double power = 1.0;
    for (const Complex& c : b) {
      scale += std::abs(c) * power;
      power *= std::abs(root);
    }
    worst = std::max(worst, std::abs(horner2(b, root).first) / scale);
  }
  if (worst > 1e-10) {
    std::ostringstream msg;
    msg << "root finder did not converge; relative residual " << worst;
    throw RootFindingError(msg.str());
  }
  return z;
}

std::vector<CriticalPoint> critical_points(const Polynomial& p, double tol) {
  const std::vector<Complex> deriv = p.derivative_coeffs();
  const std::vector<Complex> roots = polynomial_roots(deriv);
  const double cluster_tol = std::max(1e3 * 2.220446049250313e-16, tol);

  std::vector<std::size_t> parent(roots.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (std::size_t i = 0; i < roots.size(); ++i) {
    for (std::size_t j = i + 1; j < roots.size(); ++j) {
      const double scale = std::max(1.0, std::abs(roots[i]));
      if (std::abs(roots[i] - roots[j]) <= cluster_tol * scale) parent[find(i)] = find(j);
    }
  }

  std::vector<CriticalPoint> out;
  std::vector<std::size_t> rep_of;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const std::size_t r = find(i);
    auto it = std::find(rep_of.begin(), rep_of.end(), r);
    if (it == rep_of.end()) {
      rep_of.push_back(r);
      out.push_back({roots[i], 1, 0.0, false});
    } else {
      CriticalPoint& c = out[static_cast<std::size_t>(it - rep_of.begin())];
      c.location = (c.location * static_cast<double>(c.multiplicity) + roots[i]) /
                   static_cast<double>(c.multiplicity + 1);
      ++c.multiplicity;
    }
  }
  for (CriticalPoint& c : out) {
    if (c.multiplicity == 1) {
      // One Newton polish step on p' for simple roots.
      auto [v, dv] = horner2(deriv, c.location);
      if (std::abs(dv) > 0.0) c.location -= v / dv;
    }
    c.green_value = green_value(p, c.location);
    c.escaping = c.green_value > 0.0;
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& a, const CriticalPoint& b) {
    if (a.location.real() != b.location.real()) return a.location.real() < b.location.real();
    return a.location.imag() < b.location.imag();
  });
  return out;
}

namespace {

constexpr double kOverflowLog = 600.0;

double green_impl(const Polynomial& p, Complex z, double tol, double floor, bool use_floor) {
  const int d = p.degree();
  const double R = p.escape_radius();
  const double log_lead = std::log(std::abs(p.leading()));
  const double s = coefficient_ratio_sum(p.coeffs());
  const double tail_radius = std::max(R, 2.0 * s);
  const double overflow_radius = std::exp((kOverflowLog - std::max(log_lead, 0.0)) / d);
  const double inv_d = 1.0 / d;
  const OrbitBudget budget;

  Complex w = z;
  double scale = 1.0;
  for (int n = 0; n <= budget.max_iterations; ++n) {
    const double r = std::abs(w);
    if (r > tail_radius) {
      // |g(w) - log|w| - log|a_d|/(d-1)| <= 2s/|w|.
      if (scale * 2.0 * s / r <= tol || r > overflow_radius) {
        return scale * (std::log(r) + log_lead / (d - 1));
      }
    } else if (use_floor && r <= R && scale * p.green_bound_in_disk() < floor) {
      return 0.0;
    }
    w = p(w);
    scale *= inv_d;
  }
  if (std::abs(w) <= R) return 0.0;
  throw IndeterminateGreen("orbit neither escaped nor remained bounded within budget");
}

}  // namespace

double green_value(const Polynomial& p, Complex z, double tol) {
  return green_impl(p, z, tol, 0.0, false);
}

double green_value_floor(const Polynomial& p, Complex z, double floor) {
  return green_impl(p, z, 1e-10 * std::max(floor, 1e-300), floor, true);
}

GreenSample green_with_gradient(const Polynomial& p, Complex z) {
  const int d = p.degree();
  const double R = p.escape_radius();
  const double log_lead = std::log(std::abs(p.leading()));
  const double s = coefficient_ratio_sum(p.coeffs());
  const double tail_radius = std::max(R, 2.0 * s);
  const double overflow_radius = std::exp((kOverflowLog - std::max(log_lead, 0.0)) / d);
  const OrbitBudget budget;

  Complex w = z;
  Complex q = 0.0;  // (f^n)'(z) / f^n(z) for n >= 1
  double scale = 1.0;
  for (int n = 0; n <= budget.max_iterations; ++n) {
    const double r = std::abs(w);
    if (n > 0 && r > tail_radius &&
        (scale * 2.0 * s / r <= kDefaultGreenTolerance || r > overflow_radius)) {
      GreenSample out;
      out.value = scale * (std::log(r) + log_lead / (d - 1));
      out.gradient = std::conj(scale * q);
      const double mag = std::abs(out.gradient);
      if (!(mag > 1e-300) || !std::isfinite(mag)) {
        throw DegenerateGradient("gradient of g vanishes");
      }
      return out;
    }
    auto [fw, dfw] = p.value_and_derivative(w);
    if (fw == Complex(0.0)) throw DegenerateGradient("orbit hits a zero of f");
    q = (n == 0) ? dfw / fw : q * w * dfw / fw;
    w = fw;
    scale /= d;
  }
  throw DegenerateGradient("gradient requested where g = 0");
}

Vec2 green_gradient(const Polynomial& p, Complex z) {
  const Complex g = green_with_gradient(p, z).gradient;
  return {g.real(), g.imag()};
}

}  // namespace juliaflow
