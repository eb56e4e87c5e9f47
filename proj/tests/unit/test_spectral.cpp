#include <doctest.h>

#include <cmath>
#include <numbers>

#include "muskat/spectral.hpp"

using namespace muskat;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("coefficients of a trigonometric polynomial") {
  TorusGrid g(32);
  auto u = SpectralFunction::from_function(g, [](double x) { return 2.0 + 3.0 * std::cos(x) - std::sin(4 * x); });
  CHECK(u.mean() == Approx(2.0));
  CHECK(u.coefficient(1).real() == Approx(1.5));
  CHECK(u.coefficient(-1).real() == Approx(1.5));
  CHECK(u.coefficient(4).imag() == Approx(0.5));
  CHECK(u.coefficient(-4).imag() == Approx(-0.5));
  auto v = SpectralFunction::from_coefficients(g, u.coefficients());
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(v[i] == Approx(u[i]).epsilon(1e-13));
}

TEST_CASE("nyquist slot reports -n/2") {
  TorusGrid g(16, 4 * pi);
  CHECK(g.wavenumber(8) == Approx(-4.0));
  CHECK(g.wavenumber(3) == Approx(1.5));
  CHECK(g.k_unit() == Approx(0.5));
}

TEST_CASE("derivative of sin(3x) and the dropped nyquist mode") {
  TorusGrid g(16);
  auto u = SpectralFunction::from_function(g, [](double x) { return std::sin(3 * x) + std::cos(8 * x); });
  auto du = derivative(u);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(du[i] == Approx(3 * std::cos(3 * g.x(i))).epsilon(1e-12));
  auto d2 = derivative(u, 2);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(d2[i] == Approx(-9 * std::sin(3 * g.x(i))).epsilon(1e-12));
  auto a = abs_derivative(SpectralFunction::from_function(g, [](double x) { return std::cos(5 * x); }));
  CHECK(a[0] == Approx(5.0));
}

TEST_CASE("sobolev norms use the integral convention") {
  TorusGrid g(64);
  auto c = SpectralFunction::from_function(g, [](double x) { return std::cos(x); });
  CHECK(l2_norm(c) == Approx(std::sqrt(pi)));
  CHECK(sobolev_norm(c, 1.0) == Approx(std::sqrt(2 * pi)));
  auto c3 = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x); });
  CHECK(sobolev_norm(c3, 2.0) == Approx(std::sqrt(pi) * 10.0));
  CHECK(inner_product(c, c3) == Approx(0.0).epsilon(1e-14));
  CHECK(inner_product(c, c) == Approx(pi));
  CHECK(linf_norm(c) == Approx(1.0));
}

TEST_CASE("littlewood-paley blocks partition the spectrum") {
  TorusGrid g(64);
  auto u = SpectralFunction::from_function(g, [](double x) { return 1.0 + std::cos(x) + std::cos(5 * x) + std::sin(20 * x); });
  auto sum = SpectralFunction::zero(g);
  for (int j = -1; j <= lp_max_block(g); ++j) sum = sum + lp_project(u, j);
  CHECK(l2_norm(sum - u) < 1e-13);
  auto b2 = lp_project(u, 2);  // 4 <= |k| < 8
  CHECK(b2.coefficient(5).real() == Approx(0.5));
  CHECK(std::abs(b2.coefficient(1)) < 1e-15);
  CHECK(lp_project(u, -1).mean() == Approx(1.0));
}

TEST_CASE("exact product and dealiasing") {
  TorusGrid g(16);
  auto c = SpectralFunction::from_function(g, [](double x) { return std::cos(x); });
  auto p = exact_product(c, c);
  for (std::size_t i = 0; i < g.n(); ++i) CHECK(p[i] == Approx(0.5 + 0.5 * std::cos(2 * g.x(i))));
  // cos(7x)^2 = (1 + cos 14x)/2; 14 is not represented on 16 points, so the
  // exact product keeps only the mean while the sampled product aliases.
  auto c7 = SpectralFunction::from_function(g, [](double x) { return std::cos(7 * x); });
  auto e = exact_product(c7, c7);
  CHECK(e.mean() == Approx(0.5));
  CHECK(l2_norm(e - SpectralFunction::constant(g, 0.5)) < 1e-13);
  CHECK(l2_norm(pointwise_product(c7, c7) - e) > 0.1);
  auto d = dealias(c7);
  CHECK(l2_norm(d) < 1e-14);
}

TEST_CASE("multipliers reject non-finite values") {
  TorusGrid g(8);
  auto u = SpectralFunction::constant(g, 1.0);
  CHECK_THROWS_AS(apply_multiplier(u, [](double) { return cplx(NAN, 0.0); }), InputError);
}

TEST_CASE("single-mode multiplier eigenfunctions") {
  TorusGrid g(32);
  auto s2 = SpectralFunction::from_function(g, [](double x) { return std::sin(2 * x); });
  CHECK(l2_norm(apply_multiplier(s2, [](double) { return cplx(1.0, 0.0); }) - s2) < 1e-14);
  auto jap = apply_multiplier(s2, [](double k) { return cplx(std::sqrt(1 + k * k), 0.0); });
  CHECK(l2_norm(jap - s2 * std::sqrt(5.0)) < 1e-13);
  auto c2 = SpectralFunction::from_function(g, [](double x) { return std::cos(2 * x); });
  CHECK(sobolev_norm(c2, 1.0) / sobolev_norm(c2, 0.0) == Approx(std::sqrt(5.0)));
  CHECK(sobolev_norm(SpectralFunction::zero(g), 3.0) == 0.0);
}

TEST_CASE("round trip of random samples") {
  TorusGrid g(128);
  std::vector<double> v(g.n());
  unsigned s = 12345;
  for (auto& x : v) x = ((s = s * 1103515245u + 12345u) >> 8) / double(1 << 24) - 0.5;
  auto u = SpectralFunction::from_values(g, v);
  auto w = SpectralFunction::from_coefficients(g, u.coefficients());
  double err = 0, ref = 0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    err += (w[i] - v[i]) * (w[i] - v[i]);
    ref += v[i] * v[i];
  }
  CHECK(std::sqrt(err / ref) < 1e-12);
}

TEST_CASE("block and dealias boundaries") {
  TorusGrid g(32);
  auto c4 = SpectralFunction::from_function(g, [](double x) { return std::cos(4 * x); });
  CHECK(l2_norm(lp_project(c4, 2) - c4) < 1e-14);
  CHECK(l2_norm(lp_project(c4, 1)) < 1e-14);
  CHECK(l2_norm(dealias(c4, 1.0) - c4) < 1e-14);
  auto top = SpectralFunction::from_function(g, [](double x) { return std::cos(16 * x); });
  CHECK(l2_norm(dealias(top)) < 1e-14);
  auto u = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x) + std::sin(9 * x); });
  auto v = SpectralFunction::from_function(g, [](double x) { return std::sin(5 * x) + 0.5 * std::cos(10 * x); });
  CHECK(l2_norm(product(u, v) - dealias(exact_product(u, v))) < 1e-14);
}
