#include <doctest.h>

#include <cmath>

#include "muskat/paradiff.hpp"

using namespace muskat;
using doctest::Approx;

TEST_CASE("cutoffs") {
  CHECK(smooth_step(0.0) == 0.0);
  CHECK(smooth_step(1.0) == 1.0);
  CHECK(smooth_step(0.5) == Approx(0.5));
  CutoffPair c;
  CHECK(c.psi(0.1) == 0.0);
  CHECK(c.psi(0.3) == 1.0);
  CHECK(c.chi(0.0, 10.0) == 1.0);
  CHECK(c.chi(1.0, 10.0) == 1.0);
  CHECK(c.chi(2.5, 10.0) == 0.0);
  const double mid = c.chi(1.5, 10.0);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("paraproduct with a constant multiplies the nonzero modes") {
  TorusGrid g(32);
  auto u = SpectralFunction::from_function(g, [](double x) { return 1.0 + std::cos(2 * x) + std::sin(5 * x); });
  auto t = paraproduct(SpectralFunction::constant(g, 3.0), u);
  CHECK(l2_norm(t - (u - SpectralFunction::constant(g, 1.0)) * 3.0) < 1e-12);
  auto r = bony_remainder(SpectralFunction::constant(g, 3.0), u);
  CHECK(l2_norm(r - SpectralFunction::constant(g, 3.0)) < 1e-12);
}

TEST_CASE("bony remainder of a low-high pair is small") {
  TorusGrid g(128);
  auto a = SpectralFunction::from_function(g, [](double x) { return std::cos(x); });
  auto u = SpectralFunction::from_function(g, [](double x) { return std::cos(30 * x); });
  // |theta| = 1 <= eps1 * 30, so T_a u carries the whole product and T_u a vanishes.
  CHECK(l2_norm(bony_remainder(a, u)) < 1e-12);
}

TEST_CASE("fourier multiplier symbol acts diagonally") {
  TorusGrid g(64);
  auto s = fourier_symbol(g, 1.0, [](double xi) { return cplx(std::abs(xi), 0.0); });
  auto u = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x) + 0.5 * std::sin(7 * x); });
  auto v = apply_paradiff(s, u);
  CHECK(l2_norm(v - abs_derivative(u)) < 1e-12);
  ParadiffOperator T(s);
  auto d = T.dense();
  const std::size_t n = T.n();
  CHECK(std::abs(d[(n / 2 + 3) * n + (n / 2 + 3)] - cplx(3.0, 0.0)) < 1e-12);
  CHECK(std::abs(d[(n / 2 + 3) * n + (n / 2 + 4)]) < 1e-14);
  CHECK(symbol_growth_constant(s) <= 1.0);
}

TEST_CASE("principal symbol") {
  CHECK(lambda_symbol_2d(0.0, 0.0, 3.0, 4.0) == Approx(5.0));
  CHECK(lambda_symbol_2d(1.0, 0.0, 1.0, 0.0) == Approx(1.0));
  TorusGrid g(16);
  auto lam = symbol_lambda(SpectralFunction::zero(g));
  CHECK(std::abs(lam.eval(0, -4.0) - cplx(4.0, 0.0)) < 1e-14);
}

TEST_CASE("a and A factor the flat operator") {
  TorusGrid g(32);
  DomainGeometry geom;
  geom.bottom = Boundary::flat(2.0);
  auto map = build_sigma_map(SpectralFunction::zero(g), geom, 8);
  auto c = coefficients_from_map(map);
  FactorizationCheck chk;
  symbols_a_A(c, g, map.rows() - 1, &chk);
  CHECK(chk.max_sum_error < 1e-12);
  CHECK(chk.max_product_error < 1e-12);
  CHECK(chk.ellipticity == Approx(2.0));
}

TEST_CASE("paralinearization is exact for a flat interface") {
  TorusGrid g(128);
  auto f = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x) + 0.5 * std::sin(5 * x); });
  DNSettings s;
  s.z_intervals = 128;
  auto p = paralinearize_dn(SpectralFunction::zero(g), f, DomainGeometry{}, s);
  CHECK(l2_norm(p.residual) / l2_norm(p.dn.g) < 1e-5);
  CHECK(!p.blocks.empty());
}

TEST_CASE("parabolic march damps like exp(-z |xi|)") {
  TorusGrid g(64);
  auto s = fourier_symbol(g, 1.0, [](double xi) { return cplx(std::abs(xi), 0.0); });
  auto w0 = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x); });
  auto r = parabolic_step(s, w0, {}, 0.1, 100, {}, 1e-13);
  CHECK(r.history.size() == 101);
  CHECK(l2_norm(r.w - w0 * std::exp(-0.3)) < 1e-5);
}

TEST_CASE("T_1 is the high-pass and a(x) acts through its low modes") {
  TorusGrid g(256);
  auto c3 = SpectralFunction::from_function(g, [](double x) { return std::cos(3 * x); });
  CHECK(l2_norm(paraproduct(SpectralFunction::constant(g, 1.0), c3) - c3) < 1e-13);
  auto a = SpectralFunction::from_function(g, [](double x) { return std::cos(x) + std::cos(10 * x); });
  auto u = SpectralFunction::from_function(g, [](double x) { return std::cos(40 * x); });
  // chi(1, 40) = 1 and chi(10, 40) = 0
  auto low = SpectralFunction::from_function(g, [](double x) { return std::cos(x); });
  CHECK(l2_norm(paraproduct(a, u) - exact_product(low, u)) < 1e-12);
  auto cx = SpectralFunction::from_function(g, [](double x) { return std::cos(x); });
  auto sum = paraproduct(cx, cx) + paraproduct(cx, cx) + bony_remainder(cx, cx);
  CHECK(l2_norm(sum - exact_product(cx, cx)) < 1e-13);
}

TEST_CASE("flat factor values and ellipticity on a curved strip") {
  TorusGrid g(32);
  DomainGeometry geom;
  geom.bottom = Boundary::flat(2.0);
  auto map = build_sigma_map(SpectralFunction::zero(g), geom, 8);
  auto [a, A] = symbols_a_A(coefficients_from_map(map), g, map.rows() - 1);
  CHECK(std::abs(a.eval(3, 3.0) - cplx(-6.0, 0.0)) < 1e-12);
  CHECK(std::abs(A.eval(3, -3.0) - cplx(6.0, 0.0)) < 1e-12);

  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x) + 0.1 * std::sin(3 * x); });
  auto cmap = build_sigma_map(eta, geom, 8);
  for (std::size_t z : {std::size_t{0}, cmap.rows() / 2, cmap.rows() - 1}) {
    FactorizationCheck chk;
    symbols_a_A(coefficients_from_map(cmap), g, z, &chk);
    CHECK(chk.ellipticity >= chk.sqrt_reduced_min * (1.0 - 1e-12));
    CHECK(chk.ellipticity == Approx(chk.sqrt_reduced_min));
    CHECK(chk.sqrt_reduced_min <= chk.sqrt_alpha_min);
    CHECK(chk.max_product_error < 1e-10);
  }
  CHECK(lambda_symbol_2d(1.0, 0.0, 0.0, 1.0) == Approx(std::sqrt(2.0)));
}

TEST_CASE("parabolic march over unit length and from zero") {
  TorusGrid g(64);
  auto s = fourier_symbol(g, 1.0, [](double xi) { return cplx(std::abs(xi), 0.0); });
  auto w0 = SpectralFunction::from_function(g, [](double x) { return std::cos(2 * x); });
  auto r = parabolic_step(s, w0, {}, 1.0, 200, {}, 1e-13);
  CHECK(l2_norm(r.w - w0 * std::exp(-2.0)) / l2_norm(w0 * std::exp(-2.0)) < 1e-3);
  auto z = parabolic_step(s, SpectralFunction::zero(g), {}, 1.0, 10);
  CHECK(l2_norm(z.w) == 0.0);
}

TEST_CASE("growth constant of the principal symbol") {
  TorusGrid g(64);
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x); });
  const double C = symbol_growth_constant(symbol_lambda(eta));
  CHECK(C > 0.0);
  CHECK(C <= 10.0);
}
