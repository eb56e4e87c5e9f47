#include <doctest.h>

#include <cmath>
#include <random>

#include "muskat/elliptic.hpp"

using namespace muskat;

namespace {
Vec random_vec(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> Z;
  Vec v(n);
  for (auto& x : v) x = Z(rng);
  return v;
}
}  // namespace

TEST_CASE("strip operator is symmetric with constants in its kernel") {
  TorusGrid g(32);
  auto eta = SpectralFunction::from_function(g, [](double x) { return 0.2 * std::cos(x) + 0.05 * std::sin(2 * x); });
  DomainGeometry geom;
  geom.bottom = Boundary::flat(1.0);
  auto map = build_sigma_map(eta, geom, 16);
  StripOperator K(map);
  const std::size_t n = K.size();
  Vec one(n, 1.0), out(n);
  K.apply(one.data(), out.data());
  CHECK(norm2(out) < 1e-10);
  auto u = random_vec(n, 1), v = random_vec(n, 2);
  Vec Ku(n), Kv(n);
  K.apply(u.data(), Ku.data());
  K.apply(v.data(), Kv.data());
  CHECK(std::abs(dot(u, Kv) - dot(v, Ku)) < 1e-10 * std::abs(dot(u, Kv)));
  CHECK(dot(u, Ku) > 0.0);
}

TEST_CASE("banded cholesky solves a tridiagonal system") {
  const int n = 10;
  BandedSPD m(n, 1);
  for (int i = 0; i < n; ++i) {
    m.add(i, i, 4.0);
    if (i + 1 < n) m.add(i, i + 1, -1.0);
  }
  m.factor();
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = i + 1.0;
  std::vector<double> b(n);
  for (int i = 0; i < n; ++i) b[i] = 4.0 * x[i] - (i > 0 ? x[i - 1] : 0.0) - (i + 1 < n ? x[i + 1] : 0.0);
  m.solve(b.data(), 1);
  for (int i = 0; i < n; ++i) CHECK(b[i] == doctest::Approx(x[i]));
}

TEST_CASE("banded cholesky rejects an indefinite matrix") {
  BandedSPD m(3, 1);
  m.add(0, 0, 1.0);
  m.add(1, 1, -1.0);
  m.add(2, 2, 1.0);
  CHECK_THROWS_AS(m.factor(), SolverError);
}
