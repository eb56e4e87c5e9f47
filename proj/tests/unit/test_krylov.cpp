#include <doctest.h>

#include "muskat/krylov.hpp"

using namespace muskat;

TEST_CASE("pcg solves a small SPD system") {
  // tridiagonal 2, -1 plus identity
  const int n = 20;
  auto A = [&](const Vec& x, Vec& y) {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      y[i] = 3.0 * x[i];
      if (i > 0) y[i] -= x[i - 1];
      if (i + 1 < n) y[i] -= x[i + 1];
    }
  };
  Vec xs(n);
  for (int i = 0; i < n; ++i) xs[i] = std::sin(0.3 * i);
  Vec b;
  A(xs, b);
  Vec x(n, 0.0);
  auto r = pcg(A, [](const Vec& in, Vec& out) { out = in; }, [](Vec&) {}, b, x, 1e-12, 100);
  CHECK(r.converged);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xs[i]).epsilon(1e-10));
}

TEST_CASE("gmres solves a nonsymmetric system") {
  const int n = 15;
  auto A = [&](const Vec& x, Vec& y) {
    y.assign(n, 0.0);
    for (int i = 0; i < n; ++i) {
      y[i] = 4.0 * x[i];
      if (i > 0) y[i] -= 2.0 * x[i - 1];
      if (i + 1 < n) y[i] += 0.5 * x[i + 1];
    }
  };
  Vec xs(n);
  for (int i = 0; i < n; ++i) xs[i] = 1.0 + 0.1 * i;
  Vec b;
  A(xs, b);
  Vec x(n, 0.0);
  auto r = gmres(A, [](const Vec& in, Vec& out) { out = in; }, b, x, 1e-12, 200);
  CHECK(r.converged);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xs[i]).epsilon(1e-9));
}
