#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace muskat {

using Vec = std::vector<double>;

struct KrylovResult {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
  std::vector<double> history;
};

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Preconditioned conjugate gradients on the range of the orthogonal projector
/// P. A and M must be symmetric there; x carries the initial guess and any
/// components outside the range of P are left as given.
///   A(in, out), M(in, out), P(inout)
template <class ApplyA, class ApplyM, class Project>
KrylovResult pcg(ApplyA&& A, ApplyM&& M, Project&& P, const Vec& b, Vec& x, double tol, int max_iter) {
  const std::size_t n = b.size();
  KrylovResult res;
  Vec r(n), z(n), p(n), q(n);

  A(x, q);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
  P(r);
  Vec pb = b;
  P(pb);
  const double r0 = norm2(r);
  const double ref = std::max(norm2(pb), r0);
  res.history.push_back(r0);
  if (r0 == 0.0 || ref == 0.0) {
    res.converged = true;
    return res;
  }

  M(r, z);
  P(z);
  p = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A(p, q);
    P(q);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) {
      // Exact convergence in a semi-definite direction.
      res.iterations = it;
      break;
    }
    const double a = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += a * p[i];
      r[i] -= a * q[i];
    }
    const double rn = norm2(r);
    res.history.push_back(rn);
    res.iterations = it;
    if (rn <= tol * ref) {
      res.converged = true;
      break;
    }
    M(r, z);
    P(z);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  res.relative_residual = res.history.back() / ref;
  if (res.relative_residual <= tol) res.converged = true;
  return res;
}

/// Restarted right-preconditioned GMRES(m).
template <class ApplyA, class ApplyM>
KrylovResult gmres(ApplyA&& A, ApplyM&& M, const Vec& b, Vec& x, double tol, int max_iter, int restart = 40) {
  const std::size_t n = b.size();
  KrylovResult res;
  const double bn = norm2(b);
  if (bn == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  Vec r(n), w(n), z(n);
  int total = 0;
  while (total < max_iter) {
    A(x, w);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
    double beta = norm2(r);
    res.history.push_back(beta);
    if (beta <= tol * bn) {
      res.converged = true;
      break;
    }
    const int m = restart;
    std::vector<Vec> V(m + 1, Vec(n)), Z(m, Vec(n));
    std::vector<std::vector<double>> H(m + 1, std::vector<double>(m, 0.0));
    std::vector<double> cs(m), sn(m), g(m + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
    g[0] = beta;
    int k = 0;
    for (; k < m && total < max_iter; ++k, ++total) {
      M(V[k], Z[k]);
      A(Z[k], w);
      for (int i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        for (std::size_t l = 0; l < n; ++l) w[l] -= H[i][k] * V[i][l];
      }
      H[k + 1][k] = norm2(w);
      if (H[k + 1][k] > 0.0)
        for (std::size_t l = 0; l < n; ++l) V[k + 1][l] = w[l] / H[k + 1][k];
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double d = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = H[k][k] / d;
      sn[k] = H[k + 1][k] / d;
      H[k][k] = d;
      H[k + 1][k] = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      res.history.push_back(std::abs(g[k + 1]));
      if (std::abs(g[k + 1]) <= tol * bn) {
        ++k;
        ++total;
        break;
      }
    }
    std::vector<double> y(k);
    for (int i = k - 1; i >= 0; --i) {
      double s = g[i];
      for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
      y[i] = s / H[i][i];
    }
    for (int i = 0; i < k; ++i)
      for (std::size_t l = 0; l < n; ++l) x[l] += y[i] * Z[i][l];
    res.iterations = total;
    if (std::abs(g[k]) <= tol * bn) {
      res.converged = true;
      break;
    }
  }
  A(x, w);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
  res.relative_residual = norm2(r) / bn;
  res.converged = res.converged || res.relative_residual <= tol;
  return res;
}

}  // namespace muskat
