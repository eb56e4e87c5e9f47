#include "muskat/paradiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "muskat/fft.hpp"

namespace muskat {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t), b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double CutoffPair::psi(double xi) const { return smooth_step((std::abs(xi) - 0.2) / 0.05); }

double CutoffPair::chi(double theta, double xi) const {
  const double ax = std::abs(xi);
  if (ax == 0.0) return theta == 0.0 ? 1.0 : 0.0;
  return 1.0 - smooth_step((std::abs(theta) / ax - eps1) / (eps2 - eps1));
}

SymbolField symbol_lambda(const InterfaceState& eta) {
  // In one dimension (1 + eta_x^2) xi^2 - (eta_x xi)^2 = xi^2 for every slope.
  SymbolField s;
  s.grid = eta.grid();
  s.order = 1.0;
  s.regularity = std::numeric_limits<double>::infinity();
  s.x_independent = true;
  s.eval = [](std::size_t, double xi) -> cplx { return std::abs(xi); };
  return s;
}

double lambda_symbol_2d(double gx, double gy, double xi1, double xi2) {
  const double g2 = gx * gx + gy * gy, x2 = xi1 * xi1 + xi2 * xi2, gd = gx * xi1 + gy * xi2;
  return std::sqrt(std::max(0.0, (1.0 + g2) * x2 - gd * gd));
}

SymbolField function_symbol(const SpectralFunction& a, double regularity) {
  SymbolField s;
  s.grid = a.grid();
  s.order = 0.0;
  s.regularity = regularity;
  s.xi_independent = true;
  auto vals = a.values();
  s.eval = [vals = std::move(vals)](std::size_t i, double) -> cplx { return vals[i]; };
  return s;
}

SymbolField fourier_symbol(const TorusGrid& g, double order, std::function<cplx(double)> m) {
  SymbolField s;
  s.grid = g;
  s.order = order;
  s.regularity = std::numeric_limits<double>::infinity();
  s.x_independent = true;
  s.eval = [m = std::move(m)](std::size_t, double xi) { return m(xi); };
  return s;
}

std::pair<SymbolField, SymbolField> symbols_a_A(const EllipticCoefficients& c, const TorusGrid& g,
                                                std::size_t z_index, FactorizationCheck* check) {
  if (z_index >= c.rows || c.n != g.n()) throw InputError("coefficient slice out of range");
  const std::size_t n = g.n();
  std::vector<double> alpha(c.alpha.begin() + z_index * n, c.alpha.begin() + (z_index + 1) * n);
  std::vector<double> beta(c.beta.begin() + z_index * n, c.beta.begin() + (z_index + 1) * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double disc = 4.0 * alpha[i] - beta[i] * beta[i];
    if (!(alpha[i] > 0.0) || disc < -1e-12 * alpha[i])
      throw GeometryError("symbol discriminant negative", disc);
  }
  auto root = [](double al, double be, double xi) { return std::sqrt(std::max(0.0, 4.0 * al - be * be)) * std::abs(xi); };
  SymbolField a, A;
  a.grid = A.grid = g;
  a.order = A.order = 1.0;
  a.regularity = A.regularity = 1.0;
  a.eval = [=](std::size_t i, double xi) { return 0.5 * cplx(-root(alpha[i], beta[i], xi), -beta[i] * xi); };
  A.eval = [=](std::size_t i, double xi) { return 0.5 * cplx(root(alpha[i], beta[i], xi), -beta[i] * xi); };
  if (check) {
    *check = FactorizationCheck{};
    double ell = std::numeric_limits<double>::infinity(), sa = ell, sr = ell;
    for (std::size_t i = 0; i < n; ++i) {
      sa = std::min(sa, std::sqrt(alpha[i]));
      sr = std::min(sr, std::sqrt(std::max(0.0, alpha[i] - 0.25 * beta[i] * beta[i])));
      for (std::size_t q = 1; q < g.n_half(); ++q) {
        const double xi = g.wavenumber(q);
        const cplx av = a.eval(i, xi), Av = A.eval(i, xi);
        check->max_sum_error = std::max(check->max_sum_error, std::abs(av + Av + cplx(0.0, beta[i] * xi)));
        check->max_product_error =
            std::max(check->max_product_error, std::abs(av * Av + alpha[i] * xi * xi) / (1.0 + xi * xi));
        ell = std::min(ell, -av.real() / std::abs(xi));
      }
    }
    check->ellipticity = ell;
    check->sqrt_alpha_min = sa;
    check->sqrt_reduced_min = sr;
  }
  return {std::move(a), std::move(A)};
}

ParadiffOperator::ParadiffOperator(const SymbolField& a, const CutoffPair& cut)
    : grid_(a.grid), n_(a.grid.n()), columns_(a.grid.n() * a.grid.n(), cplx(0.0)) {
  const long half = static_cast<long>(n_ / 2);
  const double unit = grid_.k_unit();
  std::vector<cplx> samples(n_), hat(n_), shared;
  auto transform = [&](double xi) {
    for (std::size_t i = 0; i < n_; ++i) samples[i] = a.eval(i, xi);
    fft::forward(n_, samples.data(), hat.data());
    for (auto& h : hat) h /= static_cast<double>(n_);
  };
  if (a.xi_independent) {
    transform(0.0);
    shared = hat;
  }
  for (long m = -half; m < half; ++m) {
    const double xi = unit * static_cast<double>(m);
    const double ps = cut.psi(xi);
    if (ps == 0.0) continue;
    cplx* col = &columns_[static_cast<std::size_t>(m + half) * n_];
    if (a.x_independent) {
      col[half] = a.eval(0, xi) * ps;
      continue;
    }
    if (a.xi_independent)
      hat = shared;
    else
      transform(xi);
    for (long t = -half; t < half; ++t) {
      const double c = cut.chi(unit * static_cast<double>(t), xi);
      if (c == 0.0) continue;
      const std::size_t src = static_cast<std::size_t>(t < 0 ? t + static_cast<long>(n_) : t);
      col[t + half] = c * ps * hat[src];
    }
  }
}

std::vector<cplx> ParadiffOperator::apply_full(const std::vector<cplx>& uhat) const {
  const long half = static_cast<long>(n_ / 2), N = static_cast<long>(n_);
  std::vector<cplx> out(n_, cplx(0.0));
  for (long mi = 0; mi < N; ++mi) {
    const cplx u = uhat[static_cast<std::size_t>(mi)];
    if (u == cplx(0.0)) continue;
    const cplx* col = &columns_[static_cast<std::size_t>(mi) * n_];
    const long m = mi - half;
    for (long ti = 0; ti < N; ++ti) {
      if (col[ti] == cplx(0.0)) continue;
      const long k = (ti - half) + m;
      if (k < -half || k >= half) continue;
      out[static_cast<std::size_t>(k + half)] += col[ti] * u;
    }
  }
  return out;
}

std::vector<cplx> ParadiffOperator::dense() const {
  const long half = static_cast<long>(n_ / 2), N = static_cast<long>(n_);
  std::vector<cplx> D(n_ * n_, cplx(0.0));
  for (long mi = 0; mi < N; ++mi)
    for (long ti = 0; ti < N; ++ti) {
      const long ki = (ti - half) + mi;
      if (ki < 0 || ki >= N) continue;
      D[static_cast<std::size_t>(ki * N + mi)] = columns_[static_cast<std::size_t>(mi * N + ti)];
    }
  return D;
}

std::vector<cplx> full_spectrum(const SpectralFunction& u) {
  const long half = static_cast<long>(u.size() / 2);
  std::vector<cplx> c(u.size());
  for (long m = -half; m < half; ++m) c[static_cast<std::size_t>(m + half)] = u.coefficient(m);
  return c;
}

double sobolev_norm_full(const TorusGrid& g, const std::vector<cplx>& c, double s) {
  const long half = static_cast<long>(g.n() / 2);
  double acc = 0.0;
  for (long m = -half; m < half; ++m) {
    const double k = g.k_unit() * static_cast<double>(m);
    acc += std::pow(1.0 + k * k, s) * std::norm(c[static_cast<std::size_t>(m + half)]);
  }
  return std::sqrt(g.period() * acc);
}

SpectralFunction ParadiffOperator::apply(const SpectralFunction& u) const {
  if (!(u.grid() == grid_)) throw InputError("symbol and function on different grids");
  const auto out = apply_full(full_spectrum(u));
  const std::size_t half = n_ / 2;
  std::vector<cplx> c(half + 1);
  for (std::size_t q = 0; q < half; ++q) c[q] = out[q + half];
  c[half] = out[0].real();
  return SpectralFunction::from_coefficients(grid_, std::move(c));
}

SpectralFunction apply_paradiff(const SymbolField& a, const SpectralFunction& u, const CutoffPair& cut) {
  return ParadiffOperator(a, cut).apply(u);
}

SpectralFunction paraproduct(const SpectralFunction& a, const SpectralFunction& u, const CutoffPair& cut) {
  return apply_paradiff(function_symbol(a), u, cut);
}

SpectralFunction bony_remainder(const SpectralFunction& a, const SpectralFunction& u, const CutoffPair& cut) {
  return exact_product(a, u) - paraproduct(a, u, cut) - paraproduct(u, a, cut);
}

Paralinearization paralinearize_dn(const InterfaceState& eta, const SpectralFunction& f, const DomainGeometry& geom,
                                   const DNSettings& s, const CutoffPair& cut) {
  auto dn = dn_apply(eta, f, geom, Side::Lower, s);
  const auto good = dealias(f) - paraproduct(dn.b_field, eta, cut);
  auto main = apply_paradiff(symbol_lambda(eta), good, cut) - paraproduct(dn.v_field, derivative(eta), cut);
  auto residual = dn.g - main;
  std::vector<BlockRatio> blocks;
  const int jmax = lp_max_block(eta.grid());
  for (int j = 0; j <= jmax; ++j) {
    const double rn = l2_norm(lp_project(residual, j));
    const double gn = l2_norm(lp_project(dn.g, j));
    const double scale = std::pow(2.0, -0.5 * j) * gn + std::numeric_limits<double>::epsilon();
    blocks.push_back({j, rn, gn, rn / scale});
  }
  return Paralinearization{std::move(main), std::move(residual), std::move(dn), std::move(blocks)};
}

void write_block_ratios_csv(std::ostream& os, const std::vector<BlockRatio>& blocks) {
  os << "j,residual_norm,g_norm,ratio\n";
  for (const auto& b : blocks) os << b.j << ',' << b.residual_norm << ',' << b.g_norm << ',' << b.ratio << '\n';
}

ParabolicResult parabolic_step(const SymbolField& p, const SpectralFunction& w0, const ZForcing& forcing,
                               double length, int steps, const CutoffPair& cut, double tol) {
  if (steps < 1 || !(length > 0.0)) throw InputError("parabolic march needs a positive interval and steps");
  const auto& g = w0.grid();
  const std::size_t n = g.n();
  // Ellipticity on the represented frequencies where psi = 1.
  double c = std::numeric_limits<double>::infinity();
  std::vector<double> pbar(g.n_half(), 0.0);
  for (std::size_t q = 0; q < g.n_half(); ++q) {
    const double xi = g.wavenumber(q);
    for (std::size_t i = 0; i < n; ++i) {
      const double re = p.eval(i, xi).real();
      pbar[q] += re / static_cast<double>(n);
      if (std::abs(xi) >= 0.25) c = std::min(c, re / std::abs(xi));
    }
  }
  if (!(c > 0.0)) throw InputError("symbol is not elliptic: min Re p / |xi| = " + std::to_string(c));

  const ParadiffOperator T(p, cut);
  const double dz = length / steps;
  auto to_fn = [&](const Vec& v) { return SpectralFunction::from_values(g, v); };
  auto op = [&](const Vec& in, Vec& out) {
    const auto t = T.apply(to_fn(in));
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] + 0.5 * dz * t[i];
  };
  auto precond = [&](const Vec& in, Vec& out) {
    const auto u = to_fn(in);
    std::vector<cplx> co(u.coefficients());
    for (std::size_t q = 0; q < co.size(); ++q) co[q] /= 1.0 + 0.5 * dz * pbar[q] * cut.psi(g.wavenumber(q));
    out = SpectralFunction::from_coefficients(g, std::move(co)).values();
  };

  ParabolicResult res{w0, {w0}, 0};
  SpectralFunction w = w0;
  for (int s = 0; s < steps; ++s) {
    const double z0 = s * dz, z1 = (s + 1) * dz;
    const auto tw = T.apply(w);
    Vec rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = w[i] - 0.5 * dz * tw[i];
    if (forcing) {
      const auto f0 = forcing(z0), f1 = forcing(z1);
      for (std::size_t i = 0; i < n; ++i) rhs[i] += 0.5 * dz * (f0[i] + f1[i]);
    }
    Vec x = w.values();
    const auto kr = gmres(op, precond, rhs, x, tol, 400);
    if (!kr.converged)
      throw SolverError("parabolic implicit stage stalled at " + std::to_string(kr.relative_residual), kr.history);
    res.krylov_iterations += kr.iterations;
    w = to_fn(x);
    res.history.push_back(w);
  }
  res.w = w;
  return res;
}

double symbol_growth_constant(const SymbolField& a) {
  const auto& g = a.grid;
  double C = 0.0;
  for (std::size_t q = 0; q < g.n_half(); ++q) {
    const double xi = g.wavenumber(q);
    if (std::abs(xi) < 0.5) continue;
    for (std::size_t i = 0; i < g.n(); ++i) C = std::max(C, std::abs(a.eval(i, xi)) / std::pow(1.0 + std::abs(xi), a.order));
  }
  return C;
}

}  // namespace muskat
