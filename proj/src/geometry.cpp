#include "muskat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace muskat {

namespace {

constexpr std::array<double, kQuadPoints> kGaussX{-0.8611363115940526, -0.3399810435848563,
                                                  0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, kQuadPoints> kGaussW{0.3478548451374538, 0.6521451548625461,
                                                  0.6521451548625461, 0.3478548451374538};

void check_intervals(std::size_t M) {
  if (M < 8 || M % 2 != 0) throw InputError("z interval count must be even and >= 8");
}

struct Slice {
  std::vector<double> rho, rho_z, rho_x;
};

template <class Eval>
void fill_map(StraightenedMap& map, Eval&& eval) {
  const std::size_t n = map.n(), R = map.rows();
  map.rho.resize(R * n);
  map.rho_z.resize(R * n);
  map.rho_x.resize(R * n);
  for (std::size_t j = 0; j < R; ++j) {
    Slice s = eval(map.z_grid[j]);
    std::copy(s.rho.begin(), s.rho.end(), map.rho.begin() + j * n);
    std::copy(s.rho_z.begin(), s.rho_z.end(), map.rho_z.begin() + j * n);
    std::copy(s.rho_x.begin(), s.rho_x.end(), map.rho_x.begin() + j * n);
  }
  const std::size_t E = map.intervals() / 2;
  map.zq.resize(E * kQuadPoints);
  map.wq.resize(E * kQuadPoints);
  map.rho_z_q.resize(E * kQuadPoints * n);
  map.rho_x_q.resize(E * kQuadPoints * n);
  for (std::size_t e = 0; e < E; ++e) {
    const double za = map.z_grid[2 * e], zb = map.z_grid[2 * e + 2];
    for (std::size_t q = 0; q < kQuadPoints; ++q) {
      const std::size_t p = e * kQuadPoints + q;
      map.zq[p] = za + 0.5 * (zb - za) * (kGaussX[q] + 1.0);
      map.wq[p] = 0.5 * (zb - za) * kGaussW[q];
      Slice s = eval(map.zq[p]);
      std::copy(s.rho_z.begin(), s.rho_z.end(), map.rho_z_q.begin() + p * n);
      std::copy(s.rho_x.begin(), s.rho_x.end(), map.rho_x_q.begin() + p * n);
    }
  }
  double m = std::numeric_limits<double>::infinity();
  for (double v : map.rho_z) m = std::min(m, v);
  for (double v : map.rho_z_q) m = std::min(m, v);
  map.min_rho_z = m;
}

}  // namespace

DomainGeometry reflected_upper(const DomainGeometry& g) {
  DomainGeometry r = g;
  r.bottom = g.top;
  if (g.top.kind == BoundaryKind::Sampled) r.bottom.level = -(*g.top.level);
  r.top = Boundary::empty();
  return r;
}

double truncation_depth(const DomainGeometry& g, const TorusGrid& grid) {
  if (g.truncation_depth > 0.0) return g.truncation_depth;
  return std::max(3.0 * grid.period(), 10.0 / grid.k_unit());
}

double default_z_stretch(const DomainGeometry& g) {
  if (g.z_stretch >= 0.0) return g.z_stretch;
  return g.bottom.kind == BoundaryKind::Empty ? 6.0 : 0.0;
}

SpectralFunction lower_level(const DomainGeometry& g, const TorusGrid& grid) {
  switch (g.bottom.kind) {
    case BoundaryKind::Empty:
      return SpectralFunction::constant(grid, -truncation_depth(g, grid));
    case BoundaryKind::FlatDepth:
      return SpectralFunction::constant(grid, -g.bottom.depth);
    case BoundaryKind::Sampled:
      if (!(g.bottom.level->grid() == grid)) throw InputError("bottom sampled on a different grid");
      return *g.bottom.level;
  }
  return SpectralFunction::zero(grid);
}

double check_separation(const InterfaceState& eta, const DomainGeometry& g) {
  if (!(g.h > 0.0)) throw InputError("separation h must be positive");
  if (g.bottom.kind == BoundaryKind::FlatDepth && !(g.bottom.depth > g.h))
    throw GeometryError("flat depth must exceed h", g.bottom.depth);
  const auto b = lower_level(g, eta.grid());
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eta.size(); ++i) gap = std::min(gap, eta[i] - b[i]);
  // A sampled floor exactly at distance h is admissible up to roundoff.
  if (gap < g.h * (1.0 - 1e-12))
    throw GeometryError("interface within " + std::to_string(gap) + " of the lower boundary (h = " +
                            std::to_string(g.h) + ")",
                        gap);
  return gap;
}

double check_upper_separation(const InterfaceState& eta, const DomainGeometry& g) {
  return check_separation(-eta, reflected_upper(g));
}

std::vector<double> make_z_grid(std::size_t M, double stretch) {
  check_intervals(M);
  std::vector<double> z(M + 1);
  for (std::size_t j = 0; j <= M; ++j) {
    const double s = static_cast<double>(M - j) / static_cast<double>(M);
    const double g = stretch > 0.0 ? std::expm1(stretch * s) / std::expm1(stretch) : s;
    z[j] = -g;
  }
  z[0] = -1.0;
  z[M] = 0.0;
  return z;
}

SpectralFunction StraightenedMap::surface() const {
  const std::size_t j = intervals();
  return SpectralFunction::from_values(grid, std::vector<double>(rho.begin() + j * n(), rho.begin() + (j + 1) * n()));
}

StraightenedMap build_sigma_map(const InterfaceState& eta, const DomainGeometry& geom, std::size_t M) {
  check_intervals(M);
  check_separation(eta, geom);
  const auto& grid = eta.grid();
  const auto b = lower_level(geom, grid);
  const auto deta = derivative(eta), db = derivative(b);

  StraightenedMap map;
  map.kind = MapKind::Sigma;
  map.grid = grid;
  map.h = geom.h;
  map.z_grid = make_z_grid(M, default_z_stretch(geom));
  const std::size_t n = grid.n();
  fill_map(map, [&](double z) {
    Slice s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      s.rho_z[i] = eta[i] - b[i];
      s.rho[i] = eta[i] + z * s.rho_z[i];
      s.rho_x[i] = deta[i] + z * (deta[i] - db[i]);
    }
    return s;
  });
  // The top row must reproduce the interface exactly.
  std::copy(eta.values().begin(), eta.values().end(), map.rho.begin() + M * n);
  const double threshold = std::min(1.0, geom.h / 2.0);
  if (map.min_rho_z < threshold)
    throw MapValidityError("sigma map degenerate: min d_z rho = " + std::to_string(map.min_rho_z), map.min_rho_z);
  return map;
}

double default_tau(const InterfaceState& eta, double h) {
  double besov = 0.0;
  const int jmax = lp_max_block(eta.grid());
  for (int j = 0; j <= jmax; ++j) besov += std::ldexp(1.0, j) * linf_norm(lp_project(eta, j));
  return h / (4.0 * (1.0 + besov));
}

StraightenedMap build_paper_map(const InterfaceState& eta, double h, double tau, std::size_t M) {
  check_intervals(M);
  if (!(h > 0.0)) throw InputError("h must be positive");
  if (tau < 0.0) tau = default_tau(eta, h);
  const auto& grid = eta.grid();
  const std::size_t n = grid.n();

  StraightenedMap map;
  map.kind = MapKind::PaperNearSurface;
  map.grid = grid;
  map.h = h;
  map.tau = tau;
  map.z_grid = make_z_grid(M, 0.0);

  auto japan = [](double k) { return std::sqrt(1.0 + k * k); };
  fill_map(map, [&](double z) {
    // E = e^{tau z <D>} eta, F = e^{-(1+z) tau <D>} eta.
    const auto E = apply_multiplier(eta, [&](double k) -> cplx { return std::exp(tau * z * japan(k)); });
    const auto F = apply_multiplier(eta, [&](double k) -> cplx { return std::exp(-(1.0 + z) * tau * japan(k)); });
    const auto DE = apply_multiplier(E, [&](double k) -> cplx { return tau * japan(k); });
    const auto DF = apply_multiplier(F, [&](double k) -> cplx { return tau * japan(k); });
    const auto Ex = derivative(E), Fx = derivative(F);
    Slice s{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      s.rho[i] = (1.0 + z) * E[i] - z * (F[i] - h);
      s.rho_z[i] = E[i] + (1.0 + z) * DE[i] - F[i] + h + z * DF[i];
      s.rho_x[i] = (1.0 + z) * Ex[i] - z * Fx[i];
    }
    return s;
  });
  std::copy(eta.values().begin(), eta.values().end(), map.rho.begin() + M * n);
  const double threshold = std::min(1.0, h / 2.0);
  if (map.min_rho_z < threshold)
    throw MapValidityError("near-surface map invalid: min d_z rho = " + std::to_string(map.min_rho_z) +
                               " below " + std::to_string(threshold) + "; decrease tau",
                           map.min_rho_z);
  return map;
}

EllipticCoefficients coefficients_from_map(const StraightenedMap& map) {
  const std::size_t n = map.n(), R = map.rows();
  EllipticCoefficients c;
  c.n = n;
  c.rows = R;
  const std::size_t size = n * R;
  c.alpha.resize(size);
  c.beta.resize(size);
  c.gamma.resize(size);
  c.a11.resize(size);
  c.a12.resize(size);
  c.a22.resize(size);

  std::vector<double> rho_xx(size), rho_zx(size), rho_zz(size);
  derivative_rows(map.grid, R, map.rho_x.data(), rho_xx.data());
  derivative_rows(map.grid, R, map.rho_z.data(), rho_zx.data());

  // Second z-derivative by three-point differences on the (possibly stretched) nodes.
  const auto& z = map.z_grid;
  for (std::size_t j = 0; j < R; ++j) {
    const std::size_t c0 = j == 0 ? 0 : (j == R - 1 ? R - 3 : j - 1);
    const double z0 = z[c0], z1 = z[c0 + 1], z2 = z[c0 + 2];
    const double w0 = 2.0 / ((z0 - z1) * (z0 - z2));
    const double w1 = 2.0 / ((z1 - z0) * (z1 - z2));
    const double w2 = 2.0 / ((z2 - z0) * (z2 - z1));
    for (std::size_t i = 0; i < n; ++i)
      rho_zz[j * n + i] = w0 * map.rho[c0 * n + i] + w1 * map.rho[(c0 + 1) * n + i] + w2 * map.rho[(c0 + 2) * n + i];
  }

  for (std::size_t p = 0; p < size; ++p) {
    const double rz = map.rho_z[p], rx = map.rho_x[p];
    const double q = 1.0 + rx * rx;
    c.alpha[p] = rz * rz / q;
    c.beta[p] = -2.0 * rz * rx / q;
    c.gamma[p] = (rho_zz[p] + c.alpha[p] * rho_xx[p] + c.beta[p] * rho_zx[p]) / rz;
    c.a11[p] = rz;
    c.a12[p] = -rx;
    c.a22[p] = q / rz;
    const double det = c.a11[p] * c.a22[p] - c.a12[p] * c.a12[p];
    c.max_det_error = std::max(c.max_det_error, std::abs(det - 1.0));
  }
  if (c.max_det_error > 1e-10) throw GeometryError("coefficient matrix lost det A = 1", c.max_det_error);
  return c;
}

void write_map_csv(std::ostream& os, const StraightenedMap& map) {
  os << "x,z,rho\n";
  for (std::size_t j = 0; j < map.rows(); ++j)
    for (std::size_t i = 0; i < map.n(); ++i)
      os << map.grid.x(i) << ',' << map.z_grid[j] << ',' << map.rho[j * map.n() + i] << '\n';
}

}  // namespace muskat
