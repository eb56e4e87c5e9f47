#include "muskat/dirichlet_neumann.hpp"

#include <cmath>
#include <string>

namespace muskat {

SpectralFunction StraightenedField::row(const StraightenedMap& map, std::size_t j) const {
  const std::size_t n = map.n();
  return SpectralFunction::from_values(map.grid, std::vector<double>(v.begin() + j * n, v.begin() + (j + 1) * n));
}

StraightenedField solve_elliptic(const SpectralFunction& f, const StraightenedMap& map, const DNSettings& s) {
  if (!(f.grid() == map.grid)) throw InputError("Dirichlet data and map use different grids");
  StripOperator op(map);
  CoupledSystem sys({StripBlock{&op, 1.0, true}}, nullptr, false);

  StraightenedField out;
  const std::size_t n = map.n(), R = map.rows();
  out.v.resize(R * n);
  for (std::size_t j = 0; j < R; ++j) std::copy(f.values().begin(), f.values().end(), out.v.begin() + j * n);
  const Vec b(out.v.size(), 0.0);
  out.certificate = sys.solve(b, out.v, s.tol, s.max_iter);
  if (!out.certificate.converged)
    throw SolverError("elliptic solve stalled at relative residual " +
                          std::to_string(out.certificate.relative_residual),
                      out.certificate.history);
  Vec Kv(out.v.size());
  op.apply(out.v.data(), Kv.data());
  out.flux.assign(Kv.begin() + (R - 1) * n, Kv.end());
  return out;
}

SpectralFunction evaluate_dn(const StraightenedField& v, const StraightenedMap& map) {
  const std::size_t n = map.n(), M = map.intervals();
  const auto& z = map.z_grid;
  const double z0 = z[M - 2], z1 = z[M - 1], z2 = z[M];
  // Derivative at z2 of the quadratic through the last three nodes.
  const double w0 = (z2 - z1) / ((z0 - z1) * (z0 - z2));
  const double w1 = (z2 - z0) / ((z1 - z0) * (z1 - z2));
  const double w2 = 1.0 / (z2 - z0) + 1.0 / (z2 - z1);
  const auto top = v.row(map, M);
  const auto vx = derivative(top);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double vz = w0 * v.v[(M - 2) * n + i] + w1 * v.v[(M - 1) * n + i] + w2 * v.v[M * n + i];
    const double rz = map.rho_z[M * n + i], rx = map.rho_x[M * n + i];
    g[i] = (1.0 + rx * rx) / rz * vz - rx * vx[i];
  }
  return SpectralFunction::from_values(map.grid, std::move(g));
}

std::pair<SpectralFunction, SpectralFunction> compute_b_v(const SpectralFunction& f, const InterfaceState& eta,
                                                          const SpectralFunction& g) {
  const auto fx = derivative(f), ex = derivative(eta);
  const auto num = g + product(ex, fx);
  std::vector<double> b(eta.size());
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = num[i] / (1.0 + ex[i] * ex[i]);
  auto B = dealias(SpectralFunction::from_values(eta.grid(), std::move(b)));
  auto V = fx - product(B, ex);
  return {std::move(B), std::move(V)};
}

double flat_dn_multiplier(double k, std::optional<double> depth) {
  const double a = std::abs(k);
  if (a == 0.0) return 0.0;
  return depth ? a * std::tanh(*depth * a) : a;
}

StraightenedMap build_map(const InterfaceState& eta, const DomainGeometry& geom, const DNSettings& s) {
  if (s.map == MapKind::Sigma) return build_sigma_map(eta, geom, s.z_intervals);
  // The near-surface map straightens the strip eta - h < y < eta only.
  if (geom.bottom.kind != BoundaryKind::Sampled)
    throw GeometryError("near-surface map needs the floor eta - h", 0.0);
  const auto gap = eta - *geom.bottom.level;
  for (double v : gap.values())
    if (std::abs(v - geom.h) > 1e-12 * (1.0 + geom.h))
      throw GeometryError("near-surface map needs the floor eta - h", v);
  return build_paper_map(eta, geom.h, s.tau, s.z_intervals);
}

DNOutput dn_apply(const InterfaceState& eta, const SpectralFunction& f, const DomainGeometry& geom, Side side,
                  const DNSettings& s) {
  const auto fd = dealias(f);
  if (side == Side::Upper) {
    // y -> -y turns the upper phase into a lower one with interface -eta; the
    // upward normal flips, hence the sign.
    auto r = dn_apply(-eta, fd, reflected_upper(geom), Side::Lower, s);
    auto g = -r.g, gt = -r.g_trace;
    auto [B, V] = compute_b_v(fd, eta, g);
    return DNOutput{std::move(g), std::move(gt), std::move(B), std::move(V), r.residual, r.iterations};
  }
  const auto map = build_map(eta, geom, s);
  const auto field = solve_elliptic(fd, map, s);
  auto g = SpectralFunction::from_values(eta.grid(), field.flux);
  auto gt = evaluate_dn(field, map);
  auto [B, V] = compute_b_v(fd, eta, g);
  return DNOutput{std::move(g), std::move(gt), std::move(B), std::move(V), field.certificate.relative_residual,
                  field.certificate.iterations};
}

}  // namespace muskat
