#pragma once

#include <optional>
#include <utility>

#include "muskat/elliptic.hpp"
#include "muskat/geometry.hpp"

namespace muskat {

enum class Side { Lower, Upper };

struct DNSettings {
  std::size_t z_intervals = 64;  // even; M/2 quadratic elements
  double tol = 1e-10;
  int max_iter = 500;
  MapKind map = MapKind::Sigma;
  double tau = -1.0;  // near-surface map only; negative selects default_tau
};

/// Solution of the straightened problem on the nodes of `map`.
struct StraightenedField {
  std::vector<double> v;     // row-major like the map arrays
  std::vector<double> flux;  // top row of K v: the variational conormal flux
  KrylovResult certificate;

  SpectralFunction row(const StraightenedMap& map, std::size_t j) const;
};

/// div(A grad v) = 0 with v = f at z = 0 and the natural (conormal) condition
/// at z = -1; PCG with the per-wavenumber flat-coefficient preconditioner.
/// Initial guess: f extended constantly in z.
StraightenedField solve_elliptic(const SpectralFunction& f, const StraightenedMap& map, const DNSettings& s = {});

/// Chain-rule trace ((1+rho_x^2)/rho_z) v_z - rho_x v_x at z = 0, with v_z from
/// the one-sided three-point stencil.
SpectralFunction evaluate_dn(const StraightenedField& v, const StraightenedMap& map);

/// B = (eta' f' + g)/(1 + eta'^2), V = f' - B eta'.
std::pair<SpectralFunction, SpectralFunction> compute_b_v(const SpectralFunction& f, const InterfaceState& eta,
                                                          const SpectralFunction& g);

/// |k| tanh(H|k|), or |k| when depth is empty (infinite).
double flat_dn_multiplier(double k, std::optional<double> depth);

struct DNOutput {
  SpectralFunction g;        // G(eta) f, variational flux
  SpectralFunction g_trace;  // same quantity from the chain-rule trace
  SpectralFunction b_field;
  SpectralFunction v_field;
  double residual = 0.0;
  int iterations = 0;
};

/// G^-(eta) f for the lower phase, or G^+(eta) f for the upper phase; both use
/// the upward normal, so G^- is nonnegative and G^+ nonpositive.
DNOutput dn_apply(const InterfaceState& eta, const SpectralFunction& f, const DomainGeometry& geom,
                  Side side = Side::Lower, const DNSettings& s = {});

/// Straightening map used by dn_apply for the lower phase.
StraightenedMap build_map(const InterfaceState& eta, const DomainGeometry& geom, const DNSettings& s);

}  // namespace muskat
