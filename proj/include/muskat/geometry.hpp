#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "muskat/spectral.hpp"

namespace muskat {

using InterfaceState = SpectralFunction;

enum class BoundaryKind { Empty, FlatDepth, Sampled };

/// A rigid boundary of one phase. FlatDepth stores the distance H from y = 0;
/// Sampled stores the absolute level y = b(x).
struct Boundary {
  BoundaryKind kind = BoundaryKind::Empty;
  double depth = 0.0;
  std::optional<SpectralFunction> level;

  static Boundary empty() { return {}; }
  static Boundary flat(double H) { return {BoundaryKind::FlatDepth, H, std::nullopt}; }
  static Boundary sampled(SpectralFunction b) { return {BoundaryKind::Sampled, 0.0, std::move(b)}; }
};

struct DomainGeometry {
  Boundary bottom;  // below the interface
  Boundary top;     // above the interface (two-phase only)
  double h = 0.1;   // required separation from either boundary
  /// Depth of the artificial Neumann floor for an Empty boundary; 0 selects
  /// max(3 * period, 10 / k_min).
  double truncation_depth = 0.0;
  /// Exponential clustering of z nodes toward the surface; negative selects 6
  /// for Empty boundaries and 0 (uniform) otherwise.
  double z_stretch = -1.0;
};

/// Geometry of the upper phase mirrored by y -> -y, so that it can be handled
/// by the lower-phase machinery with interface -eta.
DomainGeometry reflected_upper(const DomainGeometry& g);

double truncation_depth(const DomainGeometry& g, const TorusGrid& grid);
double default_z_stretch(const DomainGeometry& g);

/// Absolute lower level b(x) of the lower phase, with Empty replaced by -L.
SpectralFunction lower_level(const DomainGeometry& g, const TorusGrid& grid);

/// min_x (eta - b); throws GeometryError when it falls below h.
double check_separation(const InterfaceState& eta, const DomainGeometry& g);
/// Same for the upper phase: min_x (b+ - eta).
double check_upper_separation(const InterfaceState& eta, const DomainGeometry& g);

/// Nodes z_0 = -1 < ... < z_M = 0 with z = -g(s), s = (M - j) / M and
/// g(s) = (e^{cs} - 1)/(e^c - 1) (g(s) = s when c = 0).
std::vector<double> make_z_grid(std::size_t M, double stretch);

/// Gauss-Legendre rule used on every quadratic element in z.
inline constexpr std::size_t kQuadPoints = 4;

enum class MapKind { Sigma, PaperNearSurface };

/// rho(x, z) on the product grid. Node arrays are row-major with row j at
/// z_grid[j]; the top row j = M is the interface. The *_q arrays hold the same
/// fields at the Gauss points of the M/2 quadratic elements, element-major.
struct StraightenedMap {
  MapKind kind = MapKind::Sigma;
  TorusGrid grid{8};
  std::vector<double> z_grid;
  double tau = 0.0;
  double h = 0.0;
  std::vector<double> rho, rho_z, rho_x;
  std::vector<double> zq, wq;  // quadrature abscissae and weights (incl. Jacobian)
  std::vector<double> rho_z_q, rho_x_q;
  double min_rho_z = 0.0;

  std::size_t intervals() const { return z_grid.size() - 1; }
  std::size_t rows() const { return z_grid.size(); }
  std::size_t n() const { return grid.n(); }
  const double* row(const std::vector<double>& f, std::size_t j) const { return f.data() + j * n(); }
  /// Interface elevation, i.e. the top row of rho.
  SpectralFunction surface() const;
};

StraightenedMap build_sigma_map(const InterfaceState& eta, const DomainGeometry& geom, std::size_t M);

/// Default smoothing scale h / (4 (1 + sum_j 2^j |P_j eta|_inf)).
double default_tau(const InterfaceState& eta, double h);

/// Near-surface map of the strip eta - h < y < eta. Pass tau < 0 for the default.
StraightenedMap build_paper_map(const InterfaceState& eta, double h, double tau, std::size_t M);

struct EllipticCoefficients {
  std::size_t n = 0, rows = 0;
  std::vector<double> alpha, beta, gamma;
  std::vector<double> a11, a12, a22;
  double max_det_error = 0.0;
};

EllipticCoefficients coefficients_from_map(const StraightenedMap& map);

/// "x,z,rho" rows for plotting.
void write_map_csv(std::ostream& os, const StraightenedMap& map);

}  // namespace muskat
