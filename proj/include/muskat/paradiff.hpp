#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "muskat/dirichlet_neumann.hpp"

namespace muskat {

/// a(x_i, xi) on the grid points of one period.
struct SymbolField {
  TorusGrid grid{8};
  double order = 0.0;
  double regularity = 0.0;
  std::function<cplx(std::size_t i, double xi)> eval;
  bool x_independent = false;   // a = a(xi)
  bool xi_independent = false;  // a = a(x)
};

/// Smooth step 0 -> 1 on [0, 1] built from exp(-1/t).
double smooth_step(double t);

struct CutoffPair {
  double eps1 = 0.1, eps2 = 0.2;
  double psi(double xi) const;                // 0 for |xi| <= 1/5, 1 for |xi| >= 1/4
  double chi(double theta, double xi) const;  // 1 for |theta| <= eps1 |xi|, 0 beyond eps2 |xi|
};

/// Principal symbol of the DN operator for a one-dimensional interface: |xi|.
SymbolField symbol_lambda(const InterfaceState& eta);
/// sqrt((1+|grad eta|^2)|xi|^2 - (grad eta . xi)^2) for d <= 2.
double lambda_symbol_2d(double gx, double gy, double xi1, double xi2);

/// Function a(x) viewed as an order-zero symbol.
SymbolField function_symbol(const SpectralFunction& a, double regularity = 1.0);
/// x-independent symbol m(xi).
SymbolField fourier_symbol(const TorusGrid& g, double order, std::function<cplx(double)> m);

struct FactorizationCheck {
  double max_sum_error = 0.0;      // |a + A + i beta xi|
  double max_product_error = 0.0;  // |a A + alpha xi^2| / (1 + xi^2)
  double ellipticity = 0.0;        // min Re(-a) / |xi| over sampled points
  double sqrt_alpha_min = 0.0;
  /// min sqrt(alpha - beta^2/4) = min rho_z / (1 + rho_x^2): the exact lower bound
  /// of Re(-a)/|xi|. sqrt_alpha_min exceeds it wherever rho_x != 0.
  double sqrt_reduced_min = 0.0;
};

/// a, A = (-i beta xi -+ sqrt(4 alpha xi^2 - beta^2 xi^2)) / 2 on the z row `z_index`.
std::pair<SymbolField, SymbolField> symbols_a_A(const EllipticCoefficients& c, const TorusGrid& g,
                                                std::size_t z_index, FactorizationCheck* check = nullptr);

/// Discrete quantization
///   (T_a u)^(k) = sum_m chi(k - m, m) ahat(k - m, m) psi(m) uhat(m),
/// ahat the x-transform of a(., m); contributions landing outside the
/// represented modes are dropped. Full spectra use index m + n/2 for mode m.
class ParadiffOperator {
 public:
  ParadiffOperator(const SymbolField& a, const CutoffPair& cut = {});

  SpectralFunction apply(const SpectralFunction& u) const;
  std::vector<cplx> apply_full(const std::vector<cplx>& uhat) const;
  /// Row k, column m (both shifted by n/2), row-major.
  std::vector<cplx> dense() const;
  std::size_t n() const { return n_; }

 private:
  TorusGrid grid_;
  std::size_t n_;
  std::vector<cplx> columns_;  // ahat(theta, m) * chi * psi, [m][theta]
};

SpectralFunction apply_paradiff(const SymbolField& a, const SpectralFunction& u, const CutoffPair& cut = {});

/// T_a u for a function a.
SpectralFunction paraproduct(const SpectralFunction& a, const SpectralFunction& u, const CutoffPair& cut = {});

/// a u - T_a u - T_u a with the exact (zero-padded) product.
SpectralFunction bony_remainder(const SpectralFunction& a, const SpectralFunction& u, const CutoffPair& cut = {});

/// Full spectrum helpers (index m + n/2).
std::vector<cplx> full_spectrum(const SpectralFunction& u);
double sobolev_norm_full(const TorusGrid& g, const std::vector<cplx>& c, double s);

struct BlockRatio {
  int j;
  double residual_norm, g_norm, ratio;
};

struct Paralinearization {
  SpectralFunction main, residual;
  DNOutput dn;
  std::vector<BlockRatio> blocks;
};

/// main = T_lambda(f - T_B eta) - T_V d_x eta, residual = G(eta) f - main.
Paralinearization paralinearize_dn(const InterfaceState& eta, const SpectralFunction& f, const DomainGeometry& geom,
                                   const DNSettings& s = {}, const CutoffPair& cut = {});

void write_block_ratios_csv(std::ostream& os, const std::vector<BlockRatio>& blocks);

/// Forcing F(z) for the parabolic march; may be empty.
using ZForcing = std::function<SpectralFunction(double z)>;

struct ParabolicResult {
  SpectralFunction w;
  std::vector<SpectralFunction> history;  // w at every z step, including the start
  int krylov_iterations = 0;
};

/// Crank-Nicolson march of d_z w + T_p w = F over [0, length] in `steps` steps;
/// each implicit stage by GMRES preconditioned with (1 + dz/2 pbar psi)^{-1}.
ParabolicResult parabolic_step(const SymbolField& p, const SpectralFunction& w0, const ZForcing& forcing,
                               double length, int steps, const CutoffPair& cut = {}, double tol = 1e-12);

/// max |a(x, xi)| / (1 + |xi|)^m over grid points and represented |xi| >= 1/2.
double symbol_growth_constant(const SymbolField& a);

}  // namespace muskat
