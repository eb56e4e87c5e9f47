#pragma once

#include <array>
#include <functional>
#include <vector>

#include "muskat/geometry.hpp"
#include "muskat/krylov.hpp"

namespace muskat {

/// Variational operator of div(A grad v) on one straightened strip: Fourier
/// collocation in x, quadratic Lagrange elements in z. The x quadrature weight
/// is left out, so the top row of K v is the conormal flux at each surface node.
/// Symmetric positive semi-definite; constants span its kernel.
class StripOperator {
 public:
  explicit StripOperator(const StraightenedMap& map);

  std::size_t n() const { return n_; }
  std::size_t rows() const { return R_; }
  std::size_t size() const { return n_ * R_; }
  const TorusGrid& grid() const { return grid_; }
  const std::vector<double>& z_grid() const { return z_; }

  /// out = K u, both of length rows() * n().
  void apply(const double* u, double* out) const;

  /// Element-assembled 1D matrix of the x-averaged coefficients at wavenumber k,
  /// added into `add(i, j, value)` for the local
  /// node pair (i, j) of the strip.
  template <class Add>
  void assemble_flat(double k, Add&& add) const {
    const std::size_t E = (R_ - 1) / 2;
    for (std::size_t e = 0; e < E; ++e)
      for (std::size_t q = 0; q < kQuadPoints; ++q) {
        const std::size_t p = e * kQuadPoints + q;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            add(2 * e + a, 2 * e + b,
                mean_a22_[p] * dL_[p][a] * dL_[p][b] + k * k * mean_a11_[p] * L_[p][a] * L_[p][b]);
      }
  }

 private:
  TorusGrid grid_;
  std::size_t n_, R_;
  std::vector<double> z_;
  std::vector<std::array<double, 3>> L_, dL_;  // per quadrature point
  std::vector<double> wa11_, wa12_, wa22_;     // per quadrature point and x node
  std::vector<double> mean_a11_, mean_a22_;
};

/// Symmetric positive definite band matrix (upper storage) with LAPACK Cholesky.
class BandedSPD {
 public:
  BandedSPD(int n, int kd) : n_(n), kd_(kd), ld_(kd + 1), ab_(static_cast<std::size_t>(ld_) * n, 0.0) {}
  void add(int i, int j, double v);
  void set_identity_row(int i);
  void factor();
  /// Solves in place for `nrhs` column-major right-hand sides.
  void solve(double* b, int nrhs) const;
  int n() const { return n_; }

 private:
  int n_, kd_, ld_;
  std::vector<double> ab_;
  bool factored_ = false;
};

/// One block of a coupled system.
struct StripBlock {
  const StripOperator* op = nullptr;
  double scale = 1.0;
  bool fixed_top = false;  // Dirichlet surface row
};

/// Block-diagonal sum of scaled strip operators plus a coupling between the
/// surface rows given as a symmetric matrix Fourier multiplier T(k). Optionally
/// the mean and the Nyquist component of the first surface row are pinned to
/// their initial values; both are null directions when no row is Dirichlet. At most
/// two strips; the second is ordered bottom-up reversed so that the two
/// surfaces are neighbours in the band preconditioner.
class CoupledSystem {
 public:
  using Coupling = std::function<std::vector<double>(double k)>;  // row-major S x S

  CoupledSystem(std::vector<StripBlock> strips, Coupling coupling, bool pin_first_top_mean);

  std::size_t size() const { return total_; }
  std::size_t offset(std::size_t s) const { return offsets_[s]; }
  std::size_t top_offset(std::size_t s) const { return offsets_[s] + (strips_[s].op->rows() - 1) * n_; }

  void apply(const Vec& x, Vec& y) const;
  void project(Vec& x) const;
  void precondition(const Vec& r, Vec& z) const;

  /// Solves A x = b on the free unknowns with x as initial guess.
  KrylovResult solve(const Vec& b, Vec& x, double tol, int max_iter) const;

 private:
  std::vector<StripBlock> strips_;
  Coupling coupling_;
  bool pin_;
  std::size_t n_, nh_, total_;
  std::vector<std::size_t> offsets_;
  std::vector<int> band_index_;  // per strip row: first strip natural, second reversed
  std::vector<BandedSPD> factors_;
};

}  // namespace muskat
