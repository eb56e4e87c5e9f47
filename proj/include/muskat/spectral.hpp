#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <vector>

#include "muskat/errors.hpp"

namespace muskat {

using cplx = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform periodic grid x_i = i * period / n.
class TorusGrid {
 public:
  explicit TorusGrid(std::size_t n_points, double period = kTwoPi);

  std::size_t n() const { return n_; }
  std::size_t n_half() const { return n_ / 2 + 1; }
  double period() const { return period_; }
  double dx() const { return period_ / static_cast<double>(n_); }
  double x(std::size_t i) const { return dx() * static_cast<double>(i); }
  /// 2*pi/period, the wavenumber of the first mode.
  double k_unit() const { return kTwoPi / period_; }
  /// Wavenumber of half-spectrum slot q (0..n/2). The Nyquist slot is reported
  /// as -n/2, the member of the represented set {-n/2, ..., n/2-1}.
  double wavenumber(std::size_t q) const;
  /// Largest |k| represented.
  double k_max() const { return k_unit() * static_cast<double>(n_ / 2); }

  bool operator==(const TorusGrid& o) const { return n_ == o.n_ && period_ == o.period_; }

 private:
  std::size_t n_;
  double period_;
};

/// Real periodic function held both as samples and as coefficients c_k with
/// u(x) = sum_k c_k exp(i k x); only k = 0..n/2 are stored, c_{-k} = conj(c_k).
class SpectralFunction {
 public:
  static SpectralFunction from_values(const TorusGrid& g, std::vector<double> values);
  static SpectralFunction from_coefficients(const TorusGrid& g, std::vector<cplx> half);
  static SpectralFunction zero(const TorusGrid& g);
  static SpectralFunction constant(const TorusGrid& g, double c);
  static SpectralFunction from_function(const TorusGrid& g, const std::function<double(double)>& f);

  const TorusGrid& grid() const { return grid_; }
  std::size_t size() const { return grid_.n(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<cplx>& coefficients() const { return coeffs_; }
  double operator[](std::size_t i) const { return values_[i]; }
  /// Coefficient of integer mode index m in [-n/2, n/2-1].
  cplx coefficient(long m) const;
  double mean() const { return coeffs_[0].real(); }

  SpectralFunction operator+(const SpectralFunction& o) const;
  SpectralFunction operator-(const SpectralFunction& o) const;
  SpectralFunction operator-() const;
  SpectralFunction operator*(double s) const;

 private:
  SpectralFunction(TorusGrid g, std::vector<double> v, std::vector<cplx> c)
      : grid_(g), values_(std::move(v)), coeffs_(std::move(c)) {}
  TorusGrid grid_;
  std::vector<double> values_;
  std::vector<cplx> coeffs_;
};

inline SpectralFunction operator*(double s, const SpectralFunction& u) { return u * s; }

using Multiplier = std::function<cplx(double)>;

SpectralFunction apply_multiplier(const SpectralFunction& u, const Multiplier& m);

/// (period * sum_k (1+k^2)^s |c_k|^2)^(1/2) over the represented modes, i.e. the
/// unnormalized integral convention: ||cos||_0 = sqrt(pi) on [0, 2 pi).
double sobolev_norm(const SpectralFunction& u, double s);
double l2_norm(const SpectralFunction& u);
double linf_norm(const SpectralFunction& u);
/// Integral of u*v over one period (exact for the trigonometric interpolants).
double inner_product(const SpectralFunction& u, const SpectralFunction& v);

/// Littlewood-Paley block: 2^j <= |k| < 2^{j+1} for j >= 0, |k| < 1 for j = -1.
SpectralFunction lp_project(const SpectralFunction& u, int j);
/// Index of the block containing the largest represented |k|.
int lp_max_block(const TorusGrid& g);

/// Zero every mode with |k| > rule * k_max.
SpectralFunction dealias(const SpectralFunction& u, double rule = 2.0 / 3.0);

/// Spectral derivative; the Nyquist mode is dropped.
SpectralFunction derivative(const SpectralFunction& u, int order = 1);
/// |D| u.
SpectralFunction abs_derivative(const SpectralFunction& u);

/// Pointwise product of samples (aliased).
SpectralFunction pointwise_product(const SpectralFunction& u, const SpectralFunction& v);
/// Exact product truncated to the represented modes (zero-padded transform).
SpectralFunction exact_product(const SpectralFunction& u, const SpectralFunction& v);
/// exact_product followed by the 2/3 rule.
SpectralFunction product(const SpectralFunction& u, const SpectralFunction& v);

SpectralFunction map_values(const SpectralFunction& u, const std::function<double(double)>& f);

/// Row-wise spectral derivative of `rows` contiguous length-n sample rows.
void derivative_rows(const TorusGrid& g, std::size_t rows, const double* in, double* out);

/// Rows "k,re,im" for k = -n/2 .. n/2-1.
void write_spectrum_csv(std::ostream& os, const SpectralFunction& u);

}  // namespace muskat
