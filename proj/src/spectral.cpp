#include "muskat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "muskat/fft.hpp"

namespace muskat {

TorusGrid::TorusGrid(std::size_t n_points, double period) : n_(n_points), period_(period) {
  if (n_ < 8 || (n_ & (n_ - 1)) != 0)
    throw InputError("grid size must be a power of two >= 8, got " + std::to_string(n_));
  if (!(period_ > 0.0) || !std::isfinite(period_)) throw InputError("period must be positive");
}

double TorusGrid::wavenumber(std::size_t q) const {
  const auto half = static_cast<long>(n_ / 2);
  long m = static_cast<long>(q);
  if (m == half) m = -half;
  return k_unit() * static_cast<double>(m);
}

SpectralFunction SpectralFunction::from_values(const TorusGrid& g, std::vector<double> values) {
  if (values.size() != g.n()) throw InputError("sample count does not match grid");
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("non-finite sample");
  std::vector<cplx> c(g.n_half());
  fft::forward_rows(g.n(), 1, values.data(), c.data());
  const double inv = 1.0 / static_cast<double>(g.n());
  for (auto& x : c) x *= inv;
  c[0] = c[0].real();
  c.back() = c.back().real();
  return SpectralFunction(g, std::move(values), std::move(c));
}

SpectralFunction SpectralFunction::from_coefficients(const TorusGrid& g, std::vector<cplx> half) {
  if (half.size() != g.n_half()) throw InputError("coefficient count does not match grid");
  for (const auto& c : half)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) throw InputError("non-finite coefficient");
  half[0] = half[0].real();
  half.back() = half.back().real();
  std::vector<double> v(g.n());
  fft::backward_rows(g.n(), 1, half.data(), v.data());
  return SpectralFunction(g, std::move(v), std::move(half));
}

SpectralFunction SpectralFunction::zero(const TorusGrid& g) {
  return SpectralFunction(g, std::vector<double>(g.n(), 0.0), std::vector<cplx>(g.n_half()));
}

SpectralFunction SpectralFunction::constant(const TorusGrid& g, double c) {
  std::vector<cplx> h(g.n_half());
  h[0] = c;
  return SpectralFunction(g, std::vector<double>(g.n(), c), std::move(h));
}

SpectralFunction SpectralFunction::from_function(const TorusGrid& g,
                                                 const std::function<double(double)>& f) {
  std::vector<double> v(g.n());
  for (std::size_t i = 0; i < g.n(); ++i) v[i] = f(g.x(i));
  return from_values(g, std::move(v));
}

cplx SpectralFunction::coefficient(long m) const {
  const auto half = static_cast<long>(grid_.n() / 2);
  if (m < -half || m >= half) throw InputError("mode index out of range");
  if (m == -half) return coeffs_.back();
  return m >= 0 ? coeffs_[static_cast<std::size_t>(m)] : std::conj(coeffs_[static_cast<std::size_t>(-m)]);
}

namespace {

void require_same_grid(const SpectralFunction& a, const SpectralFunction& b) {
  if (!(a.grid() == b.grid())) throw InputError("functions live on different grids");
}

SpectralFunction combine(const SpectralFunction& a, const SpectralFunction& b, double sa, double sb) {
  require_same_grid(a, b);
  std::vector<cplx> c(a.coefficients().size());
  for (std::size_t q = 0; q < c.size(); ++q) c[q] = sa * a.coefficients()[q] + sb * b.coefficients()[q];
  return SpectralFunction::from_coefficients(a.grid(), std::move(c));
}

}  // namespace

SpectralFunction SpectralFunction::operator+(const SpectralFunction& o) const { return combine(*this, o, 1, 1); }
SpectralFunction SpectralFunction::operator-(const SpectralFunction& o) const { return combine(*this, o, 1, -1); }
SpectralFunction SpectralFunction::operator-() const { return *this * -1.0; }

SpectralFunction SpectralFunction::operator*(double s) const {
  std::vector<cplx> c(coeffs_);
  for (auto& x : c) x *= s;
  return from_coefficients(grid_, std::move(c));
}

SpectralFunction apply_multiplier(const SpectralFunction& u, const Multiplier& m) {
  const auto& g = u.grid();
  std::vector<cplx> c(u.coefficients());
  for (std::size_t q = 0; q < c.size(); ++q) {
    const cplx mk = m(g.wavenumber(q));
    if (!std::isfinite(mk.real()) || !std::isfinite(mk.imag()))
      throw InputError("multiplier is not finite at k = " + std::to_string(g.wavenumber(q)));
    c[q] *= mk;
  }
  // Mean and Nyquist slots of a real function are real.
  c[0] = c[0].real();
  c.back() = c.back().real();
  return SpectralFunction::from_coefficients(g, std::move(c));
}

double sobolev_norm(const SpectralFunction& u, double s) {
  const auto& g = u.grid();
  const auto& c = u.coefficients();
  double acc = 0.0;
  for (std::size_t q = 0; q < c.size(); ++q) {
    const double k = g.wavenumber(q);
    const double mult = (q == 0 || q + 1 == c.size()) ? 1.0 : 2.0;
    acc += mult * std::pow(1.0 + k * k, s) * std::norm(c[q]);
  }
  return std::sqrt(g.period() * acc);
}

double l2_norm(const SpectralFunction& u) { return sobolev_norm(u, 0.0); }

double linf_norm(const SpectralFunction& u) {
  double m = 0.0;
  for (double v : u.values()) m = std::max(m, std::abs(v));
  return m;
}

double inner_product(const SpectralFunction& u, const SpectralFunction& v) {
  require_same_grid(u, v);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc * u.grid().dx();
}

SpectralFunction lp_project(const SpectralFunction& u, int j) {
  const double unit = u.grid().k_unit();
  return apply_multiplier(u, [j, unit](double k) -> cplx {
    const double a = std::abs(k) / unit;
    if (j < 0) return a < 1.0 ? 1.0 : 0.0;
    const double lo = std::ldexp(1.0, j);
    return (a >= lo && a < 2.0 * lo) ? 1.0 : 0.0;
  });
}

int lp_max_block(const TorusGrid& g) {
  int j = 0;
  while (std::ldexp(1.0, j + 1) <= static_cast<double>(g.n() / 2)) ++j;
  return j;
}

SpectralFunction dealias(const SpectralFunction& u, double rule) {
  if (!(rule > 0.0 && rule <= 1.0)) throw InputError("dealias rule must lie in (0, 1]");
  const double cut = rule * u.grid().k_max() * (1.0 + 1e-12);
  return apply_multiplier(u, [cut](double k) -> cplx { return std::abs(k) > cut ? 0.0 : 1.0; });
}

SpectralFunction derivative(const SpectralFunction& u, int order) {
  const double nyq = u.grid().k_max();
  return apply_multiplier(u, [order, nyq](double k) -> cplx {
    if (std::abs(k) >= nyq) return 0.0;
    return std::pow(cplx(0.0, k), order);
  });
}

SpectralFunction abs_derivative(const SpectralFunction& u) {
  return apply_multiplier(u, [](double k) -> cplx { return std::abs(k); });
}

SpectralFunction pointwise_product(const SpectralFunction& u, const SpectralFunction& v) {
  require_same_grid(u, v);
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = u[i] * v[i];
  return SpectralFunction::from_values(u.grid(), std::move(w));
}

namespace {

// Samples of u on a grid refined by `factor`, using the symmetric (real)
// interpretation of the Nyquist slot.
std::vector<double> refined_values(const SpectralFunction& u, std::size_t factor) {
  const std::size_t n = u.size(), np = n * factor;
  std::vector<cplx> c(np / 2 + 1, cplx(0.0));
  const auto& src = u.coefficients();
  for (std::size_t q = 0; q + 1 < src.size(); ++q) c[q] = src[q];
  c[n / 2] = 0.5 * src.back();
  std::vector<double> v(np);
  fft::backward_rows(np, 1, c.data(), v.data());
  return v;
}

}  // namespace

SpectralFunction exact_product(const SpectralFunction& u, const SpectralFunction& v) {
  require_same_grid(u, v);
  const std::size_t n = u.size(), np = 2 * n;
  auto a = refined_values(u, 2);
  auto b = refined_values(v, 2);
  for (std::size_t i = 0; i < np; ++i) a[i] *= b[i];
  std::vector<cplx> c(np / 2 + 1);
  fft::forward_rows(np, 1, a.data(), c.data());
  std::vector<cplx> out(n / 2 + 1);
  const double inv = 1.0 / static_cast<double>(np);
  for (std::size_t q = 0; q < n / 2; ++q) out[q] = c[q] * inv;
  out[n / 2] = 2.0 * c[n / 2].real() * inv;
  return SpectralFunction::from_coefficients(u.grid(), std::move(out));
}

SpectralFunction product(const SpectralFunction& u, const SpectralFunction& v) {
  return dealias(exact_product(u, v));
}

SpectralFunction map_values(const SpectralFunction& u, const std::function<double(double)>& f) {
  std::vector<double> w(u.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = f(u[i]);
  return SpectralFunction::from_values(u.grid(), std::move(w));
}

void derivative_rows(const TorusGrid& g, std::size_t rows, const double* in, double* out) {
  const std::size_t n = g.n(), nh = g.n_half();
  std::vector<cplx> c(nh * rows);
  fft::forward_rows(n, rows, in, c.data());
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t r = 0; r < rows; ++r) {
    cplx* row = c.data() + r * nh;
    for (std::size_t q = 0; q + 1 < nh; ++q) row[q] *= cplx(0.0, g.wavenumber(q) * inv);
    row[nh - 1] = 0.0;
  }
  fft::backward_rows(n, rows, c.data(), out);
}

void write_spectrum_csv(std::ostream& os, const SpectralFunction& u) {
  const long half = static_cast<long>(u.size() / 2);
  os << "k,re,im\n";
  for (long m = -half; m < half; ++m) {
    const cplx c = u.coefficient(m);
    os << m << ',' << c.real() << ',' << c.imag() << '\n';
  }
}

}  // namespace muskat
