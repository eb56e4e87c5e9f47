#include "muskat/elliptic.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "muskat/fft.hpp"

namespace muskat {

StripOperator::StripOperator(const StraightenedMap& map)
    : grid_(map.grid), n_(map.n()), R_(map.rows()), z_(map.z_grid) {
  const std::size_t E = map.intervals() / 2, P = E * kQuadPoints;
  L_.resize(P);
  dL_.resize(P);
  wa11_.resize(P * n_);
  wa12_.resize(P * n_);
  wa22_.resize(P * n_);
  mean_a11_.assign(P, 0.0);
  mean_a22_.assign(P, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    const double za = z_[2 * e], zm = z_[2 * e + 1], zb = z_[2 * e + 2];
    for (std::size_t q = 0; q < kQuadPoints; ++q) {
      const std::size_t p = e * kQuadPoints + q;
      const double z = map.zq[p];
      const double da = (za - zm) * (za - zb), dm = (zm - za) * (zm - zb), db = (zb - za) * (zb - zm);
      L_[p] = {(z - zm) * (z - zb) / da, (z - za) * (z - zb) / dm, (z - za) * (z - zm) / db};
      dL_[p] = {((z - zm) + (z - zb)) / da, ((z - za) + (z - zb)) / dm, ((z - za) + (z - zm)) / db};
      const double w = map.wq[p];
      for (std::size_t i = 0; i < n_; ++i) {
        const double rz = map.rho_z_q[p * n_ + i], rx = map.rho_x_q[p * n_ + i];
        if (!(rz > 0.0)) throw GeometryError("non-positive d_z rho at a quadrature node", rz);
        wa11_[p * n_ + i] = w * rz;
        wa12_[p * n_ + i] = -w * rx;
        wa22_[p * n_ + i] = w * (1.0 + rx * rx) / rz;
        mean_a11_[p] += wa11_[p * n_ + i];
        mean_a22_[p] += wa22_[p * n_ + i];
      }
      mean_a11_[p] /= static_cast<double>(n_);
      mean_a22_[p] /= static_cast<double>(n_);
    }
  }
}

void StripOperator::apply(const double* u, double* out) const {
  thread_local std::vector<double> ux, X, dX;
  const std::size_t S = size();
  ux.resize(S);
  X.assign(S, 0.0);
  dX.resize(S);
  derivative_rows(grid_, R_, u, ux.data());
  std::fill(out, out + S, 0.0);
  const std::size_t E = (R_ - 1) / 2;
  for (std::size_t e = 0; e < E; ++e) {
    const std::size_t o0 = 2 * e * n_, o1 = o0 + n_, o2 = o1 + n_;
    for (std::size_t q = 0; q < kQuadPoints; ++q) {
      const std::size_t p = e * kQuadPoints + q;
      const auto& L = L_[p];
      const auto& dL = dL_[p];
      const double* a11 = &wa11_[p * n_];
      const double* a12 = &wa12_[p * n_];
      const double* a22 = &wa22_[p * n_];
      for (std::size_t i = 0; i < n_; ++i) {
        const double px = L[0] * ux[o0 + i] + L[1] * ux[o1 + i] + L[2] * ux[o2 + i];
        const double pz = dL[0] * u[o0 + i] + dL[1] * u[o1 + i] + dL[2] * u[o2 + i];
        const double qx = a11[i] * px + a12[i] * pz;
        const double qz = a12[i] * px + a22[i] * pz;
        X[o0 + i] += L[0] * qx;
        X[o1 + i] += L[1] * qx;
        X[o2 + i] += L[2] * qx;
        out[o0 + i] += dL[0] * qz;
        out[o1 + i] += dL[1] * qz;
        out[o2 + i] += dL[2] * qz;
      }
    }
  }
  // Integration by parts in x: D_x is skew on the grid.
  derivative_rows(grid_, R_, X.data(), dX.data());
  for (std::size_t s = 0; s < S; ++s) out[s] -= dX[s];
}

void BandedSPD::add(int i, int j, double v) {
  if (i > j) return;  // symmetric: upper triangle only
  if (j - i > kd_) throw InputError("entry outside the band");
  ab_[static_cast<std::size_t>(kd_ + i - j + j * ld_)] += v;
}

void BandedSPD::set_identity_row(int i) {
  for (int j = std::max(0, i - kd_); j <= std::min(n_ - 1, i + kd_); ++j) {
    const int r = std::min(i, j), c = std::max(i, j);
    ab_[static_cast<std::size_t>(kd_ + r - c + c * ld_)] = (i == j) ? 1.0 : 0.0;
  }
}

void BandedSPD::factor() {
  const lapack_int info = LAPACKE_dpbtrf(LAPACK_COL_MAJOR, 'U', n_, kd_, ab_.data(), ld_);
  if (info != 0)
    throw SolverError("band preconditioner not positive definite (info " + std::to_string(info) + ")", {});
  factored_ = true;
}

void BandedSPD::solve(double* b, int nrhs) const {
  LAPACKE_dpbtrs(LAPACK_COL_MAJOR, 'U', n_, kd_, nrhs, ab_.data(), ld_, b, n_);
}

CoupledSystem::CoupledSystem(std::vector<StripBlock> strips, Coupling coupling, bool pin_first_top_mean)
    : strips_(std::move(strips)), coupling_(std::move(coupling)), pin_(pin_first_top_mean) {
  if (strips_.empty() || strips_.size() > 2) throw InputError("coupled system takes one or two strips");
  n_ = strips_[0].op->n();
  nh_ = n_ / 2 + 1;
  total_ = 0;
  int band_rows = 0;
  for (const auto& s : strips_) {
    if (s.op->n() != n_) throw InputError("strips on different x grids");
    offsets_.push_back(total_);
    total_ += s.op->size();
    band_rows += static_cast<int>(s.op->rows());
  }
  const auto& grid = strips_[0].op->grid();
  const std::size_t S = strips_.size();
  auto band = [&](std::size_t s, std::size_t j) -> int {
    if (s == 0) return static_cast<int>(j);
    const std::size_t R1 = strips_[1].op->rows();
    return static_cast<int>(strips_[0].op->rows() + (R1 - 1 - j));
  };
  factors_.reserve(nh_);
  for (std::size_t q = 0; q < nh_; ++q) {
    const double k = grid.wavenumber(q);
    // D_x drops the Nyquist mode, so that block carries no x-stiffness.
    const bool nyquist = q + 1 == nh_;
    const double k_eff = nyquist ? 0.0 : std::abs(k);
    BandedSPD m(band_rows, 2);
    for (std::size_t s = 0; s < S; ++s) {
      const double sc = strips_[s].scale;
      strips_[s].op->assemble_flat(k_eff, [&](std::size_t i, std::size_t j, double v) {
        const int bi = band(s, i), bj = band(s, j);
        if (bi <= bj) m.add(bi, bj, sc * v);
      });
    }
    if (coupling_) {
      const auto T = coupling_(k);
      for (std::size_t s = 0; s < S; ++s)
        for (std::size_t r = 0; r < S; ++r) {
          if (strips_[s].fixed_top || strips_[r].fixed_top) continue;
          const int bs = band(s, strips_[s].op->rows() - 1), br = band(r, strips_[r].op->rows() - 1);
          if (bs <= br) m.add(bs, br, T[s * S + r]);
        }
    }
    for (std::size_t s = 0; s < S; ++s)
      if (strips_[s].fixed_top) m.set_identity_row(band(s, strips_[s].op->rows() - 1));
    if (pin_ && (q == 0 || nyquist)) m.set_identity_row(band(0, strips_[0].op->rows() - 1));
    m.factor();
    factors_.push_back(std::move(m));
  }
  band_index_.resize(band_rows);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t j = 0; j < strips_[s].op->rows(); ++j)
      band_index_[band(s, j)] = static_cast<int>(offsets_[s] / n_ + j);
}

void CoupledSystem::apply(const Vec& x, Vec& y) const {
  y.assign(total_, 0.0);
  thread_local Vec tmp;
  for (std::size_t s = 0; s < strips_.size(); ++s) {
    const auto& st = strips_[s];
    tmp.resize(st.op->size());
    st.op->apply(x.data() + offsets_[s], tmp.data());
    for (std::size_t i = 0; i < tmp.size(); ++i) y[offsets_[s] + i] += st.scale * tmp[i];
  }
  if (!coupling_) return;
  const std::size_t S = strips_.size();
  const auto& grid = strips_[0].op->grid();
  std::vector<cplx> tops(S * nh_), outs(S * nh_, cplx(0.0));
  for (std::size_t s = 0; s < S; ++s)
    if (!strips_[s].fixed_top) fft::forward_rows(n_, 1, x.data() + top_offset(s), tops.data() + s * nh_);
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t q = 0; q < nh_; ++q) {
    const auto T = coupling_(grid.wavenumber(q));
    for (std::size_t s = 0; s < S; ++s)
      for (std::size_t r = 0; r < S; ++r) outs[s * nh_ + q] += T[s * S + r] * tops[r * nh_ + q] * inv;
  }
  std::vector<double> row(n_);
  for (std::size_t s = 0; s < S; ++s) {
    if (strips_[s].fixed_top) continue;
    fft::backward_rows(n_, 1, outs.data() + s * nh_, row.data());
    for (std::size_t i = 0; i < n_; ++i) y[top_offset(s) + i] += row[i];
  }
}

void CoupledSystem::project(Vec& x) const {
  for (std::size_t s = 0; s < strips_.size(); ++s)
    if (strips_[s].fixed_top) std::fill_n(x.begin() + static_cast<long>(top_offset(s)), n_, 0.0);
  if (pin_) {
    const auto it = x.begin() + static_cast<long>(top_offset(0));
    double m = 0.0, alt = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      m += it[static_cast<long>(i)];
      alt += (i % 2 ? -1.0 : 1.0) * it[static_cast<long>(i)];
    }
    m /= static_cast<double>(n_);
    alt /= static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) it[static_cast<long>(i)] -= m + (i % 2 ? -alt : alt);
  }
}

void CoupledSystem::precondition(const Vec& r, Vec& z) const {
  const std::size_t rows_total = total_ / n_;
  thread_local std::vector<cplx> hat;
  thread_local std::vector<double> rhs;
  hat.resize(rows_total * nh_);
  fft::forward_rows(n_, rows_total, r.data(), hat.data());
  const int nb = static_cast<int>(band_index_.size());
  rhs.resize(2 * static_cast<std::size_t>(nb));
  const double inv = 1.0 / static_cast<double>(n_);
  for (std::size_t q = 0; q < nh_; ++q) {
    for (int b = 0; b < nb; ++b) {
      const cplx v = hat[static_cast<std::size_t>(band_index_[b]) * nh_ + q] * inv;
      rhs[b] = v.real();
      rhs[nb + b] = v.imag();
    }
    factors_[q].solve(rhs.data(), 2);
    for (int b = 0; b < nb; ++b) hat[static_cast<std::size_t>(band_index_[b]) * nh_ + q] = cplx(rhs[b], rhs[nb + b]);
  }
  z.resize(total_);
  fft::backward_rows(n_, rows_total, hat.data(), z.data());
}

KrylovResult CoupledSystem::solve(const Vec& b, Vec& x, double tol, int max_iter) const {
  return pcg([this](const Vec& in, Vec& out) { apply(in, out); },
             [this](const Vec& in, Vec& out) { precondition(in, out); },
             [this](Vec& v) { project(v); }, b, x, tol, max_iter);
}

}  // namespace muskat
