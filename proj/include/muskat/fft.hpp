#pragma once

#include <complex>
#include <cstddef>

/// Thin FFTW front end. Plans are created once per (size, batch) under a
/// mutex and executed through the new-array interface, which is thread-safe.
/// All transforms are unnormalized, FFTW sign conventions.
namespace muskat::fft {

using cplx = std::complex<double>;

/// `rows` contiguous real rows of length n -> rows of n/2+1 half-spectra.
void forward_rows(std::size_t n, std::size_t rows, const double* in, cplx* out);

/// Inverse of forward_rows up to a factor n. `in` is left untouched.
void backward_rows(std::size_t n, std::size_t rows, const cplx* in, double* out);

/// Full complex transforms of a single length-n vector.
void forward(std::size_t n, const cplx* in, cplx* out);
void backward(std::size_t n, const cplx* in, cplx* out);

}  // namespace muskat::fft
