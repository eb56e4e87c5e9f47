#include "muskat/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace muskat::fft {

namespace {

enum class Kind { R2C, C2R, C2C_FWD, C2C_BWD };

using Key = std::tuple<Kind, std::size_t, std::size_t>;

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(Kind kind, std::size_t n, std::size_t rows) {
    std::lock_guard<std::mutex> lock(mutex_);
    const Key key{kind, n, rows};
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;

    const int len = static_cast<int>(n);
    const int howmany = static_cast<int>(rows);
    const int nh = len / 2 + 1;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    switch (kind) {
      case Kind::R2C: {
        std::vector<double> in(n * rows);
        std::vector<fftw_complex> out(static_cast<std::size_t>(nh) * rows);
        plan = fftw_plan_many_dft_r2c(1, &len, howmany, in.data(), nullptr, 1, len,
                                      out.data(), nullptr, 1, nh, flags);
        break;
      }
      case Kind::C2R: {
        std::vector<fftw_complex> in(static_cast<std::size_t>(nh) * rows);
        std::vector<double> out(n * rows);
        plan = fftw_plan_many_dft_c2r(1, &len, howmany, in.data(), nullptr, 1, nh,
                                      out.data(), nullptr, 1, len, flags);
        break;
      }
      case Kind::C2C_FWD:
      case Kind::C2C_BWD: {
        std::vector<fftw_complex> in(n), out(n);
        plan = fftw_plan_dft_1d(len, in.data(), out.data(),
                                kind == Kind::C2C_FWD ? FFTW_FORWARD : FFTW_BACKWARD, flags);
        break;
      }
    }
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<Key, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void forward_rows(std::size_t n, std::size_t rows, const double* in, cplx* out) {
  fftw_plan plan = cache().get(Kind::R2C, n, rows);
  // r2c never writes its input.
  fftw_execute_dft_r2c(plan, const_cast<double*>(in), as_fftw(out));
}

void backward_rows(std::size_t n, std::size_t rows, const cplx* in, double* out) {
  fftw_plan plan = cache().get(Kind::C2R, n, rows);
  // c2r destroys its input, so work on a copy.
  thread_local std::vector<cplx> scratch;
  scratch.assign(in, in + (n / 2 + 1) * rows);
  fftw_execute_dft_c2r(plan, as_fftw(scratch.data()), out);
}

void forward(std::size_t n, const cplx* in, cplx* out) {
  fftw_plan plan = cache().get(Kind::C2C_FWD, n, 1);
  fftw_execute_dft(plan, as_fftw(const_cast<cplx*>(in)), as_fftw(out));
}

void backward(std::size_t n, const cplx* in, cplx* out) {
  fftw_plan plan = cache().get(Kind::C2C_BWD, n, 1);
  fftw_execute_dft(plan, as_fftw(const_cast<cplx*>(in)), as_fftw(out));
}

}  // namespace muskat::fft
