#include "qict/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace qict::fft {
namespace {

// The FFTW planner is not reentrant; plan execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using Buffer = std::unique_ptr<T[], FftwFree>;

template <class T>
Buffer<T> allocate(std::size_t n) {
  return Buffer<T>(static_cast<T*>(fftw_malloc(sizeof(T) * std::max<std::size_t>(n, 1))));
}

} // namespace

std::vector<std::complex<double>> forward_real(std::span<const double> input) {
  const int n = static_cast<int>(input.size());
  if (n == 0) return {};
  auto in = allocate<double>(input.size());
  auto out = allocate<fftw_complex>(input.size() / 2 + 1);
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
  }
  std::copy(input.begin(), input.end(), in.get());
  fftw_execute(plan.get());
  std::vector<std::complex<double>> result(input.size() / 2 + 1);
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

std::vector<std::complex<double>> transform(std::span<const std::complex<double>> input, bool inverse) {
  const int n = static_cast<int>(input.size());
  if (n == 0) return {};
  auto in = allocate<fftw_complex>(input.size());
  auto out = allocate<fftw_complex>(input.size());
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(n, in.get(), out.get(), inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE));
  }
  for (std::size_t k = 0; k < input.size(); ++k) {
    in[k][0] = input[k].real();
    in[k][1] = input[k].imag();
  }
  fftw_execute(plan.get());
  std::vector<std::complex<double>> result(input.size());
  for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out[k][0], out[k][1]};
  return result;
}

} // namespace qict::fft
