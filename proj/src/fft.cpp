#include "envkp/fft.hpp"

#include "envkp/error.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace envkp {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) raise(ErrorKind::InvalidArgument, "FFT needs at least one dimension");
  for (int n : dims_) {
    if (n < 1) raise(ErrorKind::InvalidArgument, "FFT dimension must be positive");
    size_ *= n;
  }
  std::vector<fftw_complex> a(size_), b(size_);
  std::lock_guard<std::mutex> lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), a.data(), b.data(),
                                FFTW_FORWARD, flags);
  inverse_plan_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), a.data(), b.data(),
                                FFTW_BACKWARD, flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) raise(ErrorKind::InvalidArgument, "FFTW planning failed");
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void FftPlan::forward(const std::complex<double>* in, std::complex<double>* out) const {
  // FFTW never writes to the input of an out-of-place complex transform.
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void FftPlan::inverse(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

std::shared_ptr<const FftPlan> fft_plan(const std::vector<int>& dims) {
  // The planner mutex must outlive the cached plans, so construct it first.
  planner_mutex();
  static std::mutex cache_mutex;
  static std::map<std::vector<int>, std::shared_ptr<const FftPlan>> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto it = cache.find(dims);
  if (it != cache.end()) return it->second;
  auto plan = std::make_shared<const FftPlan>(dims);
  cache.emplace(dims, plan);
  return plan;
}

}  // namespace envkp
