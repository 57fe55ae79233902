#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace envkp {

/// Unnormalized multidimensional complex DFT on row-major (last index fastest) arrays.
/// forward: X_j = sum_s x_s exp(-2 pi i j.s / n); inverse uses the + sign.
/// Planning is serialized internally; execution is safe from several threads.
class FftPlan {
 public:
  explicit FftPlan(std::vector<int> dims);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  const std::vector<int>& dims() const { return dims_; }
  long size() const { return size_; }

  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  void inverse(const std::complex<double>* in, std::complex<double>* out) const;

 private:
  std::vector<int> dims_;
  long size_ = 1;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// Shared plan cache keyed by dimensions.
std::shared_ptr<const FftPlan> fft_plan(const std::vector<int>& dims);

}  // namespace envkp
