#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <new>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace oulab::fft {

namespace {

class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(const std::vector<int>& dims, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(dims, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    const std::size_t total = std::accumulate(dims.begin(), dims.end(),
                                              std::size_t{1}, std::multiplies<>());
    auto* scratch = fftw_alloc_complex(total);
    fftw_plan plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(),
                                   scratch, scratch, sign,
                                   FFTW_ESTIMATE);
    fftw_free(scratch);
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    plans_.emplace(std::move(key), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<std::vector<int>, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

// Plans may use SIMD codelets that need FFTW's alignment. Misaligned data
// goes through an aligned scratch copy so that the same plan, and hence the
// same rounding, is used regardless of where the caller's buffer lives.
class Scratch {
 public:
  ~Scratch() { fftw_free(data_); }

  fftw_complex* get(std::size_t n) {
    if (n > size_) {
      fftw_free(data_);
      data_ = fftw_alloc_complex(n);
      if (data_ == nullptr) throw std::bad_alloc();
      size_ = n;
    }
    return data_;
  }

 private:
  fftw_complex* data_ = nullptr;
  std::size_t size_ = 0;
};

void run(void* plan, std::span<Complex> data) {
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  auto* p = static_cast<fftw_plan>(plan);
  if (fftw_alignment_of(reinterpret_cast<double*>(ptr)) == 0) {
    fftw_execute_dft(p, ptr, ptr);
    return;
  }
  thread_local Scratch scratch;
  fftw_complex* buf = scratch.get(data.size());
  std::copy(data.begin(), data.end(), reinterpret_cast<Complex*>(buf));
  fftw_execute_dft(p, buf, buf);
  std::copy_n(reinterpret_cast<Complex*>(buf), data.size(), data.begin());
}

void execute(std::span<Complex> data, const std::vector<int>& dims, int sign) {
  run(cache().get(dims, sign), data);
}

}  // namespace

void forward(std::span<Complex> data, const std::vector<int>& dims) {
  execute(data, dims, FFTW_FORWARD);
}

void backward(std::span<Complex> data, const std::vector<int>& dims) {
  execute(data, dims, FFTW_BACKWARD);
}

Plan::Plan(const std::vector<int>& dims)
    : forward_(cache().get(dims, FFTW_FORWARD)), backward_(cache().get(dims, FFTW_BACKWARD)) {}

void Plan::forward(std::span<Complex> data) const { run(forward_, data); }

void Plan::backward(std::span<Complex> data) const { run(backward_, data); }

}  // namespace oulab::fft
