#include "qcdma/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>

namespace qcdma::fft {
namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. FFTW_UNALIGNED keeps results independent of buffer alignment,
// so identical inputs give bit-identical outputs on every thread.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(int n, int sign) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find({n, sign});
    if (it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    if (plan == nullptr) throw std::runtime_error("FFTW could not plan the transform");
    plans_.emplace(std::make_pair(n, sign), plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void run(const Eigen::VectorXcd& in, Eigen::VectorXcd& out, int sign) {
  const auto n = static_cast<int>(in.size());
  if (&in == &out) throw std::invalid_argument("fft input and output must differ");
  out.resize(n);
  if (n == 0) return;
  fftw_plan plan = cache().get(n, sign);
  // fftw_execute_dft does not write to the input of an out-of-place plan.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace

void forward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { run(in, out, FFTW_FORWARD); }

void backward(const Eigen::VectorXcd& in, Eigen::VectorXcd& out) { run(in, out, FFTW_BACKWARD); }

}  // namespace qcdma::fft
