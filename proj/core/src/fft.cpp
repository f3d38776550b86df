#include "gridhop/fft.hpp"

#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>

#include <fftw3.h>

namespace gridhop {

namespace {

// FFTW planning is not thread-safe; executing a plan on fresh buffers is.
// Plans are created once per length with FFTW_ESTIMATE (deterministic, no
// measurement noise in the transforms) and kept for the process lifetime.
class PlanCache {
 public:
  static fftw_plan get(int n) {
    static PlanCache cache;
    std::lock_guard<std::mutex> lock(cache.mu_);
    auto it = cache.plans_.find(n);
    if (it != cache.plans_.end()) return it->second;
    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(n));
    if (!buf) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_1d(n, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fft: planning failed");
    cache.plans_.emplace(n, p);
    return p;
  }

 private:
  PlanCache() = default;
  ~PlanCache() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mu_;
  std::map<int, fftw_plan> plans_;
};

class PlanCache2D {
 public:
  static fftw_plan get(int rows, int cols) {
    static PlanCache2D cache;
    std::lock_guard<std::mutex> lock(cache.mu_);
    auto key = std::make_pair(rows, cols);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    size_t n = static_cast<size_t>(rows) * static_cast<size_t>(cols);
    fftw_complex* buf = fftw_alloc_complex(n);
    if (!buf) throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_2d(rows, cols, buf, buf, FFTW_FORWARD,
                                   FFTW_ESTIMATE);
    fftw_free(buf);
    if (!p) throw std::runtime_error("fft: planning failed");
    cache.plans_.emplace(key, p);
    return p;
  }

 private:
  PlanCache2D() = default;
  ~PlanCache2D() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

// Rows transformed in one strided plan whose output lands transposed:
// out[i * rows + m] = row m's bin i, so one bin's slow-time run is
// contiguous. Keyed by (length, row count).
class PlanCacheMany {
 public:
  static fftw_plan get(int n, int rows) {
    static PlanCacheMany cache;
    std::lock_guard<std::mutex> lock(cache.mu_);
    auto key = std::make_pair(n, rows);
    auto it = cache.plans_.find(key);
    if (it != cache.plans_.end()) return it->second;
    size_t total = static_cast<size_t>(n) * static_cast<size_t>(rows);
    fftw_complex* a = fftw_alloc_complex(total);
    fftw_complex* b = fftw_alloc_complex(total);
    if (!a || !b) {
      fftw_free(a);
      fftw_free(b);
      throw std::bad_alloc();
    }
    fftw_plan p = fftw_plan_many_dft(1, &n, rows, a, nullptr, 1, n, b, nullptr,
                                     rows, 1, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_free(a);
    fftw_free(b);
    if (!p) throw std::runtime_error("fft: planning failed");
    cache.plans_.emplace(key, p);
    return p;
  }

 private:
  PlanCacheMany() = default;
  ~PlanCacheMany() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }
  std::mutex mu_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

// Per-thread scratch that only grows; repeated transforms reuse the same
// pages instead of paying a 1 MB mmap round trip per call.
fftw_complex* scratch_slot(size_t n, int slot) {
  struct Buf {
    size_t cap = 0;
    fftw_complex* p = nullptr;
    ~Buf() {
      if (p) fftw_free(p);
    }
  };
  static thread_local Buf bufs[2];
  Buf& buf = bufs[slot];
  if (buf.cap < n) {
    if (buf.p) fftw_free(buf.p);
    buf.p = fftw_alloc_complex(n);
    if (!buf.p) throw std::bad_alloc();
    buf.cap = n;
  }
  return buf.p;
}

fftw_complex* scratch_for(size_t n) { return scratch_slot(n, 0); }

}  // namespace

CMat fft_rows(const CMat& in, int n_out) {
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  if (n_out < cols) throw std::invalid_argument("fft: output shorter than input");
  fftw_plan plan = PlanCache::get(n_out);
  fftw_complex* buf = scratch_for(static_cast<size_t>(n_out));
  CMat out(rows, n_out);
  for (int m = 0; m < rows; ++m) {
    std::memcpy(buf, in.row(m).data(), sizeof(cplx) * static_cast<size_t>(cols));
    std::memset(buf + cols, 0, sizeof(cplx) * static_cast<size_t>(n_out - cols));
    fftw_execute_dft(plan, buf, buf);
    std::memcpy(out.row(m).data(), buf, sizeof(cplx) * static_cast<size_t>(n_out));
  }
  return out;
}

CMat fft_cols(const CMat& in, int n_out) {
  CMat t = fft_rows(in.transpose(), n_out);
  return t.transpose();
}

void fft_rows_split(const CMat& in, int n_out, Eigen::MatrixXd& re,
                    Eigen::MatrixXd& im) {
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  if (n_out < cols) throw std::invalid_argument("fft: output shorter than input");
  fftw_plan plan = PlanCacheMany::get(n_out, rows);
  const size_t total = static_cast<size_t>(n_out) * static_cast<size_t>(rows);
  fftw_complex* src = scratch_slot(total, 0);
  fftw_complex* dst = scratch_slot(total, 1);
  for (int m = 0; m < rows; ++m) {
    std::memcpy(src + static_cast<size_t>(m) * n_out, in.row(m).data(),
                sizeof(cplx) * static_cast<size_t>(cols));
    std::memset(src + static_cast<size_t>(m) * n_out + cols, 0,
                sizeof(cplx) * static_cast<size_t>(n_out - cols));
  }
  fftw_execute_dft(plan, src, dst);
  re.resize(rows, n_out);
  im.resize(rows, n_out);
  double* rp = re.data();
  double* ip = im.data();
  const double* dp = &dst[0][0];
  // dst holds bin-contiguous runs; planes are column-major, so this is a
  // straight de-interleave
  for (size_t t = 0; t < total; ++t) {
    rp[t] = dp[2 * t];
    ip[t] = dp[2 * t + 1];
  }
}

CMat fft_2d(const CMat& in, int n_rows_out, int n_cols_out) {
  const int rows = static_cast<int>(in.rows());
  const int cols = static_cast<int>(in.cols());
  if (n_rows_out < rows || n_cols_out < cols)
    throw std::invalid_argument("fft: output shorter than input");
  fftw_plan plan = PlanCache2D::get(n_rows_out, n_cols_out);
  const size_t n = static_cast<size_t>(n_rows_out) * n_cols_out;
  fftw_complex* buf = scratch_for(n);
  std::memset(buf, 0, sizeof(cplx) * n);
  for (int m = 0; m < rows; ++m)
    std::memcpy(buf + static_cast<size_t>(m) * n_cols_out, in.row(m).data(),
                sizeof(cplx) * static_cast<size_t>(cols));
  fftw_execute_dft(plan, buf, buf);
  CMat out(n_rows_out, n_cols_out);
  std::memcpy(out.data(), buf, sizeof(cplx) * n);
  return out;
}

}  // namespace gridhop
