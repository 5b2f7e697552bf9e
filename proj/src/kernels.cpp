#include "ococ/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ococ::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_sq_diff_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_backward_scalar(const double* act, const double* dy, double* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (act[i] > 0.0) dx[i] += dy[i];
  }
}

void max_update_scalar(double* acc, std::int32_t* arg, const double* v, std::int32_t idx,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] > acc[i]) {
      acc[i] = v[i];
      arg[i] = idx;
    }
  }
}

void adam_update_scalar(double* p, double* m, double* v, const double* g, std::size_t n, double lr,
                        double beta1, double beta2, double eps, double inv_bc1, double inv_bc2) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
    const double mhat = m[i] * inv_bc1;
    const double vhat = v[i] * inv_bc2;
    p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

constexpr KernelTable kScalar = {
    "scalar",        dot_scalar,        sum_sq_diff_scalar, axpy_scalar,
    relu_scalar,     relu_backward_scalar,
    max_update_scalar, adam_update_scalar,
};

std::atomic<const KernelTable*> g_active{nullptr};

const KernelTable* resolve() {
  if (const char* env = std::getenv("OCOC_KERNELS")) {
    const std::string want(env);
    if (want == "scalar") return &kScalar;
#if defined(OCOC_HAVE_AVX2)
    if (want == "avx2") {
      if (!avx2_supported()) throw std::runtime_error("OCOC_KERNELS=avx2 but CPU lacks AVX2");
      return &avx2_table();
    }
#endif
    if (!want.empty()) throw std::runtime_error("unknown OCOC_KERNELS value: " + want);
  }
#if defined(OCOC_HAVE_AVX2)
  if (avx2_supported()) return &avx2_table();
#endif
  return &kScalar;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

bool avx2_supported() {
#if defined(OCOC_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = resolve();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void force(std::string_view name) {
  if (name == "scalar") {
    g_active.store(&kScalar, std::memory_order_release);
    return;
  }
#if defined(OCOC_HAVE_AVX2)
  if (name == "avx2") {
    if (!avx2_supported()) throw std::runtime_error("CPU lacks AVX2");
    g_active.store(&avx2_table(), std::memory_order_release);
    return;
  }
#endif
  throw std::runtime_error("unknown kernel table: " + std::string(name));
}

}  // namespace ococ::kernels
