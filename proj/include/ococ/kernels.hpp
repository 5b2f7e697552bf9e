#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace ococ::kernels {

// Data-parallel primitives behind the training/inference inner loops.
// The scalar table is the reference implementation; wider variants must agree
// with it (see tests/test_kernels.cpp for the equivalence harness).
struct KernelTable {
  const char* name;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i (a[i] - b[i])^2
  double (*sum_sq_diff)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y[i] = max(x[i], 0)
  void (*relu)(const double* x, double* y, std::size_t n);
  // dx[i] += dy[i] where act[i] > 0
  void (*relu_backward)(const double* act, const double* dy, double* dx, std::size_t n);
  // acc[i] = v[i], arg[i] = idx where v[i] > acc[i]; strict '>' keeps the
  // earliest index on ties, which fixes backward routing.
  void (*max_update)(double* acc, std::int32_t* arg, const double* v, std::int32_t idx,
                     std::size_t n);
  // Bias-corrected Adam element update. inv_bc1/inv_bc2 = 1/(1-beta^t).
  void (*adam_update)(double* p, double* m, double* v, const double* g, std::size_t n, double lr,
                      double beta1, double beta2, double eps, double inv_bc1, double inv_bc2);
};

const KernelTable& scalar_table();

#if defined(OCOC_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
bool avx2_supported();

// Active table, resolved once: AVX2 when the CPU has it, overridable with
// OCOC_KERNELS=scalar|avx2 (or force() below).
const KernelTable& active();
void force(std::string_view name);

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}
inline double sum_sq_diff(const double* a, const double* b, std::size_t n) {
  return active().sum_sq_diff(a, b, n);
}
inline void axpy(double alpha, const double* x, double* y, std::size_t n) {
  active().axpy(alpha, x, y, n);
}
inline void relu(const double* x, double* y, std::size_t n) { active().relu(x, y, n); }
inline void relu_backward(const double* act, const double* dy, double* dx, std::size_t n) {
  active().relu_backward(act, dy, dx, n);
}
inline void max_update(double* acc, std::int32_t* arg, const double* v, std::int32_t idx,
                       std::size_t n) {
  active().max_update(acc, arg, v, idx, n);
}
inline void adam_update(double* p, double* m, double* v, const double* g, std::size_t n, double lr,
                        double beta1, double beta2, double eps, double inv_bc1, double inv_bc2) {
  active().adam_update(p, m, v, g, n, lr, beta1, beta2, eps, inv_bc1, inv_bc2);
}

}  // namespace ococ::kernels
