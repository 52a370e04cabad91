#include <arm_neon.h>

#include "loadscope/kernels.hpp"

namespace loadscope::kernels::neon {

// Two float64x2 accumulators hold lanes {0,1} and {2,3}; reduced as
// (0+2)+(1+3) to match the scalar reference.

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vfmaq_f64(lo, vld1q_f64(a + i), vld1q_f64(b + i));
    hi = vfmaq_f64(hi, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double total = vaddvq_f64(vaddq_f64(lo, hi));
  for (; i < n; ++i) total += a[i] * b[i];
  return total;
}

double squared_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    lo = vfmaq_f64(lo, d0, d0);
    hi = vfmaq_f64(hi, d1, d1);
  }
  double total = vaddvq_f64(vaddq_f64(lo, hi));
  for (; i < n; ++i) {
    double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum(const double* a, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    lo = vaddq_f64(lo, vld1q_f64(a + i));
    hi = vaddq_f64(hi, vld1q_f64(a + i + 2));
  }
  double total = vaddvq_f64(vaddq_f64(lo, hi));
  for (; i < n; ++i) total += a[i];
  return total;
}

}  // namespace loadscope::kernels::neon
