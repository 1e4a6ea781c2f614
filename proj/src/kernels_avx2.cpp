// AVX2+FMA variants of the cost-matrix kernels. This translation unit is
// compiled with -mavx2 -mfma; nothing here may run unless the dispatcher
// verified CPU support first.

#include "motkit/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>

namespace mot::kernels::avx2 {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* v = rows + i * dim;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 16 <= dim; j += 16) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(query + j),
                             _mm256_loadu_pd(v + j), acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(query + j + 4),
                             _mm256_loadu_pd(v + j + 4), acc1);
      acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(query + j + 8),
                             _mm256_loadu_pd(v + j + 8), acc2);
      acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(query + j + 12),
                             _mm256_loadu_pd(v + j + 12), acc3);
    }
    for (; j + 4 <= dim; j += 4) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(query + j),
                             _mm256_loadu_pd(v + j), acc0);
    }
    __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                _mm256_add_pd(acc2, acc3));
    double sum = hsum(acc);
    for (; j < dim; ++j) {
      sum += query[j] * v[j];
    }
    out[i] = sum;
  }
}

void iou_distance_rows(double qx1, double qy1, double qx2, double qy2,
                       const double* x1, const double* y1, const double* x2,
                       const double* y2, std::size_t count, double* out) {
  const double qarea_s = (qx2 - qx1) * (qy2 - qy1);
  const __m256d vqx1 = _mm256_set1_pd(qx1);
  const __m256d vqy1 = _mm256_set1_pd(qy1);
  const __m256d vqx2 = _mm256_set1_pd(qx2);
  const __m256d vqy2 = _mm256_set1_pd(qy2);
  const __m256d vqarea = _mm256_set1_pd(qarea_s);
  const __m256d vzero = _mm256_setzero_pd();
  const __m256d vone = _mm256_set1_pd(1.0);

  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d bx1 = _mm256_loadu_pd(x1 + i);
    const __m256d by1 = _mm256_loadu_pd(y1 + i);
    const __m256d bx2 = _mm256_loadu_pd(x2 + i);
    const __m256d by2 = _mm256_loadu_pd(y2 + i);

    const __m256d ix1 = _mm256_max_pd(vqx1, bx1);
    const __m256d iy1 = _mm256_max_pd(vqy1, by1);
    const __m256d ix2 = _mm256_min_pd(vqx2, bx2);
    const __m256d iy2 = _mm256_min_pd(vqy2, by2);

    const __m256d iw = _mm256_max_pd(vzero, _mm256_sub_pd(ix2, ix1));
    const __m256d ih = _mm256_max_pd(vzero, _mm256_sub_pd(iy2, iy1));
    const __m256d inter = _mm256_mul_pd(iw, ih);

    const __m256d area = _mm256_mul_pd(_mm256_sub_pd(bx2, bx1),
                                       _mm256_sub_pd(by2, by1));
    const __m256d uni =
        _mm256_sub_pd(_mm256_add_pd(vqarea, area), inter);
    const __m256d dist = _mm256_sub_pd(vone, _mm256_div_pd(inter, uni));
    _mm256_storeu_pd(out + i, dist);
  }
  for (; i < count; ++i) {
    const double ix1 = std::max(qx1, x1[i]);
    const double iy1 = std::max(qy1, y1[i]);
    const double ix2 = std::min(qx2, x2[i]);
    const double iy2 = std::min(qy2, y2[i]);
    const double iw = std::max(0.0, ix2 - ix1);
    const double ih = std::max(0.0, iy2 - iy1);
    const double inter = iw * ih;
    const double area = (x2[i] - x1[i]) * (y2[i] - y1[i]);
    const double uni = qarea_s + area - inter;
    out[i] = 1.0 - inter / uni;
  }
}

void weighted_sum(double wa, const double* a, double wb, const double* b,
                  std::size_t count, double* out) {
  const __m256d vwa = _mm256_set1_pd(wa);
  const __m256d vwb = _mm256_set1_pd(wb);
  std::size_t i = 0;
  for (; i + 4 <= count; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    _mm256_storeu_pd(out + i,
                     _mm256_fmadd_pd(vwa, va, _mm256_mul_pd(vwb, vb)));
  }
  for (; i < count; ++i) {
    out[i] = wa * a[i] + wb * b[i];
  }
}

}  // namespace mot::kernels::avx2

#endif  // __AVX2__ && __FMA__
