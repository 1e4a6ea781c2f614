#include <stdexcept>

#include "motkit/kernels.hpp"

namespace mot::kernels {

#ifdef MOTKIT_HAVE_AVX2
namespace avx2 {
void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out);
void iou_distance_rows(double qx1, double qy1, double qx2, double qy2,
                       const double* x1, const double* y1, const double* x2,
                       const double* y2, std::size_t count, double* out);
void weighted_sum(double wa, const double* a, double wb, const double* b,
                  std::size_t count, double* out);
}  // namespace avx2
#endif

namespace {

bool detect_avx2() {
#ifdef MOTKIT_HAVE_AVX2
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend& current() {
  static Backend backend =
      detect_avx2() ? Backend::Avx2 : Backend::Scalar;
  return backend;
}

}  // namespace

bool avx2_available() {
  static const bool available = detect_avx2();
  return available;
}

Backend active_backend() { return current(); }

const char* backend_name(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
  }
  return "unknown";
}

void force_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_available()) {
    throw std::runtime_error("kernels: avx2 backend unavailable on this CPU");
  }
  current() = b;
}

void reset_backend() {
  current() = detect_avx2() ? Backend::Avx2 : Backend::Scalar;
}

void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) {
#ifdef MOTKIT_HAVE_AVX2
  if (current() == Backend::Avx2) {
    avx2::dot_rows(query, rows, count, dim, out);
    return;
  }
#endif
  scalar::dot_rows(query, rows, count, dim, out);
}

void iou_distance_rows(double qx1, double qy1, double qx2, double qy2,
                       const double* x1, const double* y1, const double* x2,
                       const double* y2, std::size_t count, double* out) {
#ifdef MOTKIT_HAVE_AVX2
  if (current() == Backend::Avx2) {
    avx2::iou_distance_rows(qx1, qy1, qx2, qy2, x1, y1, x2, y2, count, out);
    return;
  }
#endif
  scalar::iou_distance_rows(qx1, qy1, qx2, qy2, x1, y1, x2, y2, count, out);
}

void weighted_sum(double wa, const double* a, double wb, const double* b,
                  std::size_t count, double* out) {
#ifdef MOTKIT_HAVE_AVX2
  if (current() == Backend::Avx2) {
    avx2::weighted_sum(wa, a, wb, b, count, out);
    return;
  }
#endif
  scalar::weighted_sum(wa, a, wb, b, count, out);
}

}  // namespace mot::kernels
