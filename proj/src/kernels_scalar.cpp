#include <algorithm>

#include "motkit/kernels.hpp"

namespace mot::kernels::scalar {

void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    const double* v = rows + i * dim;
    double sum = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      sum += query[j] * v[j];
    }
    out[i] = sum;
  }
}

void iou_distance_rows(double qx1, double qy1, double qx2, double qy2,
                       const double* x1, const double* y1, const double* x2,
                       const double* y2, std::size_t count, double* out) {
  const double qarea = (qx2 - qx1) * (qy2 - qy1);
  for (std::size_t i = 0; i < count; ++i) {
    const double ix1 = std::max(qx1, x1[i]);
    const double iy1 = std::max(qy1, y1[i]);
    const double ix2 = std::min(qx2, x2[i]);
    const double iy2 = std::min(qy2, y2[i]);
    const double iw = std::max(0.0, ix2 - ix1);
    const double ih = std::max(0.0, iy2 - iy1);
    const double inter = iw * ih;
    const double area = (x2[i] - x1[i]) * (y2[i] - y1[i]);
    const double uni = qarea + area - inter;
    out[i] = 1.0 - inter / uni;
  }
}

void weighted_sum(double wa, const double* a, double wb, const double* b,
                  std::size_t count, double* out) {
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = wa * a[i] + wb * b[i];
  }
}

}  // namespace mot::kernels::scalar
