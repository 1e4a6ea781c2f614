#pragma once

#include <cstddef>

// Data-parallel inner loops of cost-matrix construction: batched dot
// products over embedding vectors and batched IoU distances over boxes in
// SoA layout. A scalar reference implementation always exists; an AVX2
// variant is selected at runtime when the CPU supports it. Both paths are
// equivalence-tested against each other.

namespace mot::kernels {

enum class Backend { Scalar, Avx2 };

/// Reference kernels. Always available; also serve as the oracle the SIMD
/// variants are tested against.
namespace scalar {

void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out);

void iou_distance_rows(double qx1, double qy1, double qx2, double qy2,
                       const double* x1, const double* y1, const double* x2,
                       const double* y2, std::size_t count, double* out);

void weighted_sum(double wa, const double* a, double wb, const double* b,
                  std::size_t count, double* out);

}  // namespace scalar

/// True when the AVX2 variant was compiled in and this CPU supports
/// AVX2+FMA.
bool avx2_available();

Backend active_backend();
const char* backend_name(Backend b);

/// Pin dispatch to one backend (tests, benchmarks). Throws
/// std::runtime_error if the backend is unavailable on this machine.
void force_backend(Backend b);
void reset_backend();

/// out[i] = dot(query, rows + i*dim), rows row-major count x dim.
void dot_rows(const double* query, const double* rows, std::size_t count,
              std::size_t dim, double* out);

/// out[i] = 1 - iou(query box, candidate box i), candidates in SoA arrays.
void iou_distance_rows(double qx1, double qy1, double qx2, double qy2,
                       const double* x1, const double* y1, const double* x2,
                       const double* y2, std::size_t count, double* out);

/// out[i] = wa*a[i] + wb*b[i].
void weighted_sum(double wa, const double* a, double wb, const double* b,
                  std::size_t count, double* out);

}  // namespace mot::kernels
