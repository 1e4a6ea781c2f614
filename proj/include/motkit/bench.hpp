#pragma once

#include <cstdint>
#include <vector>

#include "motkit/tracker.hpp"

namespace mot {

/// Per-frame stage timings at one synthetic track count, aggregated over
/// repeated runs (median and p95 across runs of the per-frame means).
struct BenchPoint {
  int tracks = 0;
  int dim = 0;
  std::int64_t frames = 0;
  int repeats = 0;
  double predict_ms = 0.0;  // median per-frame ms
  double matrix_ms = 0.0;
  double solve_ms = 0.0;
  double update_ms = 0.0;
  double step_ms = 0.0;      // median per-frame total
  double step_p95_ms = 0.0;  // p95 per-frame total across runs
};

/// Times the tracking stages on a fully visible synthetic scene with
/// `tracks` objects and `dim`-dimensional embeddings. Each repeat runs a
/// fresh tracker over the same scene.
BenchPoint bench_tracking(int tracks, int dim, std::int64_t frames,
                          int repeats, std::uint64_t seed);

std::vector<BenchPoint> bench_sweep(const std::vector<int>& track_counts,
                                    int dim, std::int64_t frames, int repeats,
                                    std::uint64_t seed);

}  // namespace mot
