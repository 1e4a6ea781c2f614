#include "motkit/bench.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "motkit/sim.hpp"

namespace mot {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double percentile95(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
  return v[std::min(idx, v.size() - 1)];
}

}  // namespace

BenchPoint bench_tracking(int tracks, int dim, std::int64_t frames,
                          int repeats, std::uint64_t seed) {
  if (tracks < 1 || dim < 1 || frames < 1 || repeats < 1) {
    throw std::invalid_argument("bench_tracking: all sizes must be >= 1");
  }

  // Arena scaled so the objects fit without crowding.
  const double side =
      160.0 + 90.0 * std::ceil(std::sqrt(static_cast<double>(tracks)));
  ScenarioParams params;
  params.width = side;
  params.height = side;
  params.object_count = tracks;
  params.frames = frames;
  params.speed_min = 1.0;
  params.speed_max = 3.0;
  params.embedding_dim = dim;
  params.embedding_noise_sigma = 0.02;
  params.seed = seed;
  const Scenario scenario = generate(params);

  TrackerParams tracker_params;
  const double fpf = static_cast<double>(frames);

  std::vector<double> predict, matrix, solve, update, step;
  for (int rep = 0; rep < repeats; ++rep) {
    Tracker tracker(tracker_params);
    for (const auto& [frame, dets] : scenario.detections) {
      tracker.step(frame, dets);
    }
    const StageTimings& t = tracker.timings();
    predict.push_back(t.predict_ms / fpf);
    matrix.push_back(t.matrix_ms / fpf);
    solve.push_back(t.solve_ms / fpf);
    update.push_back(t.update_ms / fpf);
    step.push_back(t.total_ms() / fpf);
  }

  BenchPoint point;
  point.tracks = tracks;
  point.dim = dim;
  point.frames = frames;
  point.repeats = repeats;
  point.predict_ms = median(predict);
  point.matrix_ms = median(matrix);
  point.solve_ms = median(solve);
  point.update_ms = median(update);
  point.step_ms = median(step);
  point.step_p95_ms = percentile95(step);
  return point;
}

std::vector<BenchPoint> bench_sweep(const std::vector<int>& track_counts,
                                    int dim, std::int64_t frames, int repeats,
                                    std::uint64_t seed) {
  std::vector<BenchPoint> points;
  points.reserve(track_counts.size());
  for (int n : track_counts) {
    points.push_back(bench_tracking(n, dim, frames, repeats, seed));
  }
  return points;
}

}  // namespace mot
