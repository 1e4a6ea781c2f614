#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "motkit/detection.hpp"
#include "motkit/embed.hpp"
#include "motkit/io.hpp"
#include "motkit/tracker.hpp"

namespace mot {

struct OcclusionEvent {
  std::int64_t start_frame;
  std::int64_t duration;
  std::int64_t object_id;
};

/// Synthetic scene configuration. All randomness comes from the seed; there
/// is no ambient RNG state. Oracle mode is jitter = dropout = false-positive
/// rate = 0, in which case detections equal ground-truth boxes bitwise.
struct ScenarioParams {
  double width = 640.0;
  double height = 480.0;
  int object_count = 8;
  std::int64_t frames = 100;
  double speed_min = 1.0;  // per-axis velocity magnitude, px/frame
  double speed_max = 4.0;
  std::vector<OcclusionEvent> occlusions;
  double dropout_rate = 0.0;
  double jitter_sigma = 0.0;
  double false_positive_rate = 0.0;  // per-frame probability of a spurious box
  int embedding_dim = 128;
  double embedding_noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Scenario {
  TrackFile gt;
  DetectionStream detections;
  std::vector<LabeledInstance> labeled;  // one record per emitted true detection
  std::vector<std::pair<std::int64_t, std::int64_t>> bounces;  // (frame, id)
};

/// Constant-velocity trajectories with reflective walls. Each identity gets
/// a random unit prototype; detection embeddings are
/// normalize(prototype + gaussian noise). Occluded frames emit no detection
/// for the object. Bounce frames are annotated so tests can exclude the
/// constant-velocity violations.
Scenario generate(const ScenarioParams& params);

/// Proposal-starved detector stub: a ground-truth detection is emitted when
/// some proposal overlaps it with IoU >= gate_iou, otherwise only with
/// probability recall_floor. One uniform draw is consumed per candidate
/// regardless of coverage, so runs with and without proposals share the
/// random stream.
std::vector<Detection> gated_detector(const std::vector<Detection>& oracle,
                                      const std::vector<BBox>& proposals,
                                      double gate_iou, double recall_floor,
                                      std::mt19937_64& rng);

/// Closed tracking loop against the gated detector: each frame's proposals
/// come from the tracker's own predictions (or stay empty when disabled).
/// Returns the hypothesis track file for evaluation.
TrackFile closed_loop_track(const Scenario& scenario,
                            const TrackerParams& params, double gate_iou,
                            double recall_floor, std::uint64_t detector_seed,
                            bool use_proposals);

}  // namespace mot
