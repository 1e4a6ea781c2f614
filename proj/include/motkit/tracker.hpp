#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "motkit/assoc.hpp"
#include "motkit/bbox.hpp"
#include "motkit/detection.hpp"
#include "motkit/embed.hpp"
#include "motkit/io.hpp"
#include "motkit/kalman.hpp"

namespace mot {

enum class TrackStatus { Active, Lost };

/// One tracked identity: filtered box state, smoothed appearance and the
/// lifecycle counters driving birth, loss and removal.
struct Track {
  std::int64_t id = 0;
  KalmanState state;
  std::optional<Embedding> embedding;
  int hits = 0;
  int age = 0;
  int time_since_update = 0;
  TrackStatus status = TrackStatus::Active;
  double confidence = 0.0;
};

struct TrackerParams {
  CostParams cost;
  KalmanParams kalman;
  int max_age = 30;           // frames a Lost track survives
  int min_hits = 1;           // matches before a track is reported
  double emb_momentum = 0.9;  // EMA weight on the old embedding
  double score_floor = 0.0;   // minimum score for track birth
  double image_width = 0.0;   // proposal clamp bounds; 0 = unbounded
  double image_height = 0.0;

  void validate() const;
};

struct TrackOutput {
  std::int64_t id;
  BBox bbox;
  double confidence;

  bool operator==(const TrackOutput&) const = default;
};

/// Per-frame result: reported identities plus the Kalman-predicted boxes of
/// all live tracks, which are the track proposals for the next frame.
struct FrameResult {
  std::int64_t frame;
  std::vector<TrackOutput> outputs;
  std::vector<BBox> proposals;

  bool operator==(const FrameResult&) const = default;
};

/// Accumulated wall time per tracking stage, in milliseconds.
struct StageTimings {
  double predict_ms = 0.0;
  double matrix_ms = 0.0;
  double solve_ms = 0.0;
  double update_ms = 0.0;
  double predict_max_ms = 0.0;
  double matrix_max_ms = 0.0;
  double solve_max_ms = 0.0;
  double update_max_ms = 0.0;
  std::int64_t frames = 0;

  double total_ms() const {
    return predict_ms + matrix_ms + solve_ms + update_ms;
  }
  double mean_frame_ms() const {
    return frames > 0 ? total_ms() / static_cast<double>(frames) : 0.0;
  }
  double fps() const {
    const double mean = mean_frame_ms();
    return mean > 0.0 ? 1000.0 / mean : 0.0;
  }
};

/// Online per-frame tracking state machine: predict, associate, update,
/// manage birth/loss/death. Single-owner mutable state; run distinct
/// sequences on distinct instances.
class Tracker {
 public:
  explicit Tracker(TrackerParams params);

  /// Processes one frame of detections. Frame indices must be strictly
  /// increasing; malformed detections (frame mismatch, non-finite score,
  /// missing embedding while beta > 0) fail fast.
  FrameResult step(std::int64_t frame, const std::vector<Detection>& detections);

  /// Kalman-predicted boxes of all live tracks (Active and Lost), clamped to
  /// the configured image bounds.
  std::vector<BBox> proposals_for_next_frame() const;

  const std::vector<Track>& tracks() const { return tracks_; }
  const StageTimings& timings() const { return timings_; }

 private:
  TrackerParams params_;
  std::vector<Track> tracks_;
  std::int64_t next_id_ = 1;
  std::int64_t last_frame_ = 0;
  StageTimings timings_;
};

struct SequenceResult {
  std::vector<FrameResult> frames;
  StageTimings timings;
};

/// Folds Tracker::step over an ordered detection stream. Step errors are
/// rethrown with the offending frame in the message.
SequenceResult run_sequence(const DetectionStream& stream,
                            const TrackerParams& params);

/// Hypothesis rows from tracker output, for write_mot or evaluation.
std::vector<MotRow> mot_rows_from_results(const std::vector<FrameResult>& results);
TrackFile track_file_from_results(const std::vector<FrameResult>& results);

}  // namespace mot
