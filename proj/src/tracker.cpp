#include "motkit/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "motkit/kernels.hpp"

namespace mot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

BBox clamp_to_image(const BBox& b, double width, double height) {
  constexpr double kMinSize = 1.0;
  double x1 = std::clamp(b.x1, 0.0, width);
  double x2 = std::clamp(b.x2, 0.0, width);
  double y1 = std::clamp(b.y1, 0.0, height);
  double y2 = std::clamp(b.y2, 0.0, height);
  if (x2 - x1 < kMinSize) {
    if (x1 + kMinSize <= width) {
      x2 = x1 + kMinSize;
    } else {
      x1 = x2 - kMinSize;
    }
  }
  if (y2 - y1 < kMinSize) {
    if (y1 + kMinSize <= height) {
      y2 = y1 + kMinSize;
    } else {
      y1 = y2 - kMinSize;
    }
  }
  return BBox(x1, y1, x2, y2);
}

}  // namespace

void TrackerParams::validate() const {
  cost.validate();
  kalman.validate();
  if (max_age < 1) {
    throw std::invalid_argument("TrackerParams: max_age must be >= 1");
  }
  if (min_hits < 1) {
    throw std::invalid_argument("TrackerParams: min_hits must be >= 1");
  }
  if (!(emb_momentum >= 0.0 && emb_momentum <= 1.0)) {
    throw std::invalid_argument(
        "TrackerParams: emb_momentum must be in [0, 1]");
  }
  if (!std::isfinite(score_floor)) {
    throw std::invalid_argument("TrackerParams: score_floor must be finite");
  }
  if (image_width < 0.0 || image_height < 0.0 ||
      (image_width > 0.0) != (image_height > 0.0)) {
    throw std::invalid_argument(
        "TrackerParams: image bounds must both be positive or both zero");
  }
}

Tracker::Tracker(TrackerParams params) : params_(std::move(params)) {
  params_.validate();
}

FrameResult Tracker::step(std::int64_t frame,
                          const std::vector<Detection>& detections) {
  if (frame <= last_frame_) {
    throw std::invalid_argument(
        "step: frame indices must be strictly increasing");
  }
  const bool use_appearance = params_.cost.beta != 0.0;
  for (const Detection& det : detections) {
    if (det.frame != frame) {
      throw std::invalid_argument("step: detection frame mismatch");
    }
    if (!std::isfinite(det.score)) {
      throw std::invalid_argument("step: non-finite detection score");
    }
    if (use_appearance && !det.embedding.has_value()) {
      throw std::invalid_argument(
          "step: detection without embedding while beta > 0");
    }
  }

  // 1. Predict every live track; the predicted boxes drive association.
  auto t0 = Clock::now();
  for (Track& track : tracks_) {
    track.state = kf_predict(track.state, params_.kalman);
    track.age += 1;
  }
  const double predict_ms = ms_since(t0);

  // 2. Cost matrix over all live tracks (Lost ones included, which is the
  // re-identification path) against the detections.
  t0 = Clock::now();
  std::vector<BBox> track_boxes;
  std::vector<Embedding> track_embs;
  track_boxes.reserve(tracks_.size());
  std::vector<BBox> det_boxes;
  std::vector<Embedding> det_embs;
  det_boxes.reserve(detections.size());
  for (const Track& track : tracks_) {
    track_boxes.push_back(extract_box(track.state));
    if (use_appearance) {
      if (!track.embedding.has_value()) {
        throw std::logic_error("step: track without embedding while beta > 0");
      }
      track_embs.push_back(*track.embedding);
    }
  }
  for (const Detection& det : detections) {
    det_boxes.push_back(det.bbox);
    if (use_appearance) det_embs.push_back(*det.embedding);
  }
  const CostMatrix cost =
      build_cost_matrix(track_boxes, track_embs, det_boxes, det_embs,
                        params_.cost);
  const double matrix_ms = ms_since(t0);

  // 3. Gated minimal-cost assignment.
  t0 = Clock::now();
  const Assignment assignment = gate_and_assign(cost, params_.cost);
  const double solve_ms = ms_since(t0);

  // 4-6. Update matched tracks, age unmatched ones, spawn new tracks.
  t0 = Clock::now();
  for (const Match& m : assignment.matches) {
    Track& track = tracks_[m.track];
    const Detection& det = detections[m.detection];
    track.state = kf_update(track.state, det.bbox, params_.kalman);
    if (det.embedding.has_value()) {
      if (track.embedding.has_value()) {
        const Embedding& old_emb = *track.embedding;
        const Embedding& new_emb = *det.embedding;
        if (old_emb.dim() != new_emb.dim()) {
          throw std::invalid_argument("step: embedding dimension mismatch");
        }
        std::vector<double> blended(old_emb.dim());
        kernels::weighted_sum(params_.emb_momentum, old_emb.data(),
                              1.0 - params_.emb_momentum, new_emb.data(),
                              old_emb.dim(), blended.data());
        track.embedding = Embedding::normalized(std::move(blended));
      } else {
        track.embedding = det.embedding;
      }
    }
    track.status = TrackStatus::Active;
    track.hits += 1;
    track.time_since_update = 0;
    track.confidence = det.score;
  }
  for (std::size_t idx : assignment.unmatched_tracks) {
    Track& track = tracks_[idx];
    track.status = TrackStatus::Lost;
    track.time_since_update += 1;
  }
  std::erase_if(tracks_, [this](const Track& track) {
    return track.time_since_update > params_.max_age;
  });
  for (std::size_t idx : assignment.unmatched_detections) {
    const Detection& det = detections[idx];
    if (det.score < params_.score_floor) continue;
    Track track;
    track.id = next_id_++;
    track.state = kf_init(det.bbox, params_.kalman);
    track.embedding = det.embedding;
    track.hits = 1;
    track.age = 0;
    track.time_since_update = 0;
    track.status = TrackStatus::Active;
    track.confidence = det.score;
    tracks_.push_back(std::move(track));
  }
  const double update_ms = ms_since(t0);

  timings_.predict_ms += predict_ms;
  timings_.matrix_ms += matrix_ms;
  timings_.solve_ms += solve_ms;
  timings_.update_ms += update_ms;
  timings_.predict_max_ms = std::max(timings_.predict_max_ms, predict_ms);
  timings_.matrix_max_ms = std::max(timings_.matrix_max_ms, matrix_ms);
  timings_.solve_max_ms = std::max(timings_.solve_max_ms, solve_ms);
  timings_.update_max_ms = std::max(timings_.update_max_ms, update_ms);
  timings_.frames += 1;

  // 7. Report confirmed Active tracks; proposals cover all live tracks.
  FrameResult result;
  result.frame = frame;
  for (const Track& track : tracks_) {
    if (track.status == TrackStatus::Active && track.hits >= params_.min_hits) {
      result.outputs.push_back(
          {track.id, extract_box(track.state), track.confidence});
    }
  }
  result.proposals = proposals_for_next_frame();
  last_frame_ = frame;
  return result;
}

std::vector<BBox> Tracker::proposals_for_next_frame() const {
  std::vector<BBox> proposals;
  proposals.reserve(tracks_.size());
  for (const Track& track : tracks_) {
    const KalmanState predicted = kf_predict(track.state, params_.kalman);
    BBox box = extract_box(predicted);
    if (params_.image_width > 0.0) {
      box = clamp_to_image(box, params_.image_width, params_.image_height);
    }
    proposals.push_back(box);
  }
  return proposals;
}

SequenceResult run_sequence(const DetectionStream& stream,
                            const TrackerParams& params) {
  Tracker tracker(params);
  SequenceResult result;
  result.frames.reserve(stream.size());
  for (const auto& [frame, detections] : stream) {
    try {
      result.frames.push_back(tracker.step(frame, detections));
    } catch (const std::exception& e) {
      throw std::runtime_error("frame " + std::to_string(frame) + ": " +
                               e.what());
    }
  }
  result.timings = tracker.timings();
  return result;
}

std::vector<MotRow> mot_rows_from_results(
    const std::vector<FrameResult>& results) {
  std::vector<MotRow> rows;
  for (const FrameResult& fr : results) {
    for (const TrackOutput& out : fr.outputs) {
      rows.push_back({fr.frame, out.id, out.bbox, out.confidence});
    }
  }
  return rows;
}

TrackFile track_file_from_results(const std::vector<FrameResult>& results) {
  TrackFile out;
  for (const FrameResult& fr : results) {
    for (const TrackOutput& o : fr.outputs) {
      out[fr.frame].push_back({o.id, o.bbox});
    }
  }
  return out;
}

}  // namespace mot
