#include "motkit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace mot {

void ScenarioParams::validate() const {
  if (!(width > 0.0 && height > 0.0)) {
    throw std::invalid_argument("ScenarioParams: image size must be positive");
  }
  if (object_count < 0) {
    throw std::invalid_argument("ScenarioParams: object_count must be >= 0");
  }
  if (frames < 1) {
    throw std::invalid_argument("ScenarioParams: frames must be >= 1");
  }
  if (!(speed_min >= 0.0 && speed_max >= speed_min)) {
    throw std::invalid_argument("ScenarioParams: bad velocity range");
  }
  for (const OcclusionEvent& ev : occlusions) {
    if (ev.duration < 1) {
      throw std::invalid_argument(
          "ScenarioParams: occlusion duration must be >= 1");
    }
    if (ev.object_id < 1 || ev.object_id > object_count) {
      throw std::invalid_argument("ScenarioParams: occlusion object id out of range");
    }
  }
  for (double rate : {dropout_rate, false_positive_rate}) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
      throw std::invalid_argument("ScenarioParams: rates must be in [0, 1]");
    }
  }
  if (jitter_sigma < 0.0 || embedding_noise_sigma < 0.0) {
    throw std::invalid_argument("ScenarioParams: sigmas must be >= 0");
  }
  if (embedding_dim < 1) {
    throw std::invalid_argument("ScenarioParams: embedding_dim must be >= 1");
  }
}

namespace {

struct ObjectState {
  double x1, y1;  // top-left corner
  double w, h;
  double vx, vy;
  Embedding prototype;
};

Embedding random_unit_vector(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  while (true) {
    std::vector<double> values(static_cast<std::size_t>(dim));
    for (double& v : values) v = gauss(rng);
    double sq = 0.0;
    for (double v : values) sq += v * v;
    if (sq > 1e-12) {
      return Embedding::normalized(std::move(values));
    }
  }
}

/// Reflects p into [0, limit], flipping v on each wall hit.
bool reflect(double& p, double& v, double limit) {
  bool bounced = false;
  while (p < 0.0 || p > limit) {
    if (p < 0.0) {
      p = -p;
      v = -v;
    } else {
      p = 2.0 * limit - p;
      v = -v;
    }
    bounced = true;
  }
  return bounced;
}

}  // namespace

Scenario generate(const ScenarioParams& params) {
  params.validate();
  std::mt19937_64 setup_rng(params.seed);
  std::mt19937_64 det_rng(params.seed ^ 0x9e3779b97f4a7c15ULL);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Object sizes, spawn points, velocities and prototypes are drawn up
  // front, so trajectories do not depend on the detection-noise settings.
  std::vector<ObjectState> objects;
  objects.reserve(static_cast<std::size_t>(params.object_count));
  for (int i = 0; i < params.object_count; ++i) {
    ObjectState obj{0, 0, 0, 0, 0, 0, random_unit_vector(params.embedding_dim, setup_rng)};
    std::uniform_real_distribution<double> size_dist(
        std::min(32.0, params.width / 4.0), std::min(56.0, params.width / 3.0));
    obj.w = size_dist(setup_rng);
    obj.h = size_dist(setup_rng);
    obj.x1 = unit(setup_rng) * (params.width - obj.w);
    obj.y1 = unit(setup_rng) * (params.height - obj.h);
    std::uniform_real_distribution<double> speed(params.speed_min,
                                                 params.speed_max);
    obj.vx = speed(setup_rng) * (unit(setup_rng) < 0.5 ? -1.0 : 1.0);
    obj.vy = speed(setup_rng) * (unit(setup_rng) < 0.5 ? -1.0 : 1.0);
    objects.push_back(std::move(obj));
  }

  std::set<std::pair<std::int64_t, std::int64_t>> occluded;  // (frame, id)
  for (const OcclusionEvent& ev : params.occlusions) {
    for (std::int64_t f = ev.start_frame; f < ev.start_frame + ev.duration;
         ++f) {
      occluded.insert({f, ev.object_id});
    }
  }

  Scenario scenario;
  for (std::int64_t frame = 1; frame <= params.frames; ++frame) {
    std::vector<Detection>& dets = scenario.detections[frame];
    std::vector<TrackedBox>& gt_boxes = scenario.gt[frame];
    for (int i = 0; i < params.object_count; ++i) {
      ObjectState& obj = objects[static_cast<std::size_t>(i)];
      const std::int64_t id = i + 1;
      if (frame > 1) {
        obj.x1 += obj.vx;
        obj.y1 += obj.vy;
        const bool bx = reflect(obj.x1, obj.vx, params.width - obj.w);
        const bool by = reflect(obj.y1, obj.vy, params.height - obj.h);
        if (bx || by) scenario.bounces.push_back({frame, id});
      }
      const BBox gt_box(obj.x1, obj.y1, obj.x1 + obj.w, obj.y1 + obj.h);
      gt_boxes.push_back({id, gt_box});

      if (occluded.count({frame, id})) continue;
      if (params.dropout_rate > 0.0 && unit(det_rng) < params.dropout_rate) {
        continue;
      }

      BBox det_box = gt_box;
      if (params.jitter_sigma > 0.0) {
        double c[4] = {gt_box.x1, gt_box.y1, gt_box.x2, gt_box.y2};
        for (double& v : c) v += params.jitter_sigma * gauss(det_rng);
        if (c[2] - c[0] < 1.0) {
          const double cx = 0.5 * (c[0] + c[2]);
          c[0] = cx - 0.5;
          c[2] = cx + 0.5;
        }
        if (c[3] - c[1] < 1.0) {
          const double cy = 0.5 * (c[1] + c[3]);
          c[1] = cy - 0.5;
          c[3] = cy + 0.5;
        }
        det_box = BBox(c[0], c[1], c[2], c[3]);
      }

      Embedding emb = obj.prototype;
      if (params.embedding_noise_sigma > 0.0) {
        std::vector<double> noisy = obj.prototype.values();
        for (double& v : noisy) {
          v += params.embedding_noise_sigma * gauss(det_rng);
        }
        emb = Embedding::normalized(std::move(noisy));
      }
      dets.push_back({frame, det_box, 1.0, emb});
      scenario.labeled.push_back({std::move(emb), id, frame});
    }

    if (params.false_positive_rate > 0.0 &&
        unit(det_rng) < params.false_positive_rate) {
      std::uniform_real_distribution<double> size_dist(24.0, 64.0);
      const double w = std::min(size_dist(det_rng), params.width / 2.0);
      const double h = std::min(size_dist(det_rng), params.height / 2.0);
      const double x1 = unit(det_rng) * (params.width - w);
      const double y1 = unit(det_rng) * (params.height - h);
      dets.push_back({frame, BBox(x1, y1, x1 + w, y1 + h), 1.0,
                      random_unit_vector(params.embedding_dim, det_rng)});
    }
  }
  return scenario;
}

std::vector<Detection> gated_detector(const std::vector<Detection>& oracle,
                                      const std::vector<BBox>& proposals,
                                      double gate_iou, double recall_floor,
                                      std::mt19937_64& rng) {
  if (!(gate_iou > 0.0 && gate_iou <= 1.0)) {
    throw std::invalid_argument("gated_detector: gate_iou must be in (0, 1]");
  }
  if (!(recall_floor >= 0.0 && recall_floor <= 1.0)) {
    throw std::invalid_argument(
        "gated_detector: recall_floor must be in [0, 1]");
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Detection> out;
  for (const Detection& det : oracle) {
    bool covered = false;
    for (const BBox& proposal : proposals) {
      if (iou(det.bbox, proposal) >= gate_iou) {
        covered = true;
        break;
      }
    }
    // Always consume one draw to keep streams aligned across variants.
    const bool lucky = unit(rng) < recall_floor;
    if (covered || lucky) out.push_back(det);
  }
  return out;
}

TrackFile closed_loop_track(const Scenario& scenario,
                            const TrackerParams& params, double gate_iou,
                            double recall_floor, std::uint64_t detector_seed,
                            bool use_proposals) {
  Tracker tracker(params);
  std::mt19937_64 rng(detector_seed);
  std::vector<BBox> proposals;
  std::vector<FrameResult> results;
  for (const auto& [frame, oracle] : scenario.detections) {
    const std::vector<Detection> dets = gated_detector(
        oracle, use_proposals ? proposals : std::vector<BBox>{}, gate_iou,
        recall_floor, rng);
    results.push_back(tracker.step(frame, dets));
    proposals = results.back().proposals;
  }
  return track_file_from_results(results);
}

}  // namespace mot
