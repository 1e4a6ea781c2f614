#pragma once

#include <cstdint>

#include "motkit/io.hpp"

namespace mot {

/// CLEAR-MOT metric bundle for one sequence. mota is a fraction (can go
/// negative); motp is mean matched IoU x100; precision, recall, mt, ml and
/// idf1 are percentages.
struct MotReport {
  double mota = 0.0;
  double motp = 0.0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t id_switches = 0;
  double precision = 0.0;
  double recall = 0.0;
  double mt = 0.0;
  double ml = 0.0;
  double idf1 = 0.0;
  std::int64_t gt_count = 0;
  std::int64_t hyp_count = 0;
  std::int64_t match_count = 0;
};

/// Evaluates a hypothesis track file against ground truth. Per frame,
/// previous correspondences are carried forward while their IoU stays at or
/// above the threshold; remaining pairs are resolved by minimal-total
/// IoU-distance matching. An ID switch is counted when a matched GT's
/// hypothesis id differs from that GT's most recent non-null hypothesis id,
/// so switches survive occlusion gaps. Throws std::invalid_argument on empty
/// ground truth or on id collisions within a frame.
MotReport evaluate(const TrackFile& gt, const TrackFile& hyp,
                   double iou_threshold = 0.5);

}  // namespace mot
