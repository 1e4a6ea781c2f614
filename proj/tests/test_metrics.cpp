#include <doctest.h>

#include <random>

#include "motkit/metrics.hpp"
#include "test_support.hpp"

using mot::BBox;
using mot::MotReport;
using mot::TrackedBox;
using mot::TrackFile;

namespace {

/// Drifting multi-object ground truth for perturbation tests.
TrackFile synthetic_gt(int tracks, int frames) {
  TrackFile gt;
  for (std::int64_t f = 1; f <= frames; ++f) {
    for (std::int64_t id = 1; id <= tracks; ++id) {
      const double x = 50.0 * static_cast<double>(id) + 2.0 * static_cast<double>(f);
      const double y = 40.0 * static_cast<double>(id);
      gt[f].push_back({id, BBox(x, y, x + 20.0, y + 20.0)});
    }
  }
  return gt;
}

std::int64_t count_boxes(const TrackFile& file) {
  std::int64_t n = 0;
  for (const auto& [f, boxes] : file) n += boxes.size();
  return n;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("perfect hypothesis scores the perfect row") {
  const TrackFile gt = synthetic_gt(3, 12);
  const MotReport r = mot::evaluate(gt, gt, 0.5);
  CHECK(r.mota == 1.0);
  CHECK(r.motp == 100.0);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  CHECK(r.id_switches == 0);
  CHECK(r.precision == 100.0);
  CHECK(r.recall == 100.0);
  CHECK(r.mt == 100.0);
  CHECK(r.ml == 0.0);
  CHECK(r.idf1 == 100.0);
  CHECK(r.gt_count == count_boxes(gt));
}

TEST_CASE("empty hypothesis misses everything") {
  const TrackFile gt = synthetic_gt(2, 10);
  const MotReport r = mot::evaluate(gt, {}, 0.5);
  CHECK(r.mota == 0.0);  // 1 - gt/gt
  CHECK(r.fp == 0);
  CHECK(r.fn == r.gt_count);
  CHECK(r.recall == 0.0);
  CHECK(r.id_switches == 0);
  CHECK(r.ml == 100.0);
  CHECK(r.mt == 0.0);
  CHECK(r.idf1 == 0.0);
}

TEST_CASE("the 2-track swap fixture") {
  TrackFile gt, hyp;
  test_support::swap_fixture(gt, hyp);
  const MotReport r = mot::evaluate(gt, hyp, 0.5);
  CHECK(r.id_switches == 2);
  CHECK(r.fp == 0);
  CHECK(r.fn == 0);
  CHECK(r.mota == 1.0 - 2.0 / 20.0);  // 0.9, bit for bit as the identity computes it
  CHECK(r.mota == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.motp == 100.0);
}

TEST_CASE("hypothesis id relabeling leaves every metric unchanged") {
  TrackFile gt, hyp;
  test_support::swap_fixture(gt, hyp);
  // degrade the hypothesis a little so all counters are exercised
  hyp[3].erase(hyp[3].begin());                      // a miss
  hyp[7].push_back({42, BBox(500, 500, 540, 540)});  // a false positive

  TrackFile relabeled;
  for (const auto& [f, boxes] : hyp) {
    for (const TrackedBox& b : boxes) {
      relabeled[f].push_back({b.id * 131 + 9, b.bbox});
    }
  }
  const MotReport a = mot::evaluate(gt, hyp, 0.5);
  const MotReport b = mot::evaluate(gt, relabeled, 0.5);
  CHECK(a.mota == b.mota);
  CHECK(a.motp == b.motp);
  CHECK(a.fp == b.fp);
  CHECK(a.fn == b.fn);
  CHECK(a.id_switches == b.id_switches);
  CHECK(a.precision == b.precision);
  CHECK(a.recall == b.recall);
  CHECK(a.mt == b.mt);
  CHECK(a.ml == b.ml);
  CHECK(a.idf1 == b.idf1);
}

TEST_CASE("mota decomposition identity holds for noisy hypotheses") {
  std::mt19937_64 rng(71);
  const TrackFile gt = synthetic_gt(4, 20);
  for (int trial = 0; trial < 10; ++trial) {
    TrackFile hyp;
    std::uniform_real_distribution<double> jitter(-4.0, 4.0);
    std::uniform_real_distribution<double> drop(0.0, 1.0);
    for (const auto& [f, boxes] : gt) {
      for (const TrackedBox& b : boxes) {
        if (drop(rng) < 0.15) continue;
        const double dx = jitter(rng);
        const double dy = jitter(rng);
        hyp[f].push_back({b.id, BBox(b.bbox.x1 + dx, b.bbox.y1 + dy,
                                     b.bbox.x2 + dx, b.bbox.y2 + dy)});
      }
      if (drop(rng) < 0.2) {
        hyp[f].push_back({99, test_support::random_box(rng)});
      }
    }
    const MotReport r = mot::evaluate(gt, hyp, 0.5);
    const double recomputed =
        1.0 - static_cast<double>(r.fp + r.fn + r.id_switches) /
                  static_cast<double>(r.gt_count);
    CHECK(r.mota == doctest::Approx(recomputed).epsilon(1e-9));
  }
}

TEST_CASE("any single perturbation strictly lowers mota") {
  const TrackFile gt = synthetic_gt(3, 10);

  TrackFile dropped = gt;
  dropped[5].erase(dropped[5].begin());
  CHECK(mot::evaluate(gt, dropped, 0.5).mota < 1.0);

  TrackFile extra = gt;
  extra[5].push_back({77, BBox(900, 900, 940, 940)});
  CHECK(mot::evaluate(gt, extra, 0.5).mota < 1.0);

  TrackFile relabel_segment = gt;
  for (std::int64_t f = 6; f <= 10; ++f) {
    for (TrackedBox& b : relabel_segment[f]) {
      if (b.id == 2) b.id = 55;
    }
  }
  CHECK(mot::evaluate(gt, relabel_segment, 0.5).mota < 1.0);
}

TEST_CASE("totals do not depend on the frame label of single-frame inputs") {
  TrackFile gt1, hyp1, gt9, hyp9;
  gt1[1] = {{1, BBox(0, 0, 10, 10)}, {2, BBox(50, 50, 70, 70)}};
  hyp1[1] = {{4, BBox(0, 0, 10, 10)}};
  gt9[9] = gt1[1];
  hyp9[9] = hyp1[1];
  const MotReport a = mot::evaluate(gt1, hyp1, 0.5);
  const MotReport b = mot::evaluate(gt9, hyp9, 0.5);
  CHECK(a.fp == b.fp);
  CHECK(a.fn == b.fn);
  CHECK(a.mota == b.mota);
  CHECK(a.idf1 == b.idf1);
}

TEST_CASE("matches require iou at or above the threshold") {
  TrackFile gt, hyp;
  gt[1] = {{1, BBox(0, 0, 10, 10)}};
  hyp[1] = {{1, BBox(0, 0, 10, 5)}};  // IoU exactly 0.5
  const MotReport at = mot::evaluate(gt, hyp, 0.5);
  CHECK(at.fn == 0);
  CHECK(at.fp == 0);
  const MotReport above = mot::evaluate(gt, hyp, 0.51);
  CHECK(above.fn == 1);
  CHECK(above.fp == 1);
}

TEST_CASE("switches survive occlusion gaps") {
  TrackFile gt, hyp;
  const BBox box(0, 0, 10, 10);
  for (std::int64_t f = 1; f <= 10; ++f) {
    gt[f] = {{1, box}};
    if (f <= 3) {
      hyp[f] = {{5, box}};
    } else if (f <= 6) {
      // tracker lost the object entirely
    } else {
      hyp[f] = {{6, box}};  // new id after the gap
    }
  }
  const MotReport r = mot::evaluate(gt, hyp, 0.5);
  CHECK(r.id_switches == 1);
  CHECK(r.fn == 3);
}

TEST_CASE("error paths") {
  TrackFile gt, hyp;
  CHECK_THROWS_AS(mot::evaluate(gt, hyp, 0.5), std::invalid_argument);

  gt[1] = {{1, BBox(0, 0, 10, 10)}};
  CHECK_THROWS_AS(mot::evaluate(gt, hyp, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mot::evaluate(gt, hyp, 1.5), std::invalid_argument);

  hyp[1] = {{3, BBox(0, 0, 10, 10)}, {3, BBox(5, 5, 15, 15)}};
  CHECK_THROWS_AS(mot::evaluate(gt, hyp, 0.5), std::invalid_argument);

  TrackFile bad_gt;
  bad_gt[1] = {{1, BBox(0, 0, 10, 10)}, {1, BBox(5, 5, 15, 15)}};
  CHECK_THROWS_AS(mot::evaluate(bad_gt, {}, 0.5), std::invalid_argument);
}

TEST_CASE("mostly tracked and mostly lost fractions") {
  TrackFile gt, hyp;
  const BBox a(0, 0, 10, 10);
  const BBox b(100, 0, 110, 10);
  for (std::int64_t f = 1; f <= 10; ++f) {
    gt[f] = {{1, a}, {2, b}};
    if (f <= 9) hyp[f].push_back({1, a});  // id 1 covered 90%
    if (f <= 1) hyp[f].push_back({2, b});  // id 2 covered 10%
  }
  const MotReport r = mot::evaluate(gt, hyp, 0.5);
  CHECK(r.mt == 50.0);
  CHECK(r.ml == 50.0);
}

}  // TEST_SUITE
