#include "motkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "motkit/assoc.hpp"
#include "motkit/bbox.hpp"

namespace mot {

namespace {

void check_unique_ids(const TrackFile& file, const char* what) {
  for (const auto& [frame, boxes] : file) {
    std::set<std::int64_t> seen;
    for (const TrackedBox& box : boxes) {
      if (!seen.insert(box.id).second) {
        throw std::invalid_argument(
            std::string(what) + " id " + std::to_string(box.id) +
            " appears twice in frame " + std::to_string(frame));
      }
    }
  }
}

/// Identity index assigned by first appearance, so results do not depend on
/// id values (relabeling invariance).
class IdentityIndex {
 public:
  std::size_t index_of(std::int64_t id) {
    const auto [it, inserted] = index_.try_emplace(id, order_.size());
    if (inserted) order_.push_back(id);
    return it->second;
  }
  std::size_t size() const { return order_.size(); }

 private:
  std::map<std::int64_t, std::size_t> index_;
  std::vector<std::int64_t> order_;
};

}  // namespace

MotReport evaluate(const TrackFile& gt, const TrackFile& hyp,
                   double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("evaluate: iou_threshold must be in (0, 1]");
  }
  std::int64_t gt_total = 0;
  for (const auto& [frame, boxes] : gt) gt_total += boxes.size();
  if (gt_total == 0) {
    throw std::invalid_argument("evaluate: empty ground truth");
  }
  check_unique_ids(gt, "ground-truth");
  check_unique_ids(hyp, "hypothesis");

  std::int64_t hyp_total = 0;
  for (const auto& [frame, boxes] : hyp) hyp_total += boxes.size();

  std::set<std::int64_t> frames;
  for (const auto& [frame, boxes] : gt) frames.insert(frame);
  for (const auto& [frame, boxes] : hyp) frames.insert(frame);

  std::map<std::int64_t, std::int64_t> corr;        // gt id -> hyp id, current
  std::map<std::int64_t, std::int64_t> last_match;  // gt id -> last hyp id

  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t switches = 0;
  std::int64_t matches = 0;
  double iou_sum = 0.0;

  std::map<std::int64_t, std::int64_t> gt_lifespan;
  std::map<std::int64_t, std::int64_t> gt_covered;

  // Identity-level co-occurrence counts for IDF1.
  IdentityIndex gt_ids;
  IdentityIndex hyp_ids;
  std::map<std::pair<std::size_t, std::size_t>, std::int64_t> id_overlap;

  static const std::vector<TrackedBox> kNoBoxes;
  for (const std::int64_t frame : frames) {
    const auto git = gt.find(frame);
    const auto hit = hyp.find(frame);
    const std::vector<TrackedBox>& g = git != gt.end() ? git->second : kNoBoxes;
    const std::vector<TrackedBox>& h = hit != hyp.end() ? hit->second : kNoBoxes;

    for (const TrackedBox& box : g) gt_lifespan[box.id] += 1;

    // IDF1 counts all above-threshold co-occurrences per identity pair.
    for (const TrackedBox& gb : g) {
      for (const TrackedBox& hb : h) {
        if (iou(gb.bbox, hb.bbox) >= iou_threshold) {
          id_overlap[{gt_ids.index_of(gb.id), hyp_ids.index_of(hb.id)}] += 1;
        }
      }
    }

    std::vector<char> g_done(g.size(), 0);
    std::vector<char> h_done(h.size(), 0);
    std::map<std::int64_t, std::size_t> hyp_index;
    for (std::size_t j = 0; j < h.size(); ++j) hyp_index[h[j].id] = j;

    std::map<std::int64_t, std::int64_t> new_corr;
    auto accept = [&](std::size_t gi, std::size_t hj, double pair_iou) {
      const std::int64_t gid = g[gi].id;
      const std::int64_t hid = h[hj].id;
      const auto prev = last_match.find(gid);
      if (prev != last_match.end() && prev->second != hid) switches += 1;
      last_match[gid] = hid;
      new_corr[gid] = hid;
      g_done[gi] = 1;
      h_done[hj] = 1;
      matches += 1;
      iou_sum += pair_iou;
      gt_covered[gid] += 1;
    };

    // Carry forward still-valid correspondences from the previous frame.
    for (std::size_t gi = 0; gi < g.size(); ++gi) {
      const auto it = corr.find(g[gi].id);
      if (it == corr.end()) continue;
      const auto hj_it = hyp_index.find(it->second);
      if (hj_it == hyp_index.end() || h_done[hj_it->second]) continue;
      const double pair_iou = iou(g[gi].bbox, h[hj_it->second].bbox);
      if (pair_iou >= iou_threshold) {
        accept(gi, hj_it->second, pair_iou);
      }
    }

    // Match the remainder by minimal total IoU distance.
    std::vector<std::size_t> g_rest;
    std::vector<std::size_t> h_rest;
    for (std::size_t gi = 0; gi < g.size(); ++gi) {
      if (!g_done[gi]) g_rest.push_back(gi);
    }
    for (std::size_t hj = 0; hj < h.size(); ++hj) {
      if (!h_done[hj]) h_rest.push_back(hj);
    }
    if (!g_rest.empty() && !h_rest.empty()) {
      CostMatrix cost(g_rest.size(), h_rest.size());
      for (std::size_t a = 0; a < g_rest.size(); ++a) {
        for (std::size_t b = 0; b < h_rest.size(); ++b) {
          cost.at(a, b) = iou_distance(g[g_rest[a]].bbox, h[h_rest[b]].bbox);
        }
      }
      for (const MatchPair& pair : hungarian_solve(cost)) {
        // recomputed directly so thresholding matches the carry-forward path
        const double pair_iou =
            iou(g[g_rest[pair.row]].bbox, h[h_rest[pair.col]].bbox);
        if (pair_iou >= iou_threshold) {
          accept(g_rest[pair.row], h_rest[pair.col], pair_iou);
        }
      }
    }

    for (std::size_t gi = 0; gi < g.size(); ++gi) {
      if (!g_done[gi]) fn += 1;
    }
    for (std::size_t hj = 0; hj < h.size(); ++hj) {
      if (!h_done[hj]) fp += 1;
    }
    corr = std::move(new_corr);
  }

  // IDF1: identity-level bipartite matching maximizing co-occurrence.
  std::int64_t idtp = 0;
  if (!id_overlap.empty()) {
    std::int64_t max_overlap = 0;
    for (const auto& [key, count] : id_overlap) {
      max_overlap = std::max(max_overlap, count);
    }
    CostMatrix cost(gt_ids.size(), hyp_ids.size());
    for (std::size_t a = 0; a < gt_ids.size(); ++a) {
      for (std::size_t b = 0; b < hyp_ids.size(); ++b) {
        cost.at(a, b) = static_cast<double>(max_overlap);
      }
    }
    for (const auto& [key, count] : id_overlap) {
      cost.at(key.first, key.second) =
          static_cast<double>(max_overlap - count);
    }
    for (const MatchPair& pair : hungarian_solve(cost)) {
      const auto it = id_overlap.find({pair.row, pair.col});
      if (it != id_overlap.end()) idtp += it->second;
    }
  }

  MotReport report;
  report.fp = fp;
  report.fn = fn;
  report.id_switches = switches;
  report.gt_count = gt_total;
  report.hyp_count = hyp_total;
  report.match_count = matches;
  report.mota = 1.0 - static_cast<double>(fp + fn + switches) /
                          static_cast<double>(gt_total);
  report.motp =
      matches > 0 ? 100.0 * iou_sum / static_cast<double>(matches) : 0.0;
  report.precision =
      hyp_total > 0
          ? 100.0 * static_cast<double>(matches) / static_cast<double>(hyp_total)
          : 0.0;
  report.recall =
      100.0 * static_cast<double>(matches) / static_cast<double>(gt_total);

  std::int64_t mostly_tracked = 0;
  std::int64_t mostly_lost = 0;
  for (const auto& [gid, lifespan] : gt_lifespan) {
    const auto cov_it = gt_covered.find(gid);
    const double coverage =
        cov_it == gt_covered.end()
            ? 0.0
            : static_cast<double>(cov_it->second) / static_cast<double>(lifespan);
    if (coverage >= 0.8) mostly_tracked += 1;
    if (coverage <= 0.2) mostly_lost += 1;
  }
  const double trajectories = static_cast<double>(gt_lifespan.size());
  report.mt = 100.0 * static_cast<double>(mostly_tracked) / trajectories;
  report.ml = 100.0 * static_cast<double>(mostly_lost) / trajectories;
  report.idf1 = 100.0 * 2.0 * static_cast<double>(idtp) /
                static_cast<double>(gt_total + hyp_total);
  return report;
}

}  // namespace mot
