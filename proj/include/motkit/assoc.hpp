#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "motkit/bbox.hpp"
#include "motkit/embed.hpp"

namespace mot {

/// Weights of the association cost and the match gating threshold.
struct CostParams {
  double alpha = 0.5;     // weight on position (IoU) distance
  double beta = 0.5;      // weight on appearance (cosine) distance
  double max_cost = 0.7;  // matches above this are discarded

  void validate() const;
};

/// Dense row-major cost matrix; rows are tracks, columns detections.
struct CostMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  CostMatrix() = default;
  CostMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

/// alpha * iou_distance(track_box, det_box) +
/// beta * cosine_distance(track_emb, det_emb).
double pair_cost(const BBox& track_box, const Embedding& track_emb,
                 const BBox& det_box, const Embedding& det_emb,
                 const CostParams& p);

/// Entry (i,j) = pair_cost(track i, detection j). Embedding spans may be
/// empty when beta == 0; otherwise one unit-norm embedding per box with a
/// uniform dimension is required.
CostMatrix build_cost_matrix(std::span<const BBox> track_boxes,
                             std::span<const Embedding> track_embs,
                             std::span<const BBox> det_boxes,
                             std::span<const Embedding> det_embs,
                             const CostParams& p);

struct MatchPair {
  std::size_t row;
  std::size_t col;

  bool operator==(const MatchPair&) const = default;
};

/// Minimal-cost bipartite matching of size min(rows, cols). Rectangular
/// matrices are padded to square with a large finite sentinel internally.
/// Deterministic: among equal-cost optima the result is the lexicographically
/// smallest (row, col) pair list. Throws std::invalid_argument on non-finite
/// entries. Returned pairs are sorted by row.
std::vector<MatchPair> hungarian_solve(const CostMatrix& cost);

struct Match {
  std::size_t track;
  std::size_t detection;
  double cost;
};

/// Result of gated assignment: every input track and detection index appears
/// exactly once, either in matches or in one of the unmatched lists.
struct Assignment {
  std::vector<Match> matches;
  std::vector<std::size_t> unmatched_tracks;
  std::vector<std::size_t> unmatched_detections;
};

/// hungarian_solve followed by the max-cost gate: matched pairs with cost
/// above p.max_cost are discarded and their endpoints reported unmatched.
Assignment gate_and_assign(const CostMatrix& cost, const CostParams& p);

}  // namespace mot
