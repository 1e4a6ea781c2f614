#include "motkit/assoc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "motkit/kernels.hpp"

namespace mot {

void CostParams::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(alpha + beta > 0.0)) {
    throw std::invalid_argument(
        "CostParams: requires alpha >= 0, beta >= 0, alpha + beta > 0");
  }
  if (!(max_cost > 0.0)) {
    throw std::invalid_argument("CostParams: max_cost must be > 0");
  }
}

double pair_cost(const BBox& track_box, const Embedding& track_emb,
                 const BBox& det_box, const Embedding& det_emb,
                 const CostParams& p) {
  return p.alpha * iou_distance(track_box, det_box) +
         p.beta * cosine_distance(track_emb, det_emb);
}

CostMatrix build_cost_matrix(std::span<const BBox> track_boxes,
                             std::span<const Embedding> track_embs,
                             std::span<const BBox> det_boxes,
                             std::span<const Embedding> det_embs,
                             const CostParams& p) {
  p.validate();
  const bool use_appearance = p.beta != 0.0;
  const std::size_t t = track_boxes.size();
  const std::size_t d = det_boxes.size();
  if (use_appearance &&
      (track_embs.size() != t || det_embs.size() != d)) {
    throw std::invalid_argument(
        "build_cost_matrix: appearance term requires one embedding per box");
  }

  CostMatrix m(t, d);
  if (t == 0 || d == 0) return m;

  // Stage detections in SoA layout for the kernels.
  std::vector<double> x1(d), y1(d), x2(d), y2(d);
  for (std::size_t j = 0; j < d; ++j) {
    x1[j] = det_boxes[j].x1;
    y1[j] = det_boxes[j].y1;
    x2[j] = det_boxes[j].x2;
    y2[j] = det_boxes[j].y2;
  }

  std::size_t dim = 0;
  std::vector<double> det_emb_rows;
  if (use_appearance) {
    dim = det_embs[0].dim();
    for (const Embedding& e : det_embs) {
      if (e.dim() != dim) {
        throw std::invalid_argument(
            "build_cost_matrix: embedding dimension mismatch");
      }
    }
    for (const Embedding& e : track_embs) {
      if (e.dim() != dim) {
        throw std::invalid_argument(
            "build_cost_matrix: embedding dimension mismatch");
      }
    }
    det_emb_rows.resize(d * dim);
    for (std::size_t j = 0; j < d; ++j) {
      std::copy_n(det_embs[j].data(), dim, det_emb_rows.data() + j * dim);
    }
  }

  std::vector<double> pos(d);
  std::vector<double> dots(d);
  for (std::size_t i = 0; i < t; ++i) {
    const BBox& tb = track_boxes[i];
    kernels::iou_distance_rows(tb.x1, tb.y1, tb.x2, tb.y2, x1.data(),
                               y1.data(), x2.data(), y2.data(), d, pos.data());
    double* row = m.row(i);
    if (use_appearance) {
      kernels::dot_rows(track_embs[i].data(), det_emb_rows.data(), d, dim,
                        dots.data());
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = p.alpha * pos[j] + p.beta * (1.0 - dots[j]);
      }
    } else {
      for (std::size_t j = 0; j < d; ++j) {
        row[j] = p.alpha * pos[j];
      }
    }
  }
  return m;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Square LAP via shortest augmenting paths with potentials. On return
/// match_row[i] is the column of row i and (u, v) are optimal duals with
/// cost[i][j] - u[i] - v[j] >= 0, tight on matched edges.
std::vector<int> solve_square(const std::vector<double>& a, int n,
                              std::vector<double>& u, std::vector<double>& v) {
  u.assign(static_cast<std::size_t>(n) + 1, 0.0);
  v.assign(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  std::vector<double> minv(static_cast<std::size_t>(n) + 1);
  std::vector<char> used(static_cast<std::size_t>(n) + 1);

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = kInf;
      const double* arow =
          a.data() + static_cast<std::size_t>(i0 - 1) * static_cast<std::size_t>(n);
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = arow[j - 1] - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> match_row(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      match_row[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
          j - 1;
    }
  }
  return match_row;
}

/// Canonicalizes the optimal matching to the lexicographically smallest
/// (row, col) pair list. Every optimal matching is a perfect matching on the
/// tight graph of the optimal duals, so rows are fixed in order to the
/// smallest tight column that still admits a perfect completion.
class LexRefiner {
 public:
  LexRefiner(const std::vector<double>& a, int n, const std::vector<double>& u,
             const std::vector<double>& v, std::vector<int>& match_row)
      : a_(a), n_(n), u_(u), v_(v), match_row_(match_row) {
    double amax = 1.0;
    for (double x : a_) amax = std::max(amax, std::abs(x));
    eps_ = 1e-9 * amax;
    match_col_.assign(static_cast<std::size_t>(n_), -1);
    for (int i = 0; i < n_; ++i) {
      match_col_[static_cast<std::size_t>(match_row_[static_cast<std::size_t>(i)])] = i;
    }
    col_fixed_.assign(static_cast<std::size_t>(n_), 0);
    visited_.assign(static_cast<std::size_t>(n_), 0);
  }

  void run(int real_rows, int real_cols) {
    for (int i = 0; i < real_rows; ++i) {
      const int cur = match_row_[static_cast<std::size_t>(i)];
      const int limit = cur < real_cols ? cur : real_cols;
      for (int j = 0; j < limit; ++j) {
        if (col_fixed_[static_cast<std::size_t>(j)] || !tight(i, j)) continue;
        if (try_move(i, j)) break;
      }
      col_fixed_[static_cast<std::size_t>(match_row_[static_cast<std::size_t>(i)])] = 1;
    }
  }

 private:
  bool tight(int i, int j) const {
    return std::abs(a_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
                       static_cast<std::size_t>(j)] -
                    u_[static_cast<std::size_t>(i) + 1] -
                    v_[static_cast<std::size_t>(j) + 1]) <= eps_;
  }

  /// Attempts to give column j to row i, rerouting the displaced row through
  /// tight edges. Leaves the matching untouched on failure.
  bool try_move(int i, int j) {
    const int old = match_row_[static_cast<std::size_t>(i)];
    const int displaced = match_col_[static_cast<std::size_t>(j)];
    match_row_[static_cast<std::size_t>(i)] = j;
    match_col_[static_cast<std::size_t>(j)] = i;
    match_col_[static_cast<std::size_t>(old)] = -1;
    std::fill(visited_.begin(), visited_.end(), 0);
    visited_[static_cast<std::size_t>(j)] = 1;
    if (augment(displaced)) {
      return true;
    }
    match_row_[static_cast<std::size_t>(i)] = old;
    match_col_[static_cast<std::size_t>(old)] = i;
    match_col_[static_cast<std::size_t>(j)] = displaced;
    match_row_[static_cast<std::size_t>(displaced)] = j;
    return false;
  }

  bool augment(int row) {
    for (int j = 0; j < n_; ++j) {
      if (visited_[static_cast<std::size_t>(j)] ||
          col_fixed_[static_cast<std::size_t>(j)] || !tight(row, j)) {
        continue;
      }
      visited_[static_cast<std::size_t>(j)] = 1;
      const int owner = match_col_[static_cast<std::size_t>(j)];
      if (owner == -1 || augment(owner)) {
        match_row_[static_cast<std::size_t>(row)] = j;
        match_col_[static_cast<std::size_t>(j)] = row;
        return true;
      }
    }
    return false;
  }

  const std::vector<double>& a_;
  int n_;
  const std::vector<double>& u_;
  const std::vector<double>& v_;
  std::vector<int>& match_row_;
  std::vector<int> match_col_;
  std::vector<char> col_fixed_;
  std::vector<char> visited_;
  double eps_ = 0.0;
};

}  // namespace

std::vector<MatchPair> hungarian_solve(const CostMatrix& cost) {
  for (double x : cost.data) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument("hungarian_solve: non-finite cost entry");
    }
  }
  const int t = static_cast<int>(cost.rows);
  const int d = static_cast<int>(cost.cols);
  if (t == 0 || d == 0) return {};

  const int n = std::max(t, d);
  double amax = 1.0;
  for (double x : cost.data) amax = std::max(amax, std::abs(x));
  const double sentinel = amax * static_cast<double>(n) + 1.0;

  std::vector<double> a(static_cast<std::size_t>(n) * static_cast<std::size_t>(n),
                        sentinel);
  for (int i = 0; i < t; ++i) {
    for (int j = 0; j < d; ++j) {
      a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) +
        static_cast<std::size_t>(j)] = cost.at(static_cast<std::size_t>(i),
                                               static_cast<std::size_t>(j));
    }
  }

  std::vector<double> u, v;
  std::vector<int> match_row = solve_square(a, n, u, v);
  LexRefiner(a, n, u, v, match_row).run(t, d);

  std::vector<MatchPair> out;
  out.reserve(static_cast<std::size_t>(std::min(t, d)));
  for (int i = 0; i < t; ++i) {
    const int j = match_row[static_cast<std::size_t>(i)];
    if (j < d) {
      out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
    }
  }
  return out;
}

Assignment gate_and_assign(const CostMatrix& cost, const CostParams& p) {
  p.validate();
  const std::vector<MatchPair> pairs = hungarian_solve(cost);

  Assignment out;
  std::vector<char> track_used(cost.rows, 0);
  std::vector<char> det_used(cost.cols, 0);
  for (const MatchPair& pair : pairs) {
    const double c = cost.at(pair.row, pair.col);
    if (c <= p.max_cost) {
      out.matches.push_back({pair.row, pair.col, c});
      track_used[pair.row] = 1;
      det_used[pair.col] = 1;
    }
  }
  for (std::size_t i = 0; i < cost.rows; ++i) {
    if (!track_used[i]) out.unmatched_tracks.push_back(i);
  }
  for (std::size_t j = 0; j < cost.cols; ++j) {
    if (!det_used[j]) out.unmatched_detections.push_back(j);
  }
  return out;
}

}  // namespace mot
