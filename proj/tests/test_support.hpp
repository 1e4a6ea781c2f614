#pragma once

// Shared fixtures and independent oracles for the test suites. The oracles
// here (exhaustive assignment enumeration, full-scan triplet mining) stay
// independent of the library code paths they check.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "motkit/assoc.hpp"
#include "motkit/bbox.hpp"
#include "motkit/embed.hpp"
#include "motkit/io.hpp"
#include "motkit/sim.hpp"

namespace test_support {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("motkit_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path file(const std::string& name) const {
    return path_ / name;
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

inline mot::BBox random_box(std::mt19937_64& rng, double span = 400.0) {
  std::uniform_real_distribution<double> pos(0.0, span);
  std::uniform_real_distribution<double> size(4.0, 120.0);
  const double x1 = pos(rng);
  const double y1 = pos(rng);
  return mot::BBox(x1, y1, x1 + size(rng), y1 + size(rng));
}

inline mot::Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = gauss(rng);
  return mot::Embedding::normalized(std::move(v));
}

inline mot::CostMatrix random_cost(std::mt19937_64& rng, std::size_t rows,
                                   std::size_t cols, double lo = 0.0,
                                   double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  mot::CostMatrix m(rows, cols);
  for (double& x : m.data) x = dist(rng);
  return m;
}

/// Exhaustive minimum over all injective assignments of the smaller side.
/// Totals accumulate in ascending row order, matching how the solver tests
/// sum their results.
inline double brute_force_lap_total(const mot::CostMatrix& m) {
  const std::size_t rows = m.rows;
  const std::size_t cols = m.cols;
  double best = std::numeric_limits<double>::infinity();
  if (rows <= cols) {
    std::vector<char> used(cols, 0);
    std::function<void(std::size_t, double)> rec = [&](std::size_t row,
                                                       double acc) {
      if (row == rows) {
        best = std::min(best, acc);
        return;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        if (used[j]) continue;
        used[j] = 1;
        rec(row + 1, acc + m.at(row, j));
        used[j] = 0;
      }
    };
    rec(0, 0.0);
  } else {
    std::vector<int> row_of_col(cols, -1);
    std::vector<char> used(rows, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t col) {
      if (col == cols) {
        double acc = 0.0;
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < cols; ++j) {
            if (row_of_col[j] == static_cast<int>(i)) acc += m.at(i, j);
          }
        }
        best = std::min(best, acc);
        return;
      }
      for (std::size_t i = 0; i < rows; ++i) {
        if (used[i]) continue;
        used[i] = 1;
        row_of_col[col] = static_cast<int>(i);
        rec(col + 1);
        used[i] = 0;
        row_of_col[col] = -1;
      }
    };
    rec(0);
  }
  return best;
}

/// Exhaustive lexicographic-minimum optimal matching: enumerates every
/// injective assignment, keeps the minimum total, and among equal totals the
/// lexicographically smallest row-sorted (row, col) list.
inline std::vector<mot::MatchPair> brute_force_lex_min(
    const mot::CostMatrix& m) {
  const std::size_t rows = m.rows;
  const std::size_t cols = m.cols;
  std::vector<mot::MatchPair> best_pairs;
  double best_total = std::numeric_limits<double>::infinity();

  auto lex_less = [](const std::vector<mot::MatchPair>& a,
                     const std::vector<mot::MatchPair>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
      if (a[i].row != b[i].row) return a[i].row < b[i].row;
      if (a[i].col != b[i].col) return a[i].col < b[i].col;
    }
    return a.size() < b.size();
  };
  auto consider = [&](const std::vector<mot::MatchPair>& pairs) {
    double total = 0.0;
    for (const mot::MatchPair& p : pairs) total += m.at(p.row, p.col);
    if (total < best_total ||
        (total == best_total && lex_less(pairs, best_pairs))) {
      best_total = total;
      best_pairs = pairs;
    }
  };

  if (rows <= cols) {
    std::vector<char> used(cols, 0);
    std::vector<mot::MatchPair> acc;
    std::function<void(std::size_t)> rec = [&](std::size_t row) {
      if (row == rows) {
        consider(acc);
        return;
      }
      for (std::size_t j = 0; j < cols; ++j) {
        if (used[j]) continue;
        used[j] = 1;
        acc.push_back({row, j});
        rec(row + 1);
        acc.pop_back();
        used[j] = 0;
      }
    };
    rec(0);
  } else {
    std::vector<int> row_of_col(cols, -1);
    std::vector<char> used(rows, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t col) {
      if (col == cols) {
        std::vector<mot::MatchPair> pairs;
        for (std::size_t i = 0; i < rows; ++i) {
          for (std::size_t j = 0; j < cols; ++j) {
            if (row_of_col[j] == static_cast<int>(i)) pairs.push_back({i, j});
          }
        }
        consider(pairs);
        return;
      }
      for (std::size_t i = 0; i < rows; ++i) {
        if (used[i]) continue;
        used[i] = 1;
        row_of_col[col] = static_cast<int>(i);
        rec(col + 1);
        used[i] = 0;
        row_of_col[col] = -1;
      }
    };
    rec(0);
  }
  return best_pairs;
}

/// Row-ordered total of a solver result.
inline double matching_total(const mot::CostMatrix& m,
                             const std::vector<mot::MatchPair>& pairs) {
  std::vector<mot::MatchPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end(),
            [](const mot::MatchPair& a, const mot::MatchPair& b) {
              return a.row < b.row;
            });
  double total = 0.0;
  for (const mot::MatchPair& p : sorted) total += m.at(p.row, p.col);
  return total;
}

/// Full O(n^2) mining scan with the lowest-index tie rule, written
/// independently of mine_hard_triplets.
inline std::vector<mot::Triplet> mine_oracle(const mot::LabeledBatch& batch) {
  const auto& items = batch.items;
  const std::size_t n = items.size();
  auto d2 = [&](std::size_t x, std::size_t y) {
    double sum = 0.0;
    for (std::size_t k = 0; k < items[x].embedding.dim(); ++k) {
      const double d = items[x].embedding[k] - items[y].embedding[k];
      sum += d * d;
    }
    return sum;
  };
  std::vector<mot::Triplet> out;
  for (std::size_t a = 0; a < n; ++a) {
    std::size_t pos = n;
    std::size_t neg = n;
    double pos_d = -1.0;
    double neg_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (i == a) continue;
      const double d = d2(a, i);
      if (items[i].identity == items[a].identity) {
        if (d > pos_d) {
          pos_d = d;
          pos = i;
        }
      } else if (d < neg_d) {
        neg_d = d;
        neg = i;
      }
    }
    if (pos != n && neg != n) out.push_back({a, pos, neg});
  }
  return out;
}

inline mot::LabeledBatch random_batch(std::mt19937_64& rng, std::size_t items,
                                      std::size_t identities,
                                      std::size_t dim = 16) {
  std::uniform_int_distribution<std::int64_t> pick_id(
      1, static_cast<std::int64_t>(identities));
  mot::LabeledBatch batch;
  for (std::size_t i = 0; i < items; ++i) {
    batch.items.push_back(
        {random_unit(rng, dim), pick_id(rng),
         static_cast<std::int64_t>(i / identities) + 1});
  }
  return batch;
}

/// The 2-track swap fixture: two parallel constant tracks over 10 frames;
/// the hypothesis swaps its ids from frame 6 on.
inline void swap_fixture(mot::TrackFile& gt, mot::TrackFile& hyp) {
  for (std::int64_t f = 1; f <= 10; ++f) {
    const mot::BBox a(0.0, 0.0, 10.0, 10.0);
    const mot::BBox b(100.0, 100.0, 110.0, 110.0);
    gt[f] = {{1, a}, {2, b}};
    if (f <= 5) {
      hyp[f] = {{7, a}, {8, b}};
    } else {
      hyp[f] = {{8, a}, {7, b}};
    }
  }
}

/// Occlusion-heavy oracle scene: occlusion windows are placed to straddle
/// wall bounces, so the hidden course change makes objects reappear far from
/// their pre-occlusion track prediction (the re-identification stressor).
inline mot::Scenario occlusion_heavy_scene(std::uint64_t seed,
                                           int max_events = 3) {
  mot::ScenarioParams params;
  params.width = 640.0;
  params.height = 480.0;
  params.object_count = 8;
  params.frames = 120;
  params.speed_min = 3.0;
  params.speed_max = 5.0;
  params.embedding_dim = 64;
  params.embedding_noise_sigma = 0.05;
  params.seed = seed;

  const mot::Scenario probe = mot::generate(params);
  std::set<std::int64_t> used;
  for (const auto& [frame, id] : probe.bounces) {
    if (static_cast<int>(used.size()) >= max_events) break;
    if (frame < 12 || frame > params.frames - 12) continue;
    if (used.count(id)) continue;
    params.occlusions.push_back({frame - 2, 8, id});
    used.insert(id);
  }
  return mot::generate(params);
}

inline mot::ScenarioParams oracle_scene_params(std::uint64_t seed) {
  mot::ScenarioParams params;
  params.width = 640.0;
  params.height = 480.0;
  params.object_count = 8;
  params.frames = 100;
  params.speed_min = 1.0;
  params.speed_max = 4.0;
  params.embedding_dim = 64;
  params.embedding_noise_sigma = 0.05;
  params.seed = seed;
  return params;
}

inline mot::TrackFile gt_as_hypothesis(const mot::TrackFile& gt) { return gt; }

}  // namespace test_support
