#include "motkit/embed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "motkit/kernels.hpp"

namespace mot {

Embedding Embedding::normalized(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("Embedding: empty vector");
  }
  double sq = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Embedding: non-finite component");
    }
    sq += v * v;
  }
  const double norm = std::sqrt(sq);
  if (norm <= 0.0 || !std::isfinite(norm)) {
    throw std::invalid_argument("Embedding: zero norm");
  }
  // Skip the division for vectors already unit-norm to the last few ulps, so
  // ingest is idempotent and write/read round trips preserve bits.
  if (std::abs(norm - 1.0) > 1e-9) {
    for (double& v : values) {
      v /= norm;
    }
  }
  return Embedding(std::move(values));
}

double cosine_distance(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("cosine_distance: dimension mismatch");
  }
  double dot = 0.0;
  kernels::dot_rows(a.data(), b.data(), 1, a.dim(), &dot);
  return 1.0 - dot;
}

double squared_distance(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw std::invalid_argument("squared_distance: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

void MiningParams::validate() const {
  if (images_per_batch < 1 || window_length < 1 ||
      images_per_batch > window_length) {
    throw std::invalid_argument(
        "MiningParams: requires 1 <= images_per_batch <= window_length");
  }
  if (min_identities < 2) {
    throw std::invalid_argument("MiningParams: min_identities must be >= 2");
  }
  if (min_instances < 2) {
    throw std::invalid_argument("MiningParams: min_instances must be >= 2");
  }
  if (!(margin > 0.0)) {
    throw std::invalid_argument("MiningParams: margin must be > 0");
  }
  if (retry_budget < 1) {
    throw std::invalid_argument("MiningParams: retry_budget must be >= 1");
  }
}

std::vector<Triplet> mine_hard_triplets(const LabeledBatch& batch) {
  const auto& items = batch.items;
  const std::size_t n = items.size();
  std::vector<Triplet> out;
  out.reserve(n);

  for (std::size_t a = 0; a < n; ++a) {
    double pos_dist = -1.0;
    std::size_t pos_idx = n;
    double neg_dist = std::numeric_limits<double>::infinity();
    std::size_t neg_idx = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == a) continue;
      const double d = squared_distance(items[a].embedding, items[i].embedding);
      if (items[i].identity == items[a].identity) {
        if (d > pos_dist) {
          pos_dist = d;
          pos_idx = i;
        }
      } else {
        if (d < neg_dist) {
          neg_dist = d;
          neg_idx = i;
        }
      }
    }
    if (pos_idx == n || neg_idx == n) continue;
    out.push_back({a, pos_idx, neg_idx});
  }
  return out;
}

double triplet_loss(const std::vector<Triplet>& triplets,
                    const std::vector<LabeledInstance>& items, double margin) {
  if (triplets.empty()) {
    throw std::invalid_argument("triplet_loss: empty triplet list");
  }
  double sum = 0.0;
  for (const Triplet& t : triplets) {
    const double dp =
        squared_distance(items[t.anchor].embedding, items[t.positive].embedding);
    const double dn =
        squared_distance(items[t.anchor].embedding, items[t.negative].embedding);
    sum += std::max(0.0, dp - dn + margin);
  }
  return sum / static_cast<double>(triplets.size());
}

bool margin_satisfied(const Embedding& a, const Embedding& p,
                      const Embedding& n, double margin) {
  return squared_distance(a, p) + margin < squared_distance(a, n);
}

namespace {

bool batch_valid(const std::vector<LabeledInstance>& items,
                 const MiningParams& params) {
  std::map<std::int64_t, int> counts;
  for (const auto& item : items) {
    counts[item.identity] += 1;
  }
  int rich = 0;
  for (const auto& [id, count] : counts) {
    if (count >= params.min_instances) ++rich;
  }
  return rich >= params.min_identities;
}

}  // namespace

LabeledBatch sample_batch(const std::vector<LabeledInstance>& stream,
                          const MiningParams& params, std::uint64_t seed) {
  params.validate();

  std::int64_t min_frame = std::numeric_limits<std::int64_t>::max();
  std::int64_t max_frame = std::numeric_limits<std::int64_t>::min();
  for (const auto& item : stream) {
    min_frame = std::min(min_frame, item.frame);
    max_frame = std::max(max_frame, item.frame);
  }
  if (stream.empty() ||
      max_frame - min_frame + 1 < static_cast<std::int64_t>(params.window_length)) {
    throw std::invalid_argument(
        "sample_batch: stream shorter than the frame window");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> window_start(
      min_frame, max_frame - params.window_length + 1);

  for (int attempt = 0; attempt < params.retry_budget; ++attempt) {
    const std::int64_t start = window_start(rng);

    // Sample images_per_batch distinct frames out of the window.
    std::vector<std::int64_t> frames(static_cast<std::size_t>(params.window_length));
    for (int i = 0; i < params.window_length; ++i) {
      frames[static_cast<std::size_t>(i)] = start + i;
    }
    for (int i = 0; i < params.images_per_batch; ++i) {
      std::uniform_int_distribution<int> pick(i, params.window_length - 1);
      std::swap(frames[static_cast<std::size_t>(i)],
                frames[static_cast<std::size_t>(pick(rng))]);
    }
    std::set<std::int64_t> chosen(
        frames.begin(), frames.begin() + params.images_per_batch);

    LabeledBatch batch;
    for (const auto& item : stream) {
      if (chosen.count(item.frame)) {
        batch.items.push_back(item);
      }
    }
    if (batch_valid(batch.items, params)) {
      return batch;
    }
  }
  throw std::runtime_error("no valid batch");
}

}  // namespace mot
