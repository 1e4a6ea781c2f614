#pragma once

#include <cstdint>
#include <vector>

namespace mot {

/// Unit-norm appearance vector. Construction normalizes and validates, so
/// every live Embedding satisfies ||values||_2 = 1 with finite components.
class Embedding {
 public:
  /// Normalizes `values` to unit L2 norm. Throws std::invalid_argument on
  /// empty input, non-finite components, or zero norm.
  static Embedding normalized(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  const double* data() const { return values_.data(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const Embedding& other) const = default;

 private:
  explicit Embedding(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

/// 1 - <a,b>. Equals 1 - cos(theta) for unit-norm inputs, so the range is
/// [0,2]. Throws on dimension mismatch.
double cosine_distance(const Embedding& a, const Embedding& b);

/// Squared Euclidean distance. For unit vectors this is exactly
/// 2 * cosine_distance.
double squared_distance(const Embedding& a, const Embedding& b);

/// One labeled object instance from a ground-truth stream.
struct LabeledInstance {
  Embedding embedding;
  std::int64_t identity;
  std::int64_t frame;
};

struct LabeledBatch {
  std::vector<LabeledInstance> items;
};

/// Batch construction and mining knobs. images_per_batch frames are drawn
/// from a window of window_length consecutive frames; a batch is valid when
/// at least min_identities identities appear at least min_instances times.
struct MiningParams {
  int images_per_batch = 8;
  int window_length = 16;
  int min_identities = 8;
  int min_instances = 4;
  double margin = 0.2;
  int retry_budget = 100;

  void validate() const;
};

struct Triplet {
  std::size_t anchor;
  std::size_t positive;
  std::size_t negative;

  bool operator==(const Triplet&) const = default;
};

/// Batch-hard mining: for every anchor, the positive is the farthest
/// same-identity item (squared Euclidean), the negative the nearest
/// different-identity item. Ties break toward the lowest item index.
/// Anchors lacking a same-identity partner or a different-identity item are
/// skipped.
std::vector<Triplet> mine_hard_triplets(const LabeledBatch& batch);

/// Mean hinge loss over triplets:
///   mean_i [ d2(a_i,p_i) - d2(a_i,n_i) + margin ]_+
/// Throws std::invalid_argument on an empty triplet list.
double triplet_loss(const std::vector<Triplet>& triplets,
                    const std::vector<LabeledInstance>& items, double margin);

/// True iff d2(a,p) + margin < d2(a,n).
bool margin_satisfied(const Embedding& a, const Embedding& p,
                      const Embedding& n, double margin);

/// Draws a window of window_length consecutive frames, samples
/// images_per_batch frames from it without replacement, and collects their
/// instances. Re-draws the window until the identity/instance validity
/// predicate holds; throws std::runtime_error("no valid batch") once the
/// retry budget is exhausted. Deterministic for a fixed seed.
LabeledBatch sample_batch(const std::vector<LabeledInstance>& stream,
                          const MiningParams& params, std::uint64_t seed);

}  // namespace mot
