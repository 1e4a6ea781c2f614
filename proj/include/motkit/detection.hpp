#pragma once

#include <cstdint>
#include <optional>

#include "motkit/bbox.hpp"
#include "motkit/embed.hpp"

namespace mot {

/// One detector output: a box with confidence and, when an embedding sidecar
/// was supplied, a unit-norm appearance vector. The embedding is optional at
/// parse time but mandatory before tracking with an appearance weight.
struct Detection {
  std::int64_t frame = 0;  // 1-based
  BBox bbox;
  double score = 0.0;
  std::optional<Embedding> embedding;
};

}  // namespace mot
