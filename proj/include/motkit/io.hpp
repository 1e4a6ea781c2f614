#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "motkit/bbox.hpp"
#include "motkit/detection.hpp"
#include "motkit/embed.hpp"

namespace mot {

/// Parse or write failure. Messages are anchored to "<path>:<line>".
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One MOT-Challenge CSV row in corner form. World coordinates are not
/// retained; they are written back as -1.
struct MotRow {
  std::int64_t frame;  // 1-based
  std::int64_t id;     // -1 for raw detections
  BBox bbox;
  double score;
};

/// Parses `frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y,z` rows,
/// converting width/height to the corner form. Rejects malformed lines and
/// non-positive box dimensions with a line-anchored IoError.
std::vector<MotRow> read_mot(const std::filesystem::path& path);

/// Inverse of read_mot. Rows are written sorted by frame then id, floats
/// with shortest round-trip precision.
void write_mot(std::vector<MotRow> rows, const std::filesystem::path& path);

/// One KITTI tracking row. Frames are 1-based internally; the on-disk format
/// is 0-based and shifted at this boundary.
struct KittiRow {
  std::int64_t frame;  // 1-based internally
  std::int64_t id;
  std::string type;
  double truncated;
  double occluded;
  double alpha;
  BBox bbox;  // left/top/right/bottom, direct corner form
  double height3d, width3d, length3d;
  double x3d, y3d, z3d;
  double rotation_y;
  double score;
};

/// Parses space-separated KITTI tracking rows, keeping only `type_filter`
/// rows (default "Car"; DontCare regions are dropped by the filter). The
/// trailing score column is optional and defaults to 1.
std::vector<KittiRow> read_kitti(const std::filesystem::path& path,
                                 const std::string& type_filter = "Car");

/// Inverse of read_kitti for rows that pass the filter used on read.
void write_kitti(std::vector<KittiRow> rows, const std::filesystem::path& path);

/// Embedding sidecar: JSON Lines, one record per detection,
/// {"frame": int, "index": int, "embedding": [..]}. The index is the
/// ordinal of the detection within its frame's list. Vectors are
/// L2-normalized on ingest; zero norms, dimension mismatches and duplicate
/// (frame, index) keys are rejected.
using EmbeddingMap = std::map<std::pair<std::int64_t, std::int64_t>, Embedding>;

EmbeddingMap read_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingMap& embeddings,
                      const std::filesystem::path& path);

/// Identity-labeled embedding stream: JSON Lines
/// {"frame": int, "identity": int, "embedding": [..]}, used by the triplet
/// mining report.
std::vector<LabeledInstance> read_labeled_embeddings(
    const std::filesystem::path& path);
void write_labeled_embeddings(const std::vector<LabeledInstance>& stream,
                              const std::filesystem::path& path);

/// Detections grouped by frame, ordered.
using DetectionStream = std::map<std::int64_t, std::vector<Detection>>;

/// Joins detection rows with their sidecar embeddings by (frame, ordinal).
/// With require_embeddings set, a detection without an embedding record is
/// an error; otherwise embeddings are attached where present.
DetectionStream assemble_detections(const std::vector<MotRow>& rows,
                                    const EmbeddingMap* embeddings,
                                    bool require_embeddings);

/// A per-frame set of identity-labeled boxes (ground truth or hypotheses).
struct TrackedBox {
  std::int64_t id;
  BBox bbox;
};
using TrackFile = std::map<std::int64_t, std::vector<TrackedBox>>;

TrackFile track_file_from_mot(const std::vector<MotRow>& rows);
TrackFile track_file_from_kitti(const std::vector<KittiRow>& rows);

}  // namespace mot
