#include "motkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace mot {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t line,
                       const std::string& message) {
  throw IoError(path.string() + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_whitespace(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

bool parse_double(const std::string& tok, double& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool parse_int(const std::string& tok, std::int64_t& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  while (first != last && (*first == ' ' || *first == '\t')) ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(path.string() + ": cannot open for reading");
  }
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError(path.string() + ": cannot open for writing");
  }
  return out;
}

}  // namespace

std::vector<MotRow> read_mot(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<MotRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (blank(line)) continue;
    const std::vector<std::string> f = split(line, ',');
    if (f.size() != 10) {
      fail(path, lineno, "expected 10 comma-separated fields, got " +
                             std::to_string(f.size()));
    }
    std::int64_t frame = 0;
    std::int64_t id = 0;
    double left, top, w, h, conf;
    if (!parse_int(f[0], frame)) fail(path, lineno, "bad frame field");
    if (!parse_int(f[1], id)) fail(path, lineno, "bad id field");
    if (!parse_double(f[2], left)) fail(path, lineno, "bad bb_left field");
    if (!parse_double(f[3], top)) fail(path, lineno, "bad bb_top field");
    if (!parse_double(f[4], w)) fail(path, lineno, "bad bb_width field");
    if (!parse_double(f[5], h)) fail(path, lineno, "bad bb_height field");
    if (!parse_double(f[6], conf)) fail(path, lineno, "bad conf field");
    double ignored;
    for (int k = 7; k < 10; ++k) {
      if (!parse_double(f[static_cast<std::size_t>(k)], ignored)) {
        fail(path, lineno, "bad world coordinate field");
      }
    }
    if (frame < 1) fail(path, lineno, "frame must be >= 1");
    if (!(std::isfinite(left) && std::isfinite(top))) {
      fail(path, lineno, "non-finite box coordinate");
    }
    if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h)) {
      fail(path, lineno, "non-positive box width/height");
    }
    if (!std::isfinite(conf)) fail(path, lineno, "non-finite confidence");
    rows.push_back({frame, id, BBox(left, top, left + w, top + h), conf});
  }
  return rows;
}

void write_mot(std::vector<MotRow> rows, const std::filesystem::path& path) {
  // Stable: rows with equal (frame, id) keys keep their emission order, which
  // is what the embedding sidecar's (frame, ordinal) keys refer to.
  std::stable_sort(rows.begin(), rows.end(),
                   [](const MotRow& a, const MotRow& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return a.id < b.id;
                   });
  std::ofstream out = open_out(path);
  for (const MotRow& r : rows) {
    out << r.frame << ',' << r.id << ',' << format_double(r.bbox.x1) << ','
        << format_double(r.bbox.y1) << ',' << format_double(r.bbox.width())
        << ',' << format_double(r.bbox.height()) << ','
        << format_double(r.score) << ",-1,-1,-1\n";
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<KittiRow> read_kitti(const std::filesystem::path& path,
                                 const std::string& type_filter) {
  std::ifstream in = open_in(path);
  std::vector<KittiRow> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (blank(line)) continue;
    const std::vector<std::string> f = split_whitespace(line);
    if (f.size() != 17 && f.size() != 18) {
      fail(path, lineno, "expected 17 or 18 space-separated fields, got " +
                             std::to_string(f.size()));
    }
    std::int64_t frame = 0;
    std::int64_t id = 0;
    if (!parse_int(f[0], frame)) fail(path, lineno, "bad frame field");
    if (!parse_int(f[1], id)) fail(path, lineno, "bad track id field");
    if (frame < 0) fail(path, lineno, "frame must be >= 0");
    const std::string& type = f[2];
    double vals[15];
    for (std::size_t k = 3; k < f.size(); ++k) {
      if (!parse_double(f[k], vals[k - 3]) || !std::isfinite(vals[k - 3])) {
        fail(path, lineno, "bad numeric field " + std::to_string(k + 1));
      }
    }
    if (type != type_filter) continue;
    const double left = vals[3], top = vals[4], right = vals[5],
                 bottom = vals[6];
    if (!(right > left) || !(bottom > top)) {
      fail(path, lineno, "degenerate box (requires right > left, bottom > top)");
    }
    KittiRow row{frame + 1,
                 id,
                 type,
                 vals[0],
                 vals[1],
                 vals[2],
                 BBox(left, top, right, bottom),
                 vals[7],
                 vals[8],
                 vals[9],
                 vals[10],
                 vals[11],
                 vals[12],
                 vals[13],
                 f.size() == 18 ? vals[14] : 1.0};
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_kitti(std::vector<KittiRow> rows,
                 const std::filesystem::path& path) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const KittiRow& a, const KittiRow& b) {
                     if (a.frame != b.frame) return a.frame < b.frame;
                     return a.id < b.id;
                   });
  std::ofstream out = open_out(path);
  for (const KittiRow& r : rows) {
    out << (r.frame - 1) << ' ' << r.id << ' ' << r.type << ' '
        << format_double(r.truncated) << ' ' << format_double(r.occluded)
        << ' ' << format_double(r.alpha) << ' ' << format_double(r.bbox.x1)
        << ' ' << format_double(r.bbox.y1) << ' ' << format_double(r.bbox.x2)
        << ' ' << format_double(r.bbox.y2) << ' ' << format_double(r.height3d)
        << ' ' << format_double(r.width3d) << ' ' << format_double(r.length3d)
        << ' ' << format_double(r.x3d) << ' ' << format_double(r.y3d) << ' '
        << format_double(r.z3d) << ' ' << format_double(r.rotation_y) << ' '
        << format_double(r.score) << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

namespace {

nlohmann::json parse_json_line(const std::filesystem::path& path,
                               std::size_t lineno, const std::string& line) {
  nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
  if (j.is_discarded()) fail(path, lineno, "invalid JSON");
  return j;
}

std::vector<double> embedding_values(const std::filesystem::path& path,
                                     std::size_t lineno,
                                     const nlohmann::json& j) {
  if (!j.contains("embedding") || !j["embedding"].is_array() ||
      j["embedding"].empty()) {
    fail(path, lineno, "missing or empty embedding array");
  }
  std::vector<double> values;
  values.reserve(j["embedding"].size());
  for (const auto& v : j["embedding"]) {
    if (!v.is_number()) fail(path, lineno, "non-numeric embedding component");
    values.push_back(v.get<double>());
  }
  return values;
}

}  // namespace

EmbeddingMap read_embeddings(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  EmbeddingMap out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (blank(line)) continue;
    const nlohmann::json j = parse_json_line(path, lineno, line);
    if (!j.contains("frame") || !j["frame"].is_number_integer() ||
        !j.contains("index") || !j["index"].is_number_integer()) {
      fail(path, lineno, "missing integer frame/index fields");
    }
    const std::int64_t frame = j["frame"].get<std::int64_t>();
    const std::int64_t index = j["index"].get<std::int64_t>();
    if (frame < 1) fail(path, lineno, "frame must be >= 1");
    if (index < 0) fail(path, lineno, "index must be >= 0");
    std::vector<double> values = embedding_values(path, lineno, j);
    if (dim == 0) {
      dim = values.size();
    } else if (values.size() != dim) {
      fail(path, lineno,
           "embedding dimension " + std::to_string(values.size()) +
               " differs from " + std::to_string(dim));
    }
    if (out.count({frame, index})) {
      fail(path, lineno, "duplicate (frame, index) record");
    }
    try {
      out.emplace(std::make_pair(frame, index),
                  Embedding::normalized(std::move(values)));
    } catch (const std::invalid_argument& e) {
      fail(path, lineno, e.what());
    }
  }
  return out;
}

void write_embeddings(const EmbeddingMap& embeddings,
                      const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (const auto& [key, emb] : embeddings) {
    nlohmann::json j;
    j["frame"] = key.first;
    j["index"] = key.second;
    j["embedding"] = emb.values();
    out << j.dump() << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<LabeledInstance> read_labeled_embeddings(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<LabeledInstance> out;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip_cr(line);
    if (blank(line)) continue;
    const nlohmann::json j = parse_json_line(path, lineno, line);
    if (!j.contains("frame") || !j["frame"].is_number_integer() ||
        !j.contains("identity") || !j["identity"].is_number_integer()) {
      fail(path, lineno, "missing integer frame/identity fields");
    }
    const std::int64_t frame = j["frame"].get<std::int64_t>();
    const std::int64_t identity = j["identity"].get<std::int64_t>();
    if (frame < 1) fail(path, lineno, "frame must be >= 1");
    std::vector<double> values = embedding_values(path, lineno, j);
    if (dim == 0) {
      dim = values.size();
    } else if (values.size() != dim) {
      fail(path, lineno,
           "embedding dimension " + std::to_string(values.size()) +
               " differs from " + std::to_string(dim));
    }
    try {
      out.push_back(
          {Embedding::normalized(std::move(values)), identity, frame});
    } catch (const std::invalid_argument& e) {
      fail(path, lineno, e.what());
    }
  }
  return out;
}

void write_labeled_embeddings(const std::vector<LabeledInstance>& stream,
                              const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  for (const LabeledInstance& item : stream) {
    nlohmann::json j;
    j["frame"] = item.frame;
    j["identity"] = item.identity;
    j["embedding"] = item.embedding.values();
    out << j.dump() << '\n';
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

DetectionStream assemble_detections(const std::vector<MotRow>& rows,
                                    const EmbeddingMap* embeddings,
                                    bool require_embeddings) {
  if (require_embeddings && embeddings == nullptr) {
    throw IoError("detections require an embedding sidecar");
  }
  DetectionStream out;
  std::map<std::int64_t, std::int64_t> ordinal;
  for (const MotRow& row : rows) {
    Detection det{row.frame, row.bbox, row.score, std::nullopt};
    const std::int64_t index = ordinal[row.frame]++;
    if (embeddings != nullptr) {
      const auto it = embeddings->find({row.frame, index});
      if (it != embeddings->end()) {
        det.embedding = it->second;
      } else if (require_embeddings) {
        throw IoError("no embedding record for frame " +
                      std::to_string(row.frame) + " detection " +
                      std::to_string(index));
      }
    }
    out[row.frame].push_back(std::move(det));
  }
  return out;
}

TrackFile track_file_from_mot(const std::vector<MotRow>& rows) {
  TrackFile out;
  for (const MotRow& row : rows) {
    out[row.frame].push_back({row.id, row.bbox});
  }
  return out;
}

TrackFile track_file_from_kitti(const std::vector<KittiRow>& rows) {
  TrackFile out;
  for (const KittiRow& row : rows) {
    out[row.frame].push_back({row.id, row.bbox});
  }
  return out;
}

}  // namespace mot
