#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mot {

/// Axis-aligned box in pixel coordinates, (x1,y1) top-left, (x2,y2)
/// bottom-right. Construction rejects degenerate or non-finite boxes, so a
/// BBox always has strictly positive area.
struct BBox {
  double x1;
  double y1;
  double x2;
  double y2;

  BBox(double x1_, double y1_, double x2_, double y2_)
      : x1(x1_), y1(y1_), x2(x2_), y2(y2_) {
    if (!(std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
          std::isfinite(y2))) {
      throw std::invalid_argument("BBox: coordinates must be finite");
    }
    if (!(x2 > x1 && y2 > y1)) {
      throw std::invalid_argument("BBox: requires x2 > x1 and y2 > y1");
    }
  }

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return (x2 - x1) * (y2 - y1); }

  bool operator==(const BBox& other) const = default;
};

/// Intersection-over-union. Half-open real rectangles, no "+1" pixel
/// convention: area = (x2-x1)*(y2-y1). Returns 0 for disjoint boxes,
/// exactly 1 for identical ones.
inline double iou(const BBox& a, const BBox& b) {
  const double ix1 = std::max(a.x1, b.x1);
  const double iy1 = std::max(a.y1, b.y1);
  const double ix2 = std::min(a.x2, b.x2);
  const double iy2 = std::min(a.y2, b.y2);

  const double iw = std::max(0.0, ix2 - ix1);
  const double ih = std::max(0.0, iy2 - iy1);
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return inter / uni;
}

/// Jaccard distance, the position term of the association cost.
inline double iou_distance(const BBox& a, const BBox& b) {
  return 1.0 - iou(a, b);
}

}  // namespace mot
