#ifndef QRECT_CORE_DYADIC_HPP
#define QRECT_CORE_DYADIC_HPP

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace qrect {

/// Half-open dyadic cube [idx_i * side, (idx_i + 1) * side)^n anchored at the
/// origin, side = 2^exponent.
struct DyadicCube {
  std::vector<std::int64_t> idx;
  int exponent = 0;

  double side() const { return std::exp2(exponent); }
  int ambient_dim() const { return static_cast<int>(idx.size()); }

  Vec lower_corner() const {
    Vec c(ambient_dim());
    for (int i = 0; i < ambient_dim(); ++i) c(i) = static_cast<double>(idx[static_cast<std::size_t>(i)]) * side();
    return c;
  }
  bool contains(const Vec& p) const {
    for (int i = 0; i < ambient_dim(); ++i)
      if (cell_index(p(i), side()) != idx[static_cast<std::size_t>(i)]) return false;
    return true;
  }
  bool operator==(const DyadicCube& o) const { return exponent == o.exponent && idx == o.idx; }
  bool operator<(const DyadicCube& o) const {
    if (exponent != o.exponent) return exponent < o.exponent;
    return idx < o.idx;
  }
};

/// The dyadic cubes of side c*2^-k (c = 2^-s0) that contain at least one
/// point of the set, sorted by index. This is Delta_{k,c} restricted to the
/// sample.
std::vector<DyadicCube> dyadic_cubes_meeting(const PointCloud& cloud, int k, double c);

/// One axis-aligned d-face of a dyadic cube in canonical (deduplicated) form:
/// `axes_mask` marks the d varying axes; `coord[i]` is the cell index along a
/// varying axis and the grid-line index along a fixed axis.
struct DyadicFace {
  std::uint32_t axes_mask = 0;
  std::vector<std::int64_t> coord;
  int exponent = 0;

  bool operator==(const DyadicFace& o) const {
    return axes_mask == o.axes_mask && exponent == o.exponent && coord == o.coord;
  }
  bool operator<(const DyadicFace& o) const {
    if (exponent != o.exponent) return exponent < o.exponent;
    if (axes_mask != o.axes_mask) return axes_mask < o.axes_mask;
    return coord < o.coord;
  }
};

/// Union of the d-skeletons of same-generation dyadic cubes. Faces shared by
/// adjacent cubes are counted once; the d-measure of the union is then exactly
/// face_count * side^d.
class SkeletonSet {
 public:
  SkeletonSet() = default;
  SkeletonSet(std::vector<DyadicFace> faces, int d, int ambient_dim);

  const std::vector<DyadicFace>& faces() const { return faces_; }
  int face_dim() const { return d_; }
  int ambient_dim() const { return n_; }
  double side() const { return faces_.empty() ? 0.0 : std::exp2(faces_.front().exponent); }
  double exact_measure() const;

  /// Grid sample of every face, spacing chosen so each face point lies within
  /// `resolution` of a sample. Duplicate samples on shared boundaries are
  /// removed.
  PointCloud sample(double resolution) const;

 private:
  std::vector<DyadicFace> faces_;
  int d_ = 0;
  int n_ = 0;
};

/// E_{R,k}-style skeleton union: the d-skeletons of the given cubes (all of
/// one generation), deduplicated.
SkeletonSet skeleton_union(const std::vector<DyadicCube>& cubes, int d);

/// Occupied-cell counts over dyadic scales, for box-counting.
std::vector<std::pair<double, std::size_t>> dyadic_cell_counts(const PointCloud& cloud,
                                                               double min_side, double max_side);

}  // namespace qrect

#endif
