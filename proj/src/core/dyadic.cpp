#include "core/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "core/geometry.hpp"

namespace qrect {

namespace {

int exponent_of_power_of_two(double c) {
  if (!(c > 0.0)) throw InvalidArgument("scale factor must be positive");
  const int e = static_cast<int>(std::lround(std::log2(c)));
  if (std::exp2(e) != c) throw InvalidArgument("scale factor c must be a power of two");
  return e;
}

}  // namespace

std::vector<DyadicCube> dyadic_cubes_meeting(const PointCloud& cloud, int k, double c) {
  const int ec = exponent_of_power_of_two(c);
  const int e = ec - k;  // side = c * 2^-k
  const double side = std::exp2(e);
  std::set<std::vector<std::int64_t>> cells;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    std::vector<std::int64_t> idx(static_cast<std::size_t>(cloud.ambient_dim()));
    for (int a = 0; a < cloud.ambient_dim(); ++a)
      idx[static_cast<std::size_t>(a)] = cell_index(cloud.points()(i, a), side);
    cells.insert(std::move(idx));
  }
  std::vector<DyadicCube> out;
  out.reserve(cells.size());
  for (const auto& idx : cells) out.push_back(DyadicCube{idx, e});
  return out;
}

SkeletonSet::SkeletonSet(std::vector<DyadicFace> faces, int d, int ambient_dim)
    : faces_(std::move(faces)), d_(d), n_(ambient_dim) {}

double SkeletonSet::exact_measure() const {
  // Faces are deduplicated; for a single-generation skeleton this equals
  // face_count * side^d exactly. Mixed generations (Whitney output) may still
  // overlap partially, making this an upper bound.
  double sum = 0.0;
  for (const DyadicFace& f : faces_) sum += ipow(std::exp2(f.exponent), d_);
  return sum;
}

PointCloud SkeletonSet::sample(double resolution) const {
  if (!(resolution > 0.0)) throw InvalidArgument("SkeletonSet::sample: resolution > 0");
  std::set<std::vector<double>> unique_pts;
  std::vector<int> axes;
  for (const DyadicFace& face : faces_) {
    const double s = std::exp2(face.exponent);
    // Spacing s/m with m chosen so that the covering radius of the grid on a
    // d-face, (s/m) * sqrt(d) / 2, stays below resolution.
    const int m =
        std::max(1, static_cast<int>(std::ceil(s * std::sqrt(static_cast<double>(d_)) / resolution)));
    axes.clear();
    for (int a = 0; a < n_; ++a)
      if (face.axes_mask & (1u << a)) axes.push_back(a);
    std::vector<double> base(static_cast<std::size_t>(n_));
    for (int a = 0; a < n_; ++a)
      base[static_cast<std::size_t>(a)] = static_cast<double>(face.coord[static_cast<std::size_t>(a)]) * s;
    // Grid over the d varying axes.
    std::vector<int> g(axes.size(), 0);
    for (;;) {
      std::vector<double> p = base;
      for (std::size_t j = 0; j < axes.size(); ++j)
        p[static_cast<std::size_t>(axes[j])] += s * (static_cast<double>(g[j]) / static_cast<double>(m));
      unique_pts.insert(std::move(p));
      std::size_t j = 0;
      while (j < g.size() && ++g[j] > m) g[j++] = 0;
      if (j == g.size()) break;
    }
  }
  Mat pts(static_cast<Eigen::Index>(unique_pts.size()), n_);
  Eigen::Index r = 0;
  for (const auto& p : unique_pts) {
    for (int a = 0; a < n_; ++a) pts(r, a) = p[static_cast<std::size_t>(a)];
    ++r;
  }
  return PointCloud(std::move(pts), resolution);
}

SkeletonSet skeleton_union(const std::vector<DyadicCube>& cubes, int d) {
  if (cubes.empty()) return SkeletonSet({}, d, 0);
  const int n = cubes.front().ambient_dim();
  if (d < 1 || d > n - 1) throw InvalidArgument("skeleton_union: need 1 <= d <= n-1");
  if (n > 31) throw InvalidArgument("skeleton_union: ambient dimension too large");
  const int e = cubes.front().exponent;
  for (const auto& cb : cubes)
    if (cb.exponent != e || cb.ambient_dim() != n)
      throw InvalidArgument("skeleton_union: cubes must share one generation");

  // Choose the d varying axes, then a 0/1 side for each fixed axis.
  std::vector<std::uint32_t> masks;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    if (__builtin_popcount(mask) == d) masks.push_back(mask);

  std::set<DyadicFace> faces;
  for (const auto& cb : cubes) {
    for (std::uint32_t mask : masks) {
      std::vector<int> fixed_axes;
      for (int a = 0; a < n; ++a)
        if (!(mask & (1u << a))) fixed_axes.push_back(a);
      const int nf = static_cast<int>(fixed_axes.size());
      for (std::uint32_t bits = 0; bits < (1u << nf); ++bits) {
        DyadicFace f;
        f.axes_mask = mask;
        f.exponent = e;
        f.coord = cb.idx;
        for (int j = 0; j < nf; ++j)
          if (bits & (1u << j)) f.coord[static_cast<std::size_t>(fixed_axes[static_cast<std::size_t>(j)])] += 1;
        faces.insert(std::move(f));
      }
    }
  }
  return SkeletonSet(std::vector<DyadicFace>(faces.begin(), faces.end()), d, n);
}

std::vector<std::pair<double, std::size_t>> dyadic_cell_counts(const PointCloud& cloud,
                                                               double min_side, double max_side) {
  if (!(min_side > 0.0 && max_side >= min_side))
    throw InvalidArgument("dyadic_cell_counts: bad scale range");
  const int e_lo = detail::dyadic_exponent_at_least(min_side);
  int e_hi = e_lo;
  while (std::exp2(e_hi + 1) <= max_side) ++e_hi;
  std::vector<std::pair<double, std::size_t>> out;
  for (int e = e_lo; e <= e_hi; ++e) {
    const double side = std::exp2(e);
    std::set<std::vector<std::int64_t>> cells;
    for (Eigen::Index i = 0; i < cloud.size(); ++i) {
      std::vector<std::int64_t> idx(static_cast<std::size_t>(cloud.ambient_dim()));
      for (int a = 0; a < cloud.ambient_dim(); ++a)
        idx[static_cast<std::size_t>(a)] = cell_index(cloud.points()(i, a), side);
      cells.insert(std::move(idx));
    }
    out.emplace_back(side, cells.size());
  }
  return out;
}

}  // namespace qrect
