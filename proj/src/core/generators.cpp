#include "core/generators.hpp"

#include <array>
#include <cmath>

#include "core/rng.hpp"

namespace qrect {

GeneratedCloud cantor4(double lambda, int depth) {
  if (!(lambda > 0.0 && lambda < 0.5)) throw InvalidArgument("cantor4: lambda in (0, 1/2)");
  if (depth < 1) throw InvalidArgument("cantor4: depth >= 1");
  const double corners[4][2] = {{0, 0}, {1, 0}, {0, 1}, {1, 1}};
  std::vector<std::array<double, 2>> pts{{0.0, 0.0}};
  for (int level = 0; level < depth; ++level) {
    std::vector<std::array<double, 2>> next;
    next.reserve(pts.size() * 4);
    for (const auto& p : pts)
      for (const auto& c : corners)
        next.push_back({lambda * p[0] + (1.0 - lambda) * c[0], lambda * p[1] + (1.0 - lambda) * c[1]});
    pts = std::move(next);
  }
  Mat m(static_cast<Eigen::Index>(pts.size()), 2);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m(i, 0) = pts[static_cast<std::size_t>(i)][0];
    m(i, 1) = pts[static_cast<std::size_t>(i)][1];
  }
  GeneratedCloud out{PointCloud(std::move(m), ipow(lambda, depth) * std::sqrt(2.0)),
                     GroundTruth{std::log(4.0) / std::log(1.0 / lambda), true, "degenerate"}};
  return out;
}

GeneratedCloud koch(double ratio, int depth) {
  if (!(ratio >= 0.25 && ratio < 0.5)) throw InvalidArgument("koch: ratio in [1/4, 1/2)");
  if (depth < 1) throw InvalidArgument("koch: depth >= 1");
  // Generator on a unit segment: 0 -- A -- peak -- C -- 1 with all four edges
  // of length `ratio`.
  const double h2 = ratio * ratio - (0.5 - ratio) * (0.5 - ratio);
  const double h = h2 > 0.0 ? std::sqrt(h2) : 0.0;
  struct Seg {
    double ax, ay, bx, by;
  };
  std::vector<Seg> segs{{0.0, 0.0, 1.0, 0.0}};
  for (int level = 0; level < depth; ++level) {
    std::vector<Seg> next;
    next.reserve(segs.size() * 4);
    for (const Seg& s : segs) {
      const double dx = s.bx - s.ax, dy = s.by - s.ay;
      const double nx = -dy, ny = dx;  // left normal
      const double p1x = s.ax + ratio * dx, p1y = s.ay + ratio * dy;
      const double p3x = s.bx - ratio * dx, p3y = s.by - ratio * dy;
      const double p2x = s.ax + 0.5 * dx + h * nx, p2y = s.ay + 0.5 * dy + h * ny;
      next.push_back({s.ax, s.ay, p1x, p1y});
      next.push_back({p1x, p1y, p2x, p2y});
      next.push_back({p2x, p2y, p3x, p3y});
      next.push_back({p3x, p3y, s.bx, s.by});
    }
    segs = std::move(next);
  }
  Mat m(static_cast<Eigen::Index>(segs.size()) + 1, 2);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(segs.size()); ++i) {
    m(i, 0) = segs[static_cast<std::size_t>(i)].ax;
    m(i, 1) = segs[static_cast<std::size_t>(i)].ay;
  }
  m(static_cast<Eigen::Index>(segs.size()), 0) = segs.back().bx;
  m(static_cast<Eigen::Index>(segs.size()), 1) = segs.back().by;
  GeneratedCloud out{PointCloud(std::move(m), ipow(ratio, depth)),
                     GroundTruth{std::log(4.0) / std::log(1.0 / ratio), ratio > 0.25, "graph"}};
  return out;
}

GeneratedCloud lipschitz_graph(double L, int n_samples, std::uint64_t seed) {
  if (L < 0.0) throw InvalidArgument("lipschitz_graph: L >= 0");
  if (n_samples < 2) throw InvalidArgument("lipschitz_graph: need >= 2 samples");
  // Midpoint displacement on a dyadic grid fine enough for the requested
  // sample count, with displacements clamped so every segment slope stays
  // within L. Piecewise-linear interpolation then preserves the bound.
  int levels = 1;
  while ((1 << levels) < n_samples - 1) ++levels;
  const int grid_n = (1 << levels) + 1;
  std::vector<double> y(static_cast<std::size_t>(grid_n), 0.0);
  Rng rng(seed ^ 0xD1B54A32D192ED03ull);
  y.back() = rng.uniform(-0.5, 0.5) * L;
  for (int step = levels; step >= 1; --step) {
    const int stride = 1 << step;
    for (int left = 0; left + stride <= grid_n - 1; left += stride) {
      const int mid = left + stride / 2;
      const int right = left + stride;
      const double dx = static_cast<double>(stride) / (grid_n - 1);
      const double slope = (y[static_cast<std::size_t>(right)] - y[static_cast<std::size_t>(left)]) / dx;
      const double room = 0.9 * (L - std::abs(slope)) * dx / 4.0;
      const double disp = room > 0.0 ? rng.uniform(-room, room) : 0.0;
      y[static_cast<std::size_t>(mid)] =
          0.5 * (y[static_cast<std::size_t>(left)] + y[static_cast<std::size_t>(right)]) + disp;
    }
  }
  Mat m(n_samples, 2);
  for (int i = 0; i < n_samples; ++i) {
    const double x = static_cast<double>(i) / (n_samples - 1);
    const double g = x * (grid_n - 1);
    const int i0 = std::min(grid_n - 2, static_cast<int>(std::floor(g)));
    const double fr = g - i0;
    m(i, 0) = x;
    m(i, 1) = (1.0 - fr) * y[static_cast<std::size_t>(i0)] + fr * y[static_cast<std::size_t>(i0) + 1];
  }
  // Exhaustive Lipschitz verification over all pairs.
  for (int i = 0; i < n_samples; ++i)
    for (int j = i + 1; j < n_samples; ++j) {
      const double dx = std::abs(m(j, 0) - m(i, 0));
      const double dy = std::abs(m(j, 1) - m(i, 1));
      if (dy > L * dx + 1e-12) throw NumericError("lipschitz_graph: constant violated");
    }
  const double dx = 1.0 / (n_samples - 1);
  GeneratedCloud out{PointCloud(std::move(m), dx * std::sqrt(1.0 + L * L)),
                     GroundTruth{1.0, false, "graph"}};
  return out;
}

GeneratedCloud segment(int n_samples) {
  if (n_samples < 2) throw InvalidArgument("segment: need >= 2 samples");
  Mat m = Mat::Zero(n_samples, 2);
  for (int i = 0; i < n_samples; ++i) m(i, 0) = static_cast<double>(i) / (n_samples - 1);
  return GeneratedCloud{PointCloud(std::move(m), 1.0 / (n_samples - 1)),
                        GroundTruth{1.0, false, "full"}};
}

GeneratedCloud arc(double radius, double angle, int n_samples) {
  if (!(radius > 0.0)) throw InvalidArgument("arc: radius > 0");
  if (!(angle > 0.0 && angle <= 6.283185307179586)) throw InvalidArgument("arc: bad angle");
  if (n_samples < 2) throw InvalidArgument("arc: need >= 2 samples");
  Mat m(n_samples, 2);
  for (int i = 0; i < n_samples; ++i) {
    const double t = angle * i / (n_samples - 1);
    m(i, 0) = radius * std::cos(t);
    m(i, 1) = radius * std::sin(t);
  }
  return GeneratedCloud{PointCloud(std::move(m), radius * angle / (n_samples - 1)),
                        GroundTruth{1.0, false, "full"}};
}

GeneratedCloud product_with_segment(const GeneratedCloud& base, int samples) {
  if (samples < 2) throw InvalidArgument("product_with_segment: need >= 2 samples");
  const Mat& b = base.cloud.points();
  const int n = base.cloud.ambient_dim();
  Mat m(b.rows() * samples, n + 1);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (int j = 0; j < samples; ++j) {
      m.row(r).head(n) = b.row(i);
      m(r, n) = static_cast<double>(j) / (samples - 1);
      ++r;
    }
  const double res = std::hypot(base.cloud.resolution(), 1.0 / (samples - 1));
  GroundTruth t = base.truth;
  t.dimension += 1.0;
  return GeneratedCloud{PointCloud(std::move(m), res), t};
}

GeneratedCloud generate(const GeneratorSpec& spec) {
  GeneratedCloud g;
  if (spec.kind == "cantor4") {
    g = cantor4(spec.lambda, spec.depth);
  } else if (spec.kind == "koch") {
    g = koch(spec.ratio, spec.depth);
  } else if (spec.kind == "lipschitz_graph") {
    const int n = spec.count > 0 ? spec.count : (1 << spec.depth) + 1;
    g = lipschitz_graph(spec.lipschitz, n, spec.seed);
  } else if (spec.kind == "segment") {
    g = segment(spec.count > 0 ? spec.count : (1 << spec.depth) + 1);
  } else if (spec.kind == "arc") {
    g = arc(spec.radius, spec.angle, spec.count > 0 ? spec.count : (1 << spec.depth) + 1);
  } else {
    throw InvalidArgument("generate: unknown kind '" + spec.kind + "'");
  }
  if (spec.product_samples > 0) g = product_with_segment(g, spec.product_samples);
  return g;
}

}  // namespace qrect
