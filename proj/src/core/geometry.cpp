#include "core/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "core/rng.hpp"

namespace qrect {

PointCloud project(const PointCloud& cloud, const AffinePlane& v) {
  if (cloud.ambient_dim() != v.ambient_dim())
    throw InvalidArgument("project: ambient dimension mismatch");
  Mat out = (cloud.points().rowwise() - v.base().transpose()) * v.frame();
  return PointCloud(std::move(out), cloud.resolution(),
                    cloud.has_weights() ? cloud.weights() : std::vector<double>{});
}

double grassmannian_distance(const AffinePlane& v, const AffinePlane& w) {
  if (v.ambient_dim() != w.ambient_dim() || v.dim() != w.dim())
    throw InvalidArgument("grassmannian_distance: dimension mismatch");
  Mat diff = v.projector() - w.projector();
  Eigen::SelfAdjointEigenSolver<Mat> es(diff);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

Mat orthonormalize(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ() * Mat::Identity(m.rows(), m.cols());
  // Fix signs so the result is a continuous function of the input.
  Mat r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

/// Orthonormal basis of the orthogonal complement of plane's linear part.
Mat complement_frame(const AffinePlane& v) {
  const int n = v.ambient_dim();
  Eigen::FullPivHouseholderQR<Mat> qr(v.frame());
  Mat q = qr.matrixQ();
  return q.rightCols(n - v.dim());
}

}  // namespace

std::vector<AffinePlane> sample_plane_ball(const AffinePlane& v0, double eps, int count,
                                           std::uint64_t seed) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("sample_plane_ball: need 0 < eps <= 1");
  if (count < 1) throw InvalidArgument("sample_plane_ball: count >= 1");
  std::vector<AffinePlane> out;
  out.reserve(static_cast<std::size_t>(count));
  out.push_back(v0);
  const int n = v0.ambient_dim();
  const int d = v0.dim();
  Mat nfr = complement_frame(v0);
  Rng rng(seed);
  while (static_cast<int>(out.size()) < count) {
    Mat a(n - d, d);
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = rng.normal();
    const double norm = a.norm();
    if (norm == 0.0) continue;
    // Tilt of size ~eps, halved until the Grassmannian distance fits.
    double t = eps / norm;
    for (int tries = 0; tries < 200; ++tries) {
      Mat frame = orthonormalize(v0.frame() + nfr * (t * a));
      AffinePlane w(v0.base(), frame);
      if (grassmannian_distance(v0, w) <= eps) {
        out.push_back(std::move(w));
        break;
      }
      t *= 0.5;
    }
  }
  return out;
}

namespace detail {

int dyadic_exponent_at_least(double x) {
  if (!(x > 0.0)) throw InvalidArgument("dyadic exponent of non-positive value");
  int e = static_cast<int>(std::ceil(std::log2(x)));
  while (std::exp2(e) < x) ++e;
  while (e > -1060 && std::exp2(e - 1) >= x) --e;
  return e;
}

DyadicCoverDP::DyadicCoverDP(int ambient_dim, int d, int e_min, int e_max)
    : n_(ambient_dim), d_(d), e_min_(e_min), e_max_(e_max) {
  if (e_max_ < e_min_) e_max_ = e_min_;
  const int nlevels = e_max_ - e_min_ + 1;
  levels_.resize(static_cast<std::size_t>(nlevels));
  diam_d_.resize(static_cast<std::size_t>(nlevels));
  const double sqrt_n = std::sqrt(static_cast<double>(n_));
  for (int l = 0; l < nlevels; ++l)
    diam_d_[static_cast<std::size_t>(l)] = ipow(std::exp2(e_min_ + l) * sqrt_n, d_);
}

void DyadicCoverDP::insert(const Vec& p) {
  std::vector<std::int64_t> key(static_cast<std::size_t>(n_));
  const double side = std::exp2(e_min_);
  for (int i = 0; i < n_; ++i) key[static_cast<std::size_t>(i)] = cell_index(p(i), side);

  // Walk the leaf-to-top path, propagating the cost delta.
  double delta = 0.0;
  for (int l = 0; l <= e_max_ - e_min_; ++l) {
    auto& node = levels_[static_cast<std::size_t>(l)][key];
    const double old_cost = node.present ? node.cost : 0.0;
    if (l == 0) {
      node.cost = diam_d_[0];  // occupied leaf: one smallest cube
    } else {
      node.child_sum += delta;
      node.cost = std::min(diam_d_[static_cast<std::size_t>(l)], node.child_sum);
    }
    node.present = true;
    delta = node.cost - old_cost;
    if (l < e_max_ - e_min_) {
      if (delta == 0.0 && node.present) {
        // No change propagates further; parents already account for this subtree.
        return;
      }
      for (auto& v : key) v = floor_div2(v);
    }
  }
  total_ += delta;
}

}  // namespace detail

namespace {

/// Picks a top level so high that merging distinct top cubes can never pay
/// off: a merged cube's diam^d exceeds any achievable total below it.
int top_exponent(const PointCloud& cloud, int e_min) {
  double max_abs = 1.0;
  const Mat& pts = cloud.points();
  if (pts.rows() > 0) max_abs = std::max(1.0, pts.cwiseAbs().maxCoeff());
  int e = detail::dyadic_exponent_at_least(4.0 * (max_abs + 1.0));
  return std::max(e, e_min + 1);
}

}  // namespace

ContentEstimate hausdorff_content(const PointCloud& cloud, int d, double min_scale) {
  if (d < 1) throw InvalidArgument("hausdorff_content: d >= 1");
  ContentEstimate est;
  est.resolution_used = min_scale;
  if (cloud.size() == 0) return est;
  if (!(min_scale >= cloud.resolution()))
    throw InvalidArgument("hausdorff_content: min_scale must be >= cloud resolution");
  const int e_min = detail::dyadic_exponent_at_least(min_scale);
  const int e_max = top_exponent(cloud, e_min);
  detail::DyadicCoverDP dp(cloud.ambient_dim(), d, e_min, e_max);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) dp.insert(cloud.point(i));
  est.value = dp.total();
  est.upper_bound = est.value;
  est.lower_bound = est.value / std::pow(static_cast<double>(cloud.ambient_dim()), d / 2.0);
  return est;
}

double choquet_integral(const PointCloud& cloud, const std::vector<double>& f, int d, double p,
                        double min_scale) {
  if (p < 1.0) throw InvalidArgument("choquet_integral: p >= 1 required");
  if (static_cast<Eigen::Index>(f.size()) != cloud.size())
    throw InvalidArgument("choquet_integral: f size mismatch");
  for (double v : f)
    if (!(v >= 0.0) || !std::isfinite(v)) throw InvalidArgument("choquet_integral: f must be finite and >= 0");
  if (cloud.size() == 0) return 0.0;
  if (!(min_scale >= cloud.resolution()))
    throw InvalidArgument("choquet_integral: min_scale must be >= cloud resolution");

  // Sort points by f descending; the superlevel set {f >= t_i} is a prefix.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(cloud.size()));
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<Eigen::Index>(i);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return f[static_cast<std::size_t>(a)] > f[static_cast<std::size_t>(b)];
  });

  const int e_min = detail::dyadic_exponent_at_least(min_scale);
  const int e_max = top_exponent(cloud, e_min);
  detail::DyadicCoverDP dp(cloud.ambient_dim(), d, e_min, e_max);

  // Thresholds descending with the content of each superlevel set.
  std::vector<double> thresholds;
  std::vector<double> contents;
  std::size_t i = 0;
  while (i < order.size()) {
    const double t = f[static_cast<std::size_t>(order[i])];
    if (t <= 0.0) break;
    while (i < order.size() && f[static_cast<std::size_t>(order[i])] == t) {
      dp.insert(cloud.point(order[i]));
      ++i;
    }
    thresholds.push_back(t);
    contents.push_back(dp.total());
  }

  // Layer cake, ascending thresholds: sum H_i (t_i^p - t_{i-1}^p) / p.
  double integral = 0.0;
  double t_prev = 0.0;
  for (std::size_t j = thresholds.size(); j-- > 0;) {
    const double t = thresholds[j];
    integral += contents[j] * (std::pow(t, p) - std::pow(t_prev, p)) / p;
    t_prev = t;
  }
  return integral;
}

}  // namespace qrect
