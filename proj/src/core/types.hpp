#ifndef QRECT_CORE_TYPES_HPP
#define QRECT_CORE_TYPES_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qrect {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Thrown when a computation produces a non-finite value.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on malformed inputs or broken preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

inline double ipow(double x, int e) {
  // Repeated multiplication keeps power-of-two dilations bit-exact.
  if (e < 0) return 1.0 / ipow(x, -e);
  double r = 1.0;
  while (e-- > 0) r *= x;
  return r;
}

inline std::int64_t floor_div2(std::int64_t a) { return a >= 0 ? a / 2 : (a - 1) / 2; }

struct Int64VecHash {
  std::size_t operator()(const std::vector<std::int64_t>& k) const {
    std::size_t h = 1469598103934665603ull;
    for (std::int64_t v : k) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ull;
    }
    return h;
  }
};

/// Floor of x / 2^e as an integer cell index (half-open convention [i*s, (i+1)*s)).
inline std::int64_t cell_index(double x, double side) {
  return static_cast<std::int64_t>(std::floor(x / side));
}

/// Finite sample of a set E in R^n. `resolution` is the guaranteed sampling
/// density: every point of the idealized set lies within `resolution` of a
/// sample. Optional per-point weights turn the cloud into a discrete measure.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(Mat points, double resolution, std::vector<double> weights = {})
      : pts_(std::move(points)), resolution_(resolution), weights_(std::move(weights)) {
    validate();
  }

  const Mat& points() const { return pts_; }
  Eigen::Index size() const { return pts_.rows(); }
  int ambient_dim() const { return static_cast<int>(pts_.cols()); }
  double resolution() const { return resolution_; }
  bool has_weights() const { return !weights_.empty(); }
  const std::vector<double>& weights() const { return weights_; }
  Vec point(Eigen::Index i) const { return pts_.row(i).transpose(); }

  double weight(Eigen::Index i) const { return weights_.empty() ? 1.0 : weights_[static_cast<std::size_t>(i)]; }

  PointCloud subset(const std::vector<Eigen::Index>& idx) const {
    Mat m(static_cast<Eigen::Index>(idx.size()), pts_.cols());
    std::vector<double> w;
    if (has_weights()) w.reserve(idx.size());
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      m.row(r) = pts_.row(idx[static_cast<std::size_t>(r)]);
      if (has_weights()) w.push_back(weights_[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])]);
    }
    return PointCloud(std::move(m), resolution_, std::move(w));
  }

  double diameter() const {
    double best = 0.0;
    for (Eigen::Index i = 0; i < pts_.rows(); ++i)
      for (Eigen::Index j = i + 1; j < pts_.rows(); ++j)
        best = std::max(best, (pts_.row(i) - pts_.row(j)).norm());
    return best;
  }

 private:
  void validate() const {
    if (!(resolution_ > 0.0)) throw InvalidArgument("PointCloud: resolution must be > 0");
    if (!weights_.empty() && static_cast<Eigen::Index>(weights_.size()) != pts_.rows())
      throw InvalidArgument("PointCloud: weight count must match point count");
    for (double w : weights_)
      if (!(w >= 0.0)) throw InvalidArgument("PointCloud: weights must be >= 0");
    if (!pts_.allFinite()) throw InvalidArgument("PointCloud: non-finite coordinate");
  }

  Mat pts_;
  double resolution_ = 1.0;
  std::vector<double> weights_;
};

struct Ball {
  Vec center;
  double radius = 0.0;

  Ball() = default;
  Ball(Vec c, double r) : center(std::move(c)), radius(r) {
    if (!(radius > 0.0)) throw InvalidArgument("Ball: radius must be > 0");
  }
  bool contains(const Vec& p) const { return (p - center).norm() <= radius; }
};

/// Affine d-plane in R^n: base point plus an orthonormal frame (columns).
/// The linear part (the frame span) is the element of G(n,d); with the base
/// point it is an element of the affine Grassmannian A(n,d).
class AffinePlane {
 public:
  AffinePlane() = default;
  AffinePlane(Vec base, Mat frame) : base_(std::move(base)), frame_(std::move(frame)) {
    validate();
  }

  const Vec& base() const { return base_; }
  const Mat& frame() const { return frame_; }
  int ambient_dim() const { return static_cast<int>(base_.size()); }
  int dim() const { return static_cast<int>(frame_.cols()); }

  /// n x n orthogonal-projection matrix of the linear part.
  Mat projector() const { return frame_ * frame_.transpose(); }

  double distance_to(const Vec& p) const {
    Vec v = p - base_;
    return (v - frame_ * (frame_.transpose() * v)).norm();
  }

  static AffinePlane span_axes(int n, const std::vector<int>& axes, Vec base = Vec()) {
    Mat f = Mat::Zero(n, static_cast<Eigen::Index>(axes.size()));
    for (std::size_t i = 0; i < axes.size(); ++i) f(axes[i], static_cast<Eigen::Index>(i)) = 1.0;
    if (base.size() == 0) base = Vec::Zero(n);
    return AffinePlane(std::move(base), std::move(f));
  }

 private:
  void validate() const {
    const int n = static_cast<int>(base_.size());
    const int d = static_cast<int>(frame_.cols());
    if (frame_.rows() != n) throw InvalidArgument("AffinePlane: frame/base dimension mismatch");
    if (d < 1 || d > n - 1) throw InvalidArgument("AffinePlane: need 1 <= d <= n-1");
    Mat g = frame_.transpose() * frame_;
    if ((g - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
      throw InvalidArgument("AffinePlane: frame not orthonormal");
  }

  Vec base_;
  Mat frame_;
};

/// Bracketed estimate of the Hausdorff content H^d_inf. `value` is the exact
/// minimum over covers by dyadic cubes of side >= resolution_used; the true
/// content lies in [lower_bound, upper_bound] (dimensional factor n^{d/2}).
struct ContentEstimate {
  double value = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  double resolution_used = 0.0;
};

inline std::vector<Eigen::Index> points_in_ball_impl(const Mat& pts, const Vec& c, double r) {
  std::vector<Eigen::Index> out;
  const double r2 = r * r;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    if ((pts.row(i).transpose() - c).squaredNorm() <= r2) out.push_back(i);
  }
  return out;
}

/// Indices of cloud points inside a closed ball.
inline std::vector<Eigen::Index> points_in_ball(const PointCloud& cloud, const Ball& ball) {
  if (ball.center.size() != cloud.ambient_dim())
    throw InvalidArgument("points_in_ball: dimension mismatch");
  return points_in_ball_impl(cloud.points(), ball.center, ball.radius);
}

}  // namespace qrect

#endif
