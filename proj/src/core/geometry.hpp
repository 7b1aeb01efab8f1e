#ifndef QRECT_CORE_GEOMETRY_HPP
#define QRECT_CORE_GEOMETRY_HPP

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "core/types.hpp"

namespace qrect {

/// Orthogonal projection onto V: output coordinates are <p - base, frame_i>.
/// The result lives in R^d; resolution carries over (projections are
/// 1-Lipschitz).
PointCloud project(const PointCloud& cloud, const AffinePlane& v);

/// d_G(V, W) = ||pi_V - pi_W||_op on the linear parts. Symmetric, in [0, 1].
double grassmannian_distance(const AffinePlane& v, const AffinePlane& w);

/// `count` planes W with d_G(V0, W) <= eps, V0 itself first. Deterministic
/// given seed.
std::vector<AffinePlane> sample_plane_ball(const AffinePlane& v0, double eps, int count,
                                           std::uint64_t seed);

/// Exact minimum of sum diam(I)^d over covers of the cloud by half-open
/// dyadic cubes of side >= min_scale (cubes anchored at the origin), by
/// bottom-up dynamic programming on the dyadic tree. The true H^d_inf lies
/// within the documented dimensional bracket.
ContentEstimate hausdorff_content(const PointCloud& cloud, int d, double min_scale);

/// p-Choquet integral of f against H^d_inf over the cloud, paper convention:
/// integral_0^inf H^d_inf({f > t}) t^{p-1} dt, evaluated exactly as a layer
/// cake over the finitely many distinct values of f.
double choquet_integral(const PointCloud& cloud, const std::vector<double>& f, int d, double p,
                        double min_scale);

namespace detail {

/// Smallest integer e with 2^e >= x (x > 0).
int dyadic_exponent_at_least(double x);

/// Incremental cover DP over the dyadic tree. Points are inserted one at a
/// time; total() is the exact minimal dyadic-cover cost of the inserted set,
/// with cube sides restricted to [2^e_min, 2^e_max]. Cost of a node is
/// min(diam^d, sum of children costs); occupied leaves cost diam^d.
class DyadicCoverDP {
 public:
  DyadicCoverDP(int ambient_dim, int d, int e_min, int e_max);

  void insert(const Vec& p);
  double total() const { return total_; }

 private:
  struct Node {
    double cost = 0.0;
    double child_sum = 0.0;
    bool present = false;
  };
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& k) const {
      std::size_t h = 1469598103934665603ull;
      for (std::int64_t v : k) {
        h ^= static_cast<std::size_t>(v);
        h *= 1099511628211ull;
      }
      return h;
    }
  };

  int n_;
  int d_;
  int e_min_;
  int e_max_;
  std::vector<double> diam_d_;  // diam^d per level offset
  std::vector<std::unordered_map<std::vector<std::int64_t>, Node, KeyHash>> levels_;
  double total_ = 0.0;
};

}  // namespace detail

}  // namespace qrect

#endif
