#ifndef QRECT_CORE_FOREST_HPP
#define QRECT_CORE_FOREST_HPP

#include <functional>
#include <vector>

#include "core/dyadic.hpp"
#include "core/types.hpp"

namespace qrect {

/// Greedy maximal `sep`-separated net over the listed points, in the given
/// order (ties and ordering are by position in `candidates`). Returns the
/// chosen entries of `candidates`.
std::vector<Eigen::Index> maximal_separated_net(const PointCloud& cloud,
                                                const std::vector<Eigen::Index>& candidates,
                                                double sep);

/// Nested maximal rho^k-separated nets X_k, k = k_top .. k_max, with
/// X_k a prefix of X_{k+1} (greedy extension). k_top is the largest k with
/// rho^k > diam(cloud), so the top net is a single point and the hierarchy is
/// covariant under dilations by powers of 1/rho.
struct NetHierarchy {
  double rho = 0.25;
  int k_top = 0;
  std::vector<std::vector<Eigen::Index>> nets;  // nets[t] = X_{k_top + t}

  int k_max() const { return k_top + static_cast<int>(nets.size()) - 1; }
  const std::vector<Eigen::Index>& net(int k) const {
    return nets[static_cast<std::size_t>(k - k_top)];
  }
};

NetHierarchy build_net_hierarchy(const PointCloud& cloud, double rho, int k_max);

/// Christ-David cube: center point x_Q (a net point), generation k, side
/// ell(Q) = 5 rho^k, and the member sample points.
struct Cube {
  Eigen::Index center = 0;
  int gen = 0;
  double side = 0.0;  // ell(Q)
  std::vector<Eigen::Index> members;
  int parent = -1;
  std::vector<int> children;
};

struct CubeRef {
  int gen = 0;  // absolute generation
  int idx = 0;  // position within the generation
  bool operator==(const CubeRef& o) const { return gen == o.gen && idx == o.idx; }
  bool operator<(const CubeRef& o) const { return gen != o.gen ? gen < o.gen : idx < o.idx; }
};

/// Christ-David forest satisfying Thm 2.2(1)-(3): each generation partitions
/// the cloud, generations nest, and
///   B(x_Q, c0 * ell(Q)) ∩ cloud ⊆ Q ⊆ B(x_Q, ell(Q)).
/// The inner-ball constant c0 = (15/16)(1/2 - rho/(1-rho))/5 is guaranteed by
/// the nearest-ancestor construction whenever rho < 1/3 (so c0 = 1/32 at the
/// default rho = 1/4): a point within 5*c0*rho^k of a level-k net point has
/// its level-(k+1) ancestor strictly closer to that net point than to any
/// other, hence chains into its cube.
class CubeForest {
 public:
  static constexpr double kDefaultRho = 0.25;

  static CubeForest build(const PointCloud& cloud, double rho, int k_max);

  double rho() const { return rho_; }
  double c0() const { return c0_; }
  int k_top() const { return k_top_; }
  int k_max() const { return k_top_ + static_cast<int>(gens_.size()) - 1; }
  int generation_count() const { return static_cast<int>(gens_.size()); }

  const std::vector<Cube>& generation(int k) const {
    return gens_[static_cast<std::size_t>(k - k_top_)];
  }
  const Cube& cube(const CubeRef& ref) const {
    return gens_[static_cast<std::size_t>(ref.gen - k_top_)][static_cast<std::size_t>(ref.idx)];
  }
  CubeRef root() const { return CubeRef{k_top_, 0}; }

  Ball cube_ball(const PointCloud& cloud, const CubeRef& ref, double inflate = 1.0) const {
    const Cube& q = cube(ref);
    return Ball(cloud.point(q.center), inflate * q.side);
  }

  /// Thm 2.2(1)-(3) verification; returns a description of the first
  /// violation, empty if all axioms hold.
  std::string check_axioms(const PointCloud& cloud) const;

 private:
  double rho_ = kDefaultRho;
  double c0_ = 0.0;
  int k_top_ = 0;
  std::vector<std::vector<Cube>> gens_;
};

CubeForest build_christ_david(const PointCloud& cloud, double rho, int k_max);

/// Stopping-time region per Def 2.3: inclusion-convex, sibling-closed set of
/// cubes with top cube Q(S); F is its set of minimal cubes.
class StoppingRegion {
 public:
  StoppingRegion() = default;

  const CubeRef& top() const { return top_; }
  const std::vector<CubeRef>& cubes() const { return cubes_; }
  const std::vector<CubeRef>& minimal_cubes() const { return minimal_; }

  /// BFS from `top`; cubes where `stop` returns true (or that have no
  /// children) become minimal. Children are taken all-or-none, so sibling
  /// closure and inclusion-convexity hold by construction.
  static StoppingRegion build(const CubeForest& forest, const CubeRef& top,
                              const std::function<bool(const CubeForest&, const CubeRef&)>& stop);

  /// Region = the full subtree from `top` down to generation `gen_stop`.
  static StoppingRegion subtree(const CubeForest& forest, const CubeRef& top, int gen_stop);

  std::string check_axioms(const CubeForest& forest) const;

 private:
  CubeRef top_{};
  std::vector<CubeRef> cubes_;
  std::vector<CubeRef> minimal_;
};

/// d_T(x) = inf over minimal cubes Q of ( ell(Q) + dist(x, Q) ), the Whitney
/// distance of Lemma 3.2.
double region_dF(const PointCloud& cloud, const CubeForest& forest, const StoppingRegion& region,
                 const Vec& x);

struct WhitneyResult {
  std::vector<DyadicCube> cubes;  // disjoint dyadic cubes covering C0*B_T ∩ cloud
  SkeletonSet skeleton;           // E_T = union of their d-skeletons
  PointCloud sample;              // E_T sampled at the cloud resolution
};

/// Whitney-type skeleton approximant E_T (Lemma 3.2(2)): disjoint dyadic
/// cubes covering C0*B_T ∩ cloud with ell(I) ~ tau * inf_{x in I} d_T(x)
/// (clamped below at the cloud resolution), plus the union of their
/// d-skeletons.
WhitneyResult whitney_approximant(const PointCloud& cloud, const CubeForest& forest,
                                  const StoppingRegion& region, double tau, double c0_ball, int d);

struct CoronaPartition {
  std::vector<StoppingRegion> regions;
  double top_length_sum = 0.0;  // sum over region tops of ell(R)^d
};

/// Greedy partition of the subtree of q0 (down to generation k_stop) into
/// stopping-time regions driven by a per-cube stop predicate; the e:ADR-packing
/// diagnostic sum over tops of ell(R)^d is reported.
CoronaPartition corona_partition(const CubeForest& forest, const CubeRef& q0, int k_stop, int d,
                                 const std::function<bool(const CubeForest&, const CubeRef&)>& stop);

}  // namespace qrect

#endif
