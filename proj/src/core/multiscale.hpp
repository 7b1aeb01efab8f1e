#ifndef QRECT_CORE_MULTISCALE_HPP
#define QRECT_CORE_MULTISCALE_HPP

#include <optional>
#include <string>
#include <vector>

#include "core/dyadic.hpp"
#include "core/forest.hpp"
#include "core/types.hpp"

namespace qrect {

struct TSTLedgerEntry {
  int gen = 0;
  int idx = 0;
  double ell = 0.0;
  double beta = 0.0;
  double contribution = 0.0;  // beta^2 * ell^d
};

struct TSTGenerationStat {
  int gen = 0;
  double ell = 0.0;
  int count = 0;
  double beta_min = 0.0;
  double beta_mean = 0.0;
  double beta_max = 0.0;
  double sum_contribution = 0.0;
};

/// Both sides of the Analyst's-TST comparison diam(Q0)^d + beta(Q0) vs the
/// d-measure of Q0, with the per-cube ledger that the sum is the exact
/// bookkeeping of.
struct TSTReport {
  double beta_sum = 0.0;
  double diam_term = 0.0;
  double measure_proxy = 0.0;
  double measure_lower = 0.0;
  double measure_upper = 0.0;
  std::string proxy_kind;  // "content-bracket" or "skeleton-exact"
  double ratio_lower = 0.0;
  double ratio_upper = 0.0;
  int d = 1;
  double p = 2.0;
  double inflate = 3.0;  // C0
  double min_scale = 0.0;
  std::vector<TSTLedgerEntry> ledger;
  std::vector<TSTGenerationStat> per_generation;
};

/// beta(Q0) = sum over Q in D(Q0) with ell(Q) >= max(min_scale, resolution)
/// of beta_content_p(C0 B_Q)^2 ell(Q)^d. `exact_measure` substitutes the
/// skeleton face-measure for the content bracket when the cloud samples a
/// skeleton set.
TSTReport tst_sum(const PointCloud& cloud, const CubeForest& forest, const CubeRef& q0, int d,
                  double p, double inflate, double min_scale,
                  std::optional<double> exact_measure = std::nullopt);

/// Tree-restricted beta sum of e:TreeEst: sum over the region's cubes of
/// beta_content_p(3 B_Q)^2 ell(Q)^d.
double tree_beta_sum(const PointCloud& cloud, const CubeForest& forest,
                     const StoppingRegion& region, int d, double p, double min_scale);

/// Uniform non-flatness floor: min over a deterministic family of balls
/// (net-point centers, dyadic radii spanning [r_min, r_max]) of
/// beta_content_p(B, p = 1).
double nonflatness_scan(const PointCloud& cloud, int d, double r_min, double r_max,
                        int ball_density);

struct FrostmanNode {
  DyadicCube cube;
  int level = 0;   // 0 = root
  double mu = 0.0;
  int card_a = 0;  // net cardinality Card(A) that produced this node's children
  int parent = -1;
  std::vector<int> children;
};

/// The recursive net hierarchy S_0, S_1, ... of the dimension machine, with
/// the equal-splitting Frostman measure on it.
struct FrostmanTree {
  std::vector<FrostmanNode> nodes;  // nodes[0] is the root
  int kappa = 1;
  int levels = 0;
  double c = 1.0;
  int n0 = 0;             // dyadic level of the root cube
  double root_side = 0.0;
  std::vector<int> level_card_min;  // per level, min Card(A) over nodes
};

/// S_j recursion: per node I of S_{j-1}, build the skeleton set E_{R,k} at
/// k = N0 + j*kappa from the dyadic cubes meeting R, extract a maximal
/// 2^-k-separated net of its part inside I, and let S(I) be the level-k cubes
/// holding net points; mu splits equally among children.
FrostmanTree bj_net_recursion(const PointCloud& cloud, const CubeForest& forest, const CubeRef& r,
                              int kappa, int levels, double c, int d);

/// Mass-distribution exponent: min over non-root nodes of
/// log mu(I) / log(ell(I)/ell(root)).
double frostman_dimension(const FrostmanTree& tree);

/// Least-squares slope of log(cell count) against log(1/side) over dyadic
/// sides in [min_side, max_side].
double box_dimension(const PointCloud& cloud, double min_side, double max_side);

struct BJCheckReport {
  int n0 = 0;       // dyadic level matched to ell(R)
  int k = 0;        // skeleton level
  double c = 1.0;
  double ell_r_d = 0.0;
  double beta_sum = 0.0;  // sum over generations of beta_m(R)
  std::vector<double> beta_m;
  double lhs = 0.0;           // beta_sum + ell(R)^d
  double rhs_measure = 0.0;   // exact skeleton measure of E_{R,k}
  double ratio = 0.0;         // lhs / rhs, the empirical gamma^-1 surrogate
};

/// e:BJ-a replay: sum_m beta_m(R) + ell(R)^d against the exact measure of
/// E_{R,k}; beta_m uses balls 3B_Q at p = 2.
BJCheckReport bj_sum_check(const PointCloud& cloud, const CubeForest& forest, const CubeRef& r,
                           int k, double c, int d, double min_scale);

/// Capacity lower bound: C * gamma_hat^(1/2) * content_E^(3/2) / measure_Sigma^(1/2).
double capacity_lower_bound(double content_e, double measure_sigma, double gamma_hat, double c,
                            int d);

/// Discretized beta^2(mu, B0): sum over forest cubes Q with B_Q ⊂ 3*B0 of
/// beta_measure_p(B_Q, p=2)^2 * Theta_mu(B_Q) * mu(Q).
double beta_square_function(const PointCloud& cloud, const CubeForest& forest, const Ball& b0,
                            int d);

}  // namespace qrect

#endif
