#ifndef QRECT_CORE_BETA_HPP
#define QRECT_CORE_BETA_HPP

#include <limits>

#include "core/types.hpp"

namespace qrect {

/// Result of a beta-number evaluation. `p` is +infinity for the sup variant.
struct BetaResult {
  double value = 0.0;
  AffinePlane optimal_plane;
  double p = 2.0;
  Ball ball;
  bool empty_intersection = false;
  // search diagnostics
  int starts = 0;
  int evaluations = 0;
  double multi_start_spread = 0.0;
};

/// Jones sup-beta: (1/r) inf_L sup{ dist(y, L) : y in cloud ∩ B }.
/// Exact for n = 2, d = 1 (pair/slab enumeration below 13 points, convex-hull
/// width above); multi-start descent otherwise.
BetaResult beta_inf(const PointCloud& cloud, const Ball& ball, int d);

/// Azzam-Schul content beta:
///   inf_L ( r^-d  ∫_{E∩B} (dist(y,L)/r)^p dH^d_inf )^{1/p},
/// Choquet integral against the dyadic-cover content at `min_scale`.
BetaResult beta_content_p(const PointCloud& cloud, const Ball& ball, int d, double p,
                          double min_scale);

/// Measure beta for a weighted cloud:
///   inf_L ( r^-d  sum_i w_i (dist(p_i,L)/r)^p )^{1/p};
/// p = 2 is solved exactly by weighted principal directions.
BetaResult beta_measure_p(const PointCloud& cloud, const Ball& ball, int d, double p);

/// Lemma 2.8 transfer term:
///   ( r^-d ∫_{E1 ∩ 2B} (dist(y, E2)/r)^p dH^d_inf(y) )^{1/p}.
double transfer_term(const PointCloud& e1, const PointCloud& e2, const Ball& ball, int d, double p,
                     double min_scale);

inline constexpr double kBetaInfinity = std::numeric_limits<double>::infinity();

}  // namespace qrect

#endif
