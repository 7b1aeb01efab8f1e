#ifndef QRECT_CORE_PBP_HPP
#define QRECT_CORE_PBP_HPP

#include <cstdint>
#include <vector>

#include "core/types.hpp"

namespace qrect {

/// H^d of the projection pi_V(cloud ∩ B), estimated by counting occupied
/// half-open grid cells of side `grid` in V's coordinates (a lower bound for
/// the idealized projection measure, exact up to boundary cells).
double projection_content(const PointCloud& cloud, const Ball& ball, const AffinePlane& v,
                          double grid);

struct PBPBallRecord {
  Ball ball;
  AffinePlane best_plane;         // maximin direction at the smallest epsilon
  std::vector<double> delta_hat;  // per entry of eps_grid, nonincreasing
};

/// Empirical PBP profile: for each ball, delta_hat(eps) is the maximin of
/// projection_content / r^d over candidate planes V and sampled planes
/// W within Grassmannian distance eps of V. delta_hat is an upper estimate of
/// the true PBP delta (finite sampling of the "for all W" quantifier).
struct PBPProfile {
  std::vector<double> eps_grid;
  std::vector<PBPBallRecord> balls;
  std::vector<double> delta_min;  // aggregate: min over balls, per eps
  double proj_grid = 0.0;         // cell side used for projection contents
};

/// For n = 2, d = 1 the candidate directions are an exhaustive 720-entry
/// angular grid (deterministic); otherwise 64 seeded coarse planes refined
/// locally around the best. W-samples accumulate along the ascending eps
/// grid, which makes delta_hat(eps) exactly nonincreasing.
PBPProfile pbp_profile(const PointCloud& cloud, const std::vector<Ball>& balls, int d,
                       std::vector<double> eps_grid, int samples_per_eps, std::uint64_t seed);

/// Lemma 3.1 diagnostic: c1_hat = min over balls of H^d_inf(cloud ∩ B) / r^d.
double lower_regularity(const PointCloud& cloud, const std::vector<Ball>& balls, int d,
                        double min_scale);

}  // namespace qrect

#endif
