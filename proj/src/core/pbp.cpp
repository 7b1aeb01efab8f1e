#include "core/pbp.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace qrect {

double projection_content(const PointCloud& cloud, const Ball& ball, const AffinePlane& v,
                          double grid) {
  if (!(grid >= cloud.resolution()))
    throw InvalidArgument("projection_content: grid must be >= cloud resolution");
  std::vector<Eigen::Index> idx = points_in_ball(cloud, ball);
  if (idx.empty()) return 0.0;
  const int d = v.dim();
  std::set<std::vector<std::int64_t>> cells;
  for (Eigen::Index i : idx) {
    Vec coords = v.frame().transpose() * (cloud.point(i) - v.base());
    std::vector<std::int64_t> key(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) key[static_cast<std::size_t>(a)] = cell_index(coords(a), grid);
    cells.insert(std::move(key));
  }
  return static_cast<double>(cells.size()) * ipow(grid, d);
}

namespace {

/// 720 directions covering the line Grassmannian G(2,1); the second half is
/// the exact quarter-turn of the first, so a pi/2 rotation of the input
/// permutes the table instead of perturbing it.
std::vector<Vec> planar_direction_table() {
  std::vector<Vec> dirs(720, Vec(2));
  for (int i = 0; i < 360; ++i) {
    const double th = M_PI * i / 720.0;
    dirs[static_cast<std::size_t>(i)](0) = std::cos(th);
    dirs[static_cast<std::size_t>(i)](1) = std::sin(th);
  }
  for (int i = 360; i < 720; ++i) {
    dirs[static_cast<std::size_t>(i)](0) = -dirs[static_cast<std::size_t>(i - 360)](1);
    dirs[static_cast<std::size_t>(i)](1) = dirs[static_cast<std::size_t>(i - 360)](0);
  }
  return dirs;
}

AffinePlane line_of(const Vec& u) {
  Mat frame(2, 1);
  frame(0, 0) = u(0);
  frame(1, 0) = u(1);
  return AffinePlane(Vec::Zero(2), frame);
}

/// d_G between two lines through the origin is |sin(angle)|.
double line_distance(const Vec& u, const Vec& v) {
  return std::abs(u(0) * v(1) - u(1) * v(0));
}

}  // namespace

PBPProfile pbp_profile(const PointCloud& cloud, const std::vector<Ball>& balls, int d,
                       std::vector<double> eps_grid, int samples_per_eps, std::uint64_t seed) {
  if (balls.empty()) throw InvalidArgument("pbp_profile: no balls");
  if (eps_grid.empty()) throw InvalidArgument("pbp_profile: empty eps grid");
  if (samples_per_eps < 1) throw InvalidArgument("pbp_profile: samples_per_eps >= 1");
  std::sort(eps_grid.begin(), eps_grid.end());
  for (double e : eps_grid)
    if (!(e > 0.0 && e <= 1.0)) throw InvalidArgument("pbp_profile: eps must lie in (0, 1]");
  const int n = cloud.ambient_dim();
  const double diam = cloud.diameter();
  for (const Ball& b : balls) {
    if (points_in_ball(cloud, b).empty()) throw InvalidArgument("pbp_profile: empty ball");
    if (diam > 0.0 && b.radius > diam * (1.0 + 1e-9))
      throw InvalidArgument("pbp_profile: ball radius exceeds cloud diameter");
  }

  PBPProfile profile;
  profile.eps_grid = eps_grid;
  profile.delta_min.assign(eps_grid.size(), std::numeric_limits<double>::infinity());

  for (const Ball& ball : balls) {
    PBPBallRecord rec;
    rec.ball = ball;
    rec.delta_hat.assign(eps_grid.size(), 0.0);
    const double grid =
        std::max(cloud.resolution(), ball.radius / 256.0);
    profile.proj_grid = grid;
    const double rd = ipow(ball.radius, d);

    if (n == 2 && d == 1) {
      // Exhaustive angular grid; W-candidates at tolerance eps are the grid
      // directions within |sin| distance eps, a nested family.
      const std::vector<Vec> dirs = planar_direction_table();
      std::vector<double> content(dirs.size());
      for (std::size_t i = 0; i < dirs.size(); ++i)
        content[i] = projection_content(cloud, ball, line_of(dirs[i]), grid) / rd;
      for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        double best = -1.0;
        std::size_t best_i = 0;
        for (std::size_t i = 0; i < dirs.size(); ++i) {
          double worst = content[i];
          for (std::size_t j = 0; j < dirs.size(); ++j)
            if (line_distance(dirs[i], dirs[j]) <= eps_grid[e]) worst = std::min(worst, content[j]);
          if (worst > best) {
            best = worst;
            best_i = i;
          }
        }
        rec.delta_hat[e] = best;
        if (e == 0) rec.best_plane = line_of(dirs[best_i]);
      }
    } else {
      // Coarse seeded Grassmannian sample, refined around the best direction.
      AffinePlane axes = AffinePlane::span_axes(n, [&] {
        std::vector<int> a(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) a[static_cast<std::size_t>(i)] = i;
        return a;
      }());
      std::vector<AffinePlane> candidates = sample_plane_ball(axes, 1.0, 64, seed);
      {
        // Two refinement rounds around the best coarse candidate.
        auto score_coarse = [&](const AffinePlane& v) {
          return projection_content(cloud, ball, v, grid);
        };
        for (double radius : {0.3, 0.1}) {
          const AffinePlane* best = &candidates.front();
          double best_v = -1.0;
          for (const AffinePlane& v : candidates) {
            const double s = score_coarse(v);
            if (s > best_v) {
              best_v = s;
              best = &v;
            }
          }
          std::vector<AffinePlane> extra = sample_plane_ball(*best, radius, 16, seed ^ 0x5bull);
          candidates.insert(candidates.end(), extra.begin(), extra.end());
        }
      }
      std::vector<std::vector<AffinePlane>> wsamples(candidates.size());
      double best0 = -1.0;
      std::size_t best0_i = 0;
      for (std::size_t e = 0; e < eps_grid.size(); ++e) {
        double best = -1.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
          std::vector<AffinePlane> extra = sample_plane_ball(
              candidates[i], eps_grid[e], samples_per_eps, seed + 1000003ull * (e + 1) + i);
          auto& acc = wsamples[i];
          acc.insert(acc.end(), extra.begin(), extra.end());
          double worst = std::numeric_limits<double>::infinity();
          for (const AffinePlane& w : acc)
            worst = std::min(worst, projection_content(cloud, ball, w, grid) / rd);
          if (worst > best) {
            best = worst;
            if (e == 0) {
              best0 = worst;
              best0_i = i;
            }
          }
        }
        rec.delta_hat[e] = best;
      }
      (void)best0;
      rec.best_plane = candidates[best0_i];
    }
    for (std::size_t e = 0; e < eps_grid.size(); ++e)
      profile.delta_min[e] = std::min(profile.delta_min[e], rec.delta_hat[e]);
    profile.balls.push_back(std::move(rec));
  }
  return profile;
}

double lower_regularity(const PointCloud& cloud, const std::vector<Ball>& balls, int d,
                        double min_scale) {
  if (balls.empty()) throw InvalidArgument("lower_regularity: no balls");
  double worst = std::numeric_limits<double>::infinity();
  for (const Ball& b : balls) {
    std::vector<Eigen::Index> idx = points_in_ball(cloud, b);
    double c = 0.0;
    if (!idx.empty())
      c = hausdorff_content(cloud.subset(idx), d, min_scale).value / ipow(b.radius, d);
    worst = std::min(worst, c);
  }
  return worst;
}

}  // namespace qrect
