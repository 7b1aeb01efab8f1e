#include "core/multiscale.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/beta.hpp"
#include "core/geometry.hpp"
#include "core/parallel.hpp"

namespace qrect {

namespace {

double subtree_diameter(const PointCloud& cloud, const std::vector<Eigen::Index>& members) {
  double best = 0.0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j)
      best = std::max(best,
                      (cloud.points().row(members[i]) - cloud.points().row(members[j])).norm());
  return best;
}

std::vector<CubeRef> collect_subtree(const CubeForest& forest, const CubeRef& q0, double cutoff) {
  std::vector<CubeRef> cubes;
  std::vector<CubeRef> frontier{q0};
  while (!frontier.empty()) {
    std::vector<CubeRef> next;
    for (const CubeRef& q : frontier) {
      if (forest.cube(q).side < cutoff) continue;
      cubes.push_back(q);
      if (q.gen < forest.k_max())
        for (int c : forest.cube(q).children) next.push_back(CubeRef{q.gen + 1, c});
    }
    frontier = std::move(next);
  }
  std::sort(cubes.begin(), cubes.end());
  return cubes;
}

}  // namespace

TSTReport tst_sum(const PointCloud& cloud, const CubeForest& forest, const CubeRef& q0, int d,
                  double p, double inflate, double min_scale,
                  std::optional<double> exact_measure) {
  const Cube& top = forest.cube(q0);
  const double cutoff = std::max(min_scale, cloud.resolution());
  if (cutoff > top.side) throw InvalidArgument("tst_sum: cutoff above ell(Q0)");

  TSTReport rep;
  rep.d = d;
  rep.p = p;
  rep.inflate = inflate;
  rep.min_scale = min_scale;

  std::vector<CubeRef> cubes = collect_subtree(forest, q0, cutoff);
  rep.ledger.resize(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    const Cube& q = forest.cube(cubes[i]);
    const Ball b = forest.cube_ball(cloud, cubes[i], inflate);
    const double beta = beta_content_p(cloud, b, d, p, min_scale).value;
    rep.ledger[i] = TSTLedgerEntry{cubes[i].gen, cubes[i].idx, q.side, beta,
                                   beta * beta * ipow(q.side, d)};
  });

  // The reported sum is exactly the sum of the ledger, in ledger order.
  std::map<int, TSTGenerationStat> gens;
  for (const TSTLedgerEntry& e : rep.ledger) {
    rep.beta_sum += e.contribution;
    auto& g = gens[e.gen];
    if (g.count == 0) {
      g.gen = e.gen;
      g.ell = e.ell;
      g.beta_min = e.beta;
      g.beta_max = e.beta;
    }
    g.beta_min = std::min(g.beta_min, e.beta);
    g.beta_max = std::max(g.beta_max, e.beta);
    g.beta_mean += e.beta;
    g.sum_contribution += e.contribution;
    ++g.count;
  }
  for (auto& [gen, g] : gens) {
    g.beta_mean /= g.count;
    rep.per_generation.push_back(g);
  }

  rep.diam_term = ipow(subtree_diameter(cloud, top.members), d);
  if (exact_measure) {
    rep.proxy_kind = "skeleton-exact";
    rep.measure_proxy = rep.measure_lower = rep.measure_upper = *exact_measure;
  } else {
    rep.proxy_kind = "content-bracket";
    ContentEstimate est = hausdorff_content(cloud.subset(top.members), d, cutoff);
    rep.measure_proxy = est.value;
    rep.measure_lower = est.lower_bound;
    rep.measure_upper = est.upper_bound;
  }
  const double lhs = rep.diam_term + rep.beta_sum;
  rep.ratio_lower = rep.measure_upper > 0.0 ? lhs / rep.measure_upper : 0.0;
  rep.ratio_upper = rep.measure_lower > 0.0 ? lhs / rep.measure_lower : 0.0;
  return rep;
}

double tree_beta_sum(const PointCloud& cloud, const CubeForest& forest,
                     const StoppingRegion& region, int d, double p, double min_scale) {
  const auto& cubes = region.cubes();
  std::vector<double> terms(cubes.size());
  parallel_for(cubes.size(), [&](std::size_t i) {
    const Cube& q = forest.cube(cubes[i]);
    const Ball b = forest.cube_ball(cloud, cubes[i], 3.0);
    const double beta = beta_content_p(cloud, b, d, p, min_scale).value;
    terms[i] = beta * beta * ipow(q.side, d);
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

double nonflatness_scan(const PointCloud& cloud, int d, double r_min, double r_max,
                        int ball_density) {
  if (!(r_min > 0.0 && r_max >= r_min)) throw InvalidArgument("nonflatness_scan: bad range");
  if (!(r_min >= 4.0 * cloud.resolution()))
    throw InvalidArgument("nonflatness_scan: r_min must be >= 4 * resolution");
  if (ball_density < 1) throw InvalidArgument("nonflatness_scan: ball_density >= 1");
  std::vector<Eigen::Index> all(static_cast<std::size_t>(cloud.size()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);

  std::vector<Ball> balls;
  for (double r = r_max; r >= r_min * (1.0 - 1e-12); r *= 0.5) {
    std::vector<Eigen::Index> centers =
        maximal_separated_net(cloud, all, r / static_cast<double>(ball_density));
    for (Eigen::Index c : centers) balls.emplace_back(cloud.point(c), r);
  }
  std::vector<double> vals(balls.size());
  parallel_for(balls.size(), [&](std::size_t i) {
    vals[i] = beta_content_p(cloud, balls[i], d, 1.0, cloud.resolution()).value;
  });
  double beta0 = std::numeric_limits<double>::infinity();
  for (double v : vals) beta0 = std::min(beta0, v);
  return balls.empty() ? 0.0 : beta0;
}

namespace {

int largest_exponent_at_most(double x) {
  int e = detail::dyadic_exponent_at_least(x);
  if (std::exp2(e) > x) --e;
  return e;
}

int exponent_of(double c) {
  const int e = static_cast<int>(std::lround(std::log2(c)));
  if (std::exp2(e) != c) throw InvalidArgument("c must be a power of two");
  return e;
}

}  // namespace

FrostmanTree bj_net_recursion(const PointCloud& cloud, const CubeForest& forest, const CubeRef& r,
                              int kappa, int levels, double c, int d) {
  if (kappa < 1) throw InvalidArgument("bj_net_recursion: kappa >= 1");
  if (levels < 1) throw InvalidArgument("bj_net_recursion: levels >= 1");
  const Cube& top = forest.cube(r);
  const int ec = exponent_of(c);
  const int e0 = largest_exponent_at_most(top.side);
  const double bottom_side = std::exp2(e0 - levels * kappa);
  if (!(bottom_side / c >= cloud.resolution()))
    throw InvalidArgument("bj_net_recursion: levels*kappa descends below the cloud resolution");

  PointCloud members = cloud.subset(top.members);

  FrostmanTree tree;
  tree.kappa = kappa;
  tree.levels = levels;
  tree.c = c;
  tree.n0 = ec - e0;
  tree.root_side = std::exp2(e0);

  // Root: the level-N0 dyadic cube holding the most members of R.
  {
    std::map<std::vector<std::int64_t>, int> counts;
    const double side = std::exp2(e0);
    for (Eigen::Index i = 0; i < members.size(); ++i) {
      std::vector<std::int64_t> key(static_cast<std::size_t>(members.ambient_dim()));
      for (int a = 0; a < members.ambient_dim(); ++a)
        key[static_cast<std::size_t>(a)] = cell_index(members.points()(i, a), side);
      counts[key] += 1;
    }
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
      if (it->second > best->second) best = it;
    FrostmanNode root;
    root.cube = DyadicCube{best->first, e0};
    root.level = 0;
    root.mu = 1.0;
    tree.nodes.push_back(std::move(root));
  }

  std::vector<int> current{0};
  for (int j = 1; j <= levels; ++j) {
    const int e_j = e0 - j * kappa;
    const int k_j = ec - e_j;
    const double side_j = std::exp2(e_j);
    const double sep_j = std::exp2(-k_j);  // 2^-k, the paper's net scale
    // Skeleton E_{R,k} of all dyadic cubes at this level meeting R.
    std::vector<DyadicCube> meeting = dyadic_cubes_meeting(members, k_j, c);
    SkeletonSet skel = skeleton_union(meeting, d);
    PointCloud skel_cloud = skel.sample(std::min(side_j, sep_j) / 8.0);

    int level_min_card = std::numeric_limits<int>::max();
    std::vector<int> next;
    for (int node_id : current) {
      const DyadicCube& cell = tree.nodes[static_cast<std::size_t>(node_id)].cube;
      std::vector<Eigen::Index> inside;
      for (Eigen::Index i = 0; i < skel_cloud.size(); ++i)
        if (cell.contains(skel_cloud.point(i))) inside.push_back(i);
      std::vector<Eigen::Index> net = maximal_separated_net(skel_cloud, inside, sep_j);
      if (net.empty())
        throw NumericError("bj_net_recursion: empty net at level " + std::to_string(j) +
                           " (degenerate cloud in cell)");
      tree.nodes[static_cast<std::size_t>(node_id)].card_a = static_cast<int>(net.size());
      level_min_card = std::min(level_min_card, static_cast<int>(net.size()));
      // Children: distinct level-j cells of the net points.
      std::map<std::vector<std::int64_t>, int> cells;
      for (Eigen::Index ni : net) {
        std::vector<std::int64_t> key(static_cast<std::size_t>(skel_cloud.ambient_dim()));
        for (int a = 0; a < skel_cloud.ambient_dim(); ++a)
          key[static_cast<std::size_t>(a)] = cell_index(skel_cloud.points()(ni, a), side_j);
        cells.emplace(std::move(key), 0);
      }
      const double mu_child =
          tree.nodes[static_cast<std::size_t>(node_id)].mu / static_cast<double>(cells.size());
      for (const auto& [key, unused] : cells) {
        FrostmanNode child;
        child.cube = DyadicCube{key, e_j};
        child.level = j;
        child.mu = mu_child;
        child.parent = node_id;
        const int child_id = static_cast<int>(tree.nodes.size());
        tree.nodes[static_cast<std::size_t>(node_id)].children.push_back(child_id);
        tree.nodes.push_back(std::move(child));
        next.push_back(child_id);
      }
    }
    tree.level_card_min.push_back(level_min_card);
    current = std::move(next);
  }
  return tree;
}

double frostman_dimension(const FrostmanTree& tree) {
  if (tree.levels < 2) throw InvalidArgument("frostman_dimension: need >= 2 levels");
  double s_hat = std::numeric_limits<double>::infinity();
  for (const FrostmanNode& node : tree.nodes) {
    if (node.level == 0) continue;
    const double scale_ratio = std::exp2(static_cast<double>(node.cube.exponent)) / tree.root_side;
    s_hat = std::min(s_hat, std::log(node.mu) / std::log(scale_ratio));
  }
  return s_hat;
}

double box_dimension(const PointCloud& cloud, double min_side, double max_side) {
  auto counts = dyadic_cell_counts(cloud, min_side, max_side);
  if (counts.size() < 3) throw InvalidArgument("box_dimension: need >= 3 dyadic scales in range");
  // Least squares of log(count) on log(1/side).
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(counts.size());
  for (const auto& [side, count] : counts) {
    const double x = std::log(1.0 / side);
    const double y = std::log(static_cast<double>(count));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

BJCheckReport bj_sum_check(const PointCloud& cloud, const CubeForest& forest, const CubeRef& r,
                           int k, double c, int d, double min_scale) {
  const Cube& top = forest.cube(r);
  BJCheckReport rep;
  rep.k = k;
  rep.c = c;
  const int ec = exponent_of(c);
  const int e0 = largest_exponent_at_most(top.side);
  rep.n0 = ec - e0;
  if (k <= rep.n0) throw InvalidArgument("bj_sum_check: k must exceed the level of R");
  rep.ell_r_d = ipow(top.side, d);

  const double floor_side = c * std::exp2(-k);
  // beta_m(R) over Christ-David generations from R's scale down to the
  // dyadic floor c 2^-k, balls 3B_Q at p = 2 (Prop 3.4 normalization).
  for (int g = r.gen; g <= forest.k_max(); ++g) {
    const double gen_side = 5.0 * ipow(forest.rho(), g);
    if (gen_side < floor_side || gen_side < cloud.resolution()) break;
    std::vector<CubeRef> gen_cubes;
    std::vector<CubeRef> frontier{r};
    // Collect generation-g cubes below R.
    std::function<void(const CubeRef&)> walk = [&](const CubeRef& q) {
      if (q.gen == g) {
        gen_cubes.push_back(q);
        return;
      }
      for (int ci : forest.cube(q).children) walk(CubeRef{q.gen + 1, ci});
    };
    walk(r);
    std::vector<double> terms(gen_cubes.size());
    parallel_for(gen_cubes.size(), [&](std::size_t i) {
      const Cube& q = forest.cube(gen_cubes[i]);
      const Ball b = forest.cube_ball(cloud, gen_cubes[i], 3.0);
      const double beta = beta_content_p(cloud, b, d, 2.0, min_scale).value;
      terms[i] = beta * ipow(q.side, d);
    });
    double bm = 0.0;
    for (double t : terms) bm += t;
    rep.beta_m.push_back(bm);
    rep.beta_sum += bm;
  }

  PointCloud members = cloud.subset(top.members);
  std::vector<DyadicCube> meeting = dyadic_cubes_meeting(members, k, c);
  rep.rhs_measure = skeleton_union(meeting, d).exact_measure();
  rep.lhs = rep.beta_sum + rep.ell_r_d;
  rep.ratio = rep.lhs / rep.rhs_measure;
  return rep;
}

double capacity_lower_bound(double content_e, double measure_sigma, double gamma_hat, double c,
                            int d) {
  if (!(content_e > 0.0 && measure_sigma > 0.0 && gamma_hat > 0.0 && c > 0.0))
    throw InvalidArgument("capacity_lower_bound: inputs must be positive");
  (void)d;
  return c * std::sqrt(gamma_hat) * std::pow(content_e, 1.5) / std::sqrt(measure_sigma);
}

double beta_square_function(const PointCloud& cloud, const CubeForest& forest, const Ball& b0,
                            int d) {
  if (!cloud.has_weights()) throw InvalidArgument("beta_square_function: weights required");
  double total_mass = 0.0;
  for (Eigen::Index i : points_in_ball(cloud, b0)) total_mass += cloud.weight(i);
  if (!(total_mass > 0.0)) throw InvalidArgument("beta_square_function: zero mass in ball");

  std::vector<CubeRef> cubes;
  for (int g = forest.k_top(); g <= forest.k_max(); ++g) {
    const auto& gen = forest.generation(g);
    for (int i = 0; i < static_cast<int>(gen.size()); ++i) {
      const Cube& q = gen[static_cast<std::size_t>(i)];
      // B_Q ⊂ 3 B0
      if ((cloud.point(q.center) - b0.center).norm() + q.side <= 3.0 * b0.radius)
        cubes.push_back(CubeRef{g, i});
    }
  }
  std::vector<double> terms(cubes.size(), 0.0);
  parallel_for(cubes.size(), [&](std::size_t i) {
    const Cube& q = forest.cube(cubes[i]);
    const Ball bq = forest.cube_ball(cloud, cubes[i], 1.0);
    double ball_mass = 0.0;
    for (Eigen::Index pi : points_in_ball(cloud, bq)) ball_mass += cloud.weight(pi);
    if (!(ball_mass > 0.0)) return;
    double cube_mass = 0.0;
    for (Eigen::Index pi : q.members) cube_mass += cloud.weight(pi);
    if (!(cube_mass > 0.0)) return;
    const double beta = beta_measure_p(cloud, bq, d, 2.0).value;
    const double theta = ball_mass / ipow(bq.radius, d);
    terms[i] = beta * beta * theta * cube_mass;
  });
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

}  // namespace qrect
