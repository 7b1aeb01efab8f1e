#include "core/forest.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>
#include <unordered_map>

#include "core/geometry.hpp"

namespace qrect {

namespace {

/// Hash grid for fixed-radius neighbor queries. With cell side >= the query
/// radius, all points within that radius of p live in the 3^n cells around
/// p's cell.
class UniformGrid {
 public:
  UniformGrid(int n, double side) : n_(n), side_(side) {}

  void insert(const Vec& p, Eigen::Index id) { cells_[key_of(p)].push_back(id); }

  template <class F>
  void for_neighbors(const Vec& p, F&& f) const {
    std::vector<std::int64_t> base = key_of(p);
    std::vector<std::int64_t> k(base);
    std::vector<int> offs(static_cast<std::size_t>(n_), -1);
    for (;;) {
      for (int i = 0; i < n_; ++i)
        k[static_cast<std::size_t>(i)] = base[static_cast<std::size_t>(i)] + offs[static_cast<std::size_t>(i)];
      auto it = cells_.find(k);
      if (it != cells_.end())
        for (Eigen::Index id : it->second) f(id);
      int j = 0;
      while (j < n_ && ++offs[static_cast<std::size_t>(j)] > 1) offs[static_cast<std::size_t>(j++)] = -1;
      if (j == n_) break;
    }
  }

 private:
  std::vector<std::int64_t> key_of(const Vec& p) const {
    std::vector<std::int64_t> k(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) k[static_cast<std::size_t>(i)] = cell_index(p(i), side_);
    return k;
  }

  int n_;
  double side_;
  std::unordered_map<std::vector<std::int64_t>, std::vector<Eigen::Index>, Int64VecHash> cells_;
};

double rho_pow(double rho, int k) { return ipow(rho, k); }

}  // namespace

std::vector<Eigen::Index> maximal_separated_net(const PointCloud& cloud,
                                                const std::vector<Eigen::Index>& candidates,
                                                double sep) {
  if (!(sep > 0.0)) throw InvalidArgument("maximal_separated_net: sep > 0");
  UniformGrid grid(cloud.ambient_dim(), sep);
  std::vector<Eigen::Index> net;
  const double sep2 = sep * sep;
  for (Eigen::Index i : candidates) {
    const Vec p = cloud.point(i);
    bool blocked = false;
    grid.for_neighbors(p, [&](Eigen::Index j) {
      if (!blocked && (cloud.point(j) - p).squaredNorm() < sep2) blocked = true;
    });
    if (!blocked) {
      grid.insert(p, i);
      net.push_back(i);
    }
  }
  return net;
}

NetHierarchy build_net_hierarchy(const PointCloud& cloud, double rho, int k_max) {
  if (cloud.size() == 0) throw InvalidArgument("build_net_hierarchy: empty cloud");
  if (!(rho > 0.0 && rho <= 0.5)) throw InvalidArgument("build_net_hierarchy: need 0 < rho <= 1/2");
  if (rho_pow(rho, k_max) < cloud.resolution())
    throw InvalidArgument("build_net_hierarchy: rho^k_max must be >= cloud resolution");

  const double diam = cloud.diameter();
  int k_top;
  if (diam == 0.0) {
    k_top = std::min(0, k_max);
  } else {
    k_top = 0;
    while (rho_pow(rho, k_top) <= diam) --k_top;
    while (rho_pow(rho, k_top + 1) > diam) ++k_top;
    if (k_top > k_max) k_top = k_max;
  }

  NetHierarchy h;
  h.rho = rho;
  h.k_top = k_top;

  std::vector<Eigen::Index> all(static_cast<std::size_t>(cloud.size()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);

  std::vector<Eigen::Index> current;
  for (int k = k_top; k <= k_max; ++k) {
    const double sep = rho_pow(rho, k);
    const double sep2 = sep * sep;
    UniformGrid grid(cloud.ambient_dim(), sep);
    std::vector<Eigen::Index> next;
    next.reserve(std::max<std::size_t>(current.size() * 2, 16));
    // Previous net first (it is sep-separated a fortiori), then greedy scan.
    for (Eigen::Index i : current) {
      grid.insert(cloud.point(i), i);
      next.push_back(i);
    }
    for (Eigen::Index i : all) {
      const Vec p = cloud.point(i);
      bool blocked = false;
      grid.for_neighbors(p, [&](Eigen::Index j) {
        if (!blocked && (cloud.point(j) - p).squaredNorm() < sep2) blocked = true;
      });
      if (!blocked) {
        grid.insert(p, i);
        next.push_back(i);
      }
    }
    current = next;
    h.nets.push_back(std::move(next));
  }
  return h;
}

CubeForest CubeForest::build(const PointCloud& cloud, double rho, int k_max) {
  NetHierarchy nets = build_net_hierarchy(cloud, rho, k_max);
  CubeForest f;
  f.rho_ = rho;
  f.c0_ = std::max(0.0, (0.5 - rho / (1.0 - rho)) * (15.0 / 16.0) / 5.0);
  f.k_top_ = nets.k_top;
  const int levels = static_cast<int>(nets.nets.size());
  const Eigen::Index n_pts = cloud.size();

  // Positions of net points within each net, for parent lookups.
  // nets are nested prefixes: nets[t-1] == first |nets[t-1]| entries of nets[t].
  std::vector<std::unordered_map<Eigen::Index, int>> pos(static_cast<std::size_t>(levels));
  for (int t = 0; t < levels; ++t) {
    const auto& net = nets.nets[static_cast<std::size_t>(t)];
    pos[static_cast<std::size_t>(t)].reserve(net.size());
    for (std::size_t j = 0; j < net.size(); ++j)
      pos[static_cast<std::size_t>(t)][net[j]] = static_cast<int>(j);
  }

  // Nearest net point of X_{k-1} for each net point of X_k (identity on the
  // shared prefix). Ties go to the lowest cloud index.
  std::vector<std::vector<int>> net_parent(static_cast<std::size_t>(levels));
  for (int t = 1; t < levels; ++t) {
    const auto& fine = nets.nets[static_cast<std::size_t>(t)];
    const auto& coarse = nets.nets[static_cast<std::size_t>(t - 1)];
    const double radius = rho_pow(rho, nets.k_top + t - 1);
    UniformGrid grid(cloud.ambient_dim(), radius);
    for (std::size_t j = 0; j < coarse.size(); ++j) grid.insert(cloud.point(coarse[j]), coarse[j]);
    auto& par = net_parent[static_cast<std::size_t>(t)];
    par.resize(fine.size(), -1);
    for (std::size_t j = 0; j < fine.size(); ++j) {
      if (j < coarse.size()) {
        par[j] = static_cast<int>(j);  // prefix: same point, its own parent
        continue;
      }
      const Vec p = cloud.point(fine[j]);
      double best_d2 = std::numeric_limits<double>::infinity();
      Eigen::Index best_id = -1;
      grid.for_neighbors(p, [&](Eigen::Index c) {
        const double d2 = (cloud.point(c) - p).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && c < best_id)) {
          best_d2 = d2;
          best_id = c;
        }
      });
      if (best_id < 0) throw NumericError("CubeForest: net maximality violated");
      par[j] = pos[static_cast<std::size_t>(t - 1)].at(best_id);
    }
  }

  // Assign every cloud point to its nearest bottom-level net point.
  std::vector<int> anc(static_cast<std::size_t>(n_pts));
  {
    const auto& bottom = nets.nets.back();
    const double radius = rho_pow(rho, nets.k_max());
    UniformGrid grid(cloud.ambient_dim(), radius);
    for (Eigen::Index id : bottom) grid.insert(cloud.point(id), id);
    for (Eigen::Index i = 0; i < n_pts; ++i) {
      const Vec p = cloud.point(i);
      double best_d2 = std::numeric_limits<double>::infinity();
      Eigen::Index best_id = -1;
      grid.for_neighbors(p, [&](Eigen::Index c) {
        const double d2 = (cloud.point(c) - p).squaredNorm();
        if (d2 < best_d2 || (d2 == best_d2 && c < best_id)) {
          best_d2 = d2;
          best_id = c;
        }
      });
      if (best_id < 0) throw NumericError("CubeForest: bottom net not maximal");
      anc[static_cast<std::size_t>(i)] = pos[static_cast<std::size_t>(levels - 1)].at(best_id);
    }
  }

  // Walk the ancestor chains bottom-up, materializing members per generation.
  f.gens_.resize(static_cast<std::size_t>(levels));
  for (int t = levels - 1; t >= 0; --t) {
    const auto& net = nets.nets[static_cast<std::size_t>(t)];
    auto& gen = f.gens_[static_cast<std::size_t>(t)];
    gen.resize(net.size());
    const int k = nets.k_top + t;
    for (std::size_t j = 0; j < net.size(); ++j) {
      gen[j].center = net[j];
      gen[j].gen = k;
      gen[j].side = 5.0 * rho_pow(rho, k);
      if (t >= 1) gen[j].parent = net_parent[static_cast<std::size_t>(t)][j];
    }
    for (Eigen::Index i = 0; i < n_pts; ++i)
      gen[static_cast<std::size_t>(anc[static_cast<std::size_t>(i)])].members.push_back(i);
    if (t >= 1)
      for (Eigen::Index i = 0; i < n_pts; ++i)
        anc[static_cast<std::size_t>(i)] =
            net_parent[static_cast<std::size_t>(t)][static_cast<std::size_t>(anc[static_cast<std::size_t>(i)])];
  }
  for (int t = 1; t < levels; ++t)
    for (std::size_t j = 0; j < f.gens_[static_cast<std::size_t>(t)].size(); ++j)
      f.gens_[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(
          f.gens_[static_cast<std::size_t>(t)][j].parent)].children.push_back(static_cast<int>(j));
  return f;
}

CubeForest build_christ_david(const PointCloud& cloud, double rho, int k_max) {
  return CubeForest::build(cloud, rho, k_max);
}

std::string CubeForest::check_axioms(const PointCloud& cloud) const {
  const Eigen::Index n_pts = cloud.size();
  for (int t = 0; t < generation_count(); ++t) {
    const auto& gen = gens_[static_cast<std::size_t>(t)];
    // (1) partition
    std::vector<int> owner(static_cast<std::size_t>(n_pts), -1);
    Eigen::Index covered = 0;
    for (std::size_t j = 0; j < gen.size(); ++j) {
      for (Eigen::Index i : gen[j].members) {
        if (owner[static_cast<std::size_t>(i)] != -1) return "point in two cubes of one generation";
        owner[static_cast<std::size_t>(i)] = static_cast<int>(j);
        ++covered;
      }
    }
    if (covered != n_pts) return "generation does not cover the cloud";
    // (2) children partition the parent
    if (t + 1 < generation_count()) {
      for (std::size_t j = 0; j < gen.size(); ++j) {
        std::vector<Eigen::Index> merged;
        for (int c : gen[j].children) {
          const auto& mm = gens_[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(c)].members;
          merged.insert(merged.end(), mm.begin(), mm.end());
        }
        std::sort(merged.begin(), merged.end());
        if (merged != gen[j].members) return "children do not partition their parent";
      }
    }
    // (3) two-ball containment
    UniformGrid grid(cloud.ambient_dim(), std::max(c0_ * gen.front().side, 1e-300));
    for (Eigen::Index i = 0; i < n_pts; ++i) grid.insert(cloud.point(i), i);
    for (std::size_t j = 0; j < gen.size(); ++j) {
      const Vec xq = cloud.point(gen[j].center);
      const double ell = gen[j].side;
      for (Eigen::Index i : gen[j].members)
        if (!((cloud.point(i) - xq).norm() < ell)) return "member outside B(x_Q, ell(Q))";
      const double inner = c0_ * ell;
      bool bad = false;
      grid.for_neighbors(xq, [&](Eigen::Index i) {
        if (!bad && (cloud.point(i) - xq).norm() < inner &&
            owner[static_cast<std::size_t>(i)] != static_cast<int>(j))
          bad = true;
      });
      if (bad) return "inner-ball point escaped its cube";
    }
  }
  return {};
}

StoppingRegion StoppingRegion::build(
    const CubeForest& forest, const CubeRef& top,
    const std::function<bool(const CubeForest&, const CubeRef&)>& stop) {
  StoppingRegion r;
  r.top_ = top;
  std::deque<CubeRef> queue{top};
  while (!queue.empty()) {
    CubeRef q = queue.front();
    queue.pop_front();
    r.cubes_.push_back(q);
    const Cube& cube = forest.cube(q);
    const bool leaf = q.gen == forest.k_max() || cube.children.empty();
    if (leaf || stop(forest, q)) {
      r.minimal_.push_back(q);
      continue;
    }
    for (int c : cube.children) queue.push_back(CubeRef{q.gen + 1, c});
  }
  std::sort(r.cubes_.begin(), r.cubes_.end());
  std::sort(r.minimal_.begin(), r.minimal_.end());
  return r;
}

StoppingRegion StoppingRegion::subtree(const CubeForest& forest, const CubeRef& top, int gen_stop) {
  return build(forest, top,
               [gen_stop](const CubeForest&, const CubeRef& q) { return q.gen >= gen_stop; });
}

std::string StoppingRegion::check_axioms(const CubeForest& forest) const {
  std::set<CubeRef> in_region(cubes_.begin(), cubes_.end());
  if (!in_region.count(top_)) return "top cube not in region";
  for (const CubeRef& q : cubes_) {
    if (q.gen < top_.gen) return "cube above the top cube";
    // Walk up to the top: inclusion-convexity, and the top contains everything.
    CubeRef cur = q;
    while (cur.gen > top_.gen) {
      cur = CubeRef{cur.gen - 1, forest.cube(cur).parent};
      if (!in_region.count(cur)) return "inclusion-convexity violated";
    }
    if (!(cur == top_)) return "cube not below the top cube";
    // Sibling closure for strict descendants.
    if (q.gen > top_.gen) {
      const Cube& parent = forest.cube(CubeRef{q.gen - 1, forest.cube(q).parent});
      for (int sib : parent.children)
        if (!in_region.count(CubeRef{q.gen, sib})) return "sibling closure violated";
    }
  }
  return {};
}

double region_dF(const PointCloud& cloud, const CubeForest& forest, const StoppingRegion& region,
                 const Vec& x) {
  if (region.minimal_cubes().empty()) throw InvalidArgument("region_dF: empty minimal family");
  double best = std::numeric_limits<double>::infinity();
  for (const CubeRef& ref : region.minimal_cubes()) {
    const Cube& q = forest.cube(ref);
    double dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index i : q.members) dist = std::min(dist, (cloud.point(i) - x).norm());
    best = std::min(best, q.side + dist);
  }
  return best;
}

namespace {

int largest_dyadic_exponent_at_most(double x) {
  int e = detail::dyadic_exponent_at_least(x);
  if (std::exp2(e) > x) --e;
  return e;
}

struct WhitneyCand {
  std::vector<std::int64_t> idx;
  int exponent;
  std::vector<Eigen::Index> pts;
};

}  // namespace

WhitneyResult whitney_approximant(const PointCloud& cloud, const CubeForest& forest,
                                  const StoppingRegion& region, double tau, double c0_ball,
                                  int d) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidArgument("whitney_approximant: need 0 < tau < 1");
  if (!(c0_ball > 4.0)) throw InvalidArgument("whitney_approximant: need C0 > 4");
  const Cube& top = forest.cube(region.top());
  const Ball domain(cloud.point(top.center), c0_ball * top.side);
  std::vector<Eigen::Index> pts = points_in_ball(cloud, domain);

  std::vector<double> dT(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    dT[i] = region_dF(cloud, forest, region, cloud.point(pts[i]));

  const int e_res = detail::dyadic_exponent_at_least(cloud.resolution());
  const int n = cloud.ambient_dim();
  // Start coarse enough that the first requested side can never exceed it.
  const int e_start =
      largest_dyadic_exponent_at_most(std::max(4.0 * (2.0 + c0_ball) * top.side, cloud.resolution() * 4.0)) + 1;

  std::unordered_map<std::vector<std::int64_t>, std::vector<Eigen::Index>, Int64VecHash> roots;
  const double start_side = std::exp2(e_start);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::int64_t> key(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) key[static_cast<std::size_t>(a)] = cell_index(cloud.points()(pts[i], a), start_side);
    roots[key].push_back(static_cast<Eigen::Index>(i));  // store position into pts/dT
  }

  std::vector<DyadicCube> selected;
  std::deque<WhitneyCand> queue;
  for (auto& [key, members] : roots) queue.push_back(WhitneyCand{key, e_start, members});
  // Deterministic processing order.
  std::sort(queue.begin(), queue.end(),
            [](const WhitneyCand& a, const WhitneyCand& b) { return a.idx < b.idx; });

  while (!queue.empty()) {
    WhitneyCand cand = std::move(queue.front());
    queue.pop_front();
    double dmin = std::numeric_limits<double>::infinity();
    for (Eigen::Index pi : cand.pts) dmin = std::min(dmin, dT[static_cast<std::size_t>(pi)]);
    int e_req = largest_dyadic_exponent_at_most(std::max(tau * dmin, cloud.resolution()));
    if (e_req < e_res) e_req = e_res;
    if (cand.exponent <= e_req) {
      selected.push_back(DyadicCube{cand.idx, cand.exponent});
      continue;
    }
    // Split into occupied children.
    std::map<std::vector<std::int64_t>, std::vector<Eigen::Index>> kids;
    const double child_side = std::exp2(cand.exponent - 1);
    for (Eigen::Index pi : cand.pts) {
      std::vector<std::int64_t> key(static_cast<std::size_t>(n));
      for (int a = 0; a < n; ++a)
        key[static_cast<std::size_t>(a)] = cell_index(cloud.points()(pts[static_cast<std::size_t>(pi)], a), child_side);
      kids[key].push_back(pi);
    }
    for (auto& [key, members] : kids) queue.push_back(WhitneyCand{key, cand.exponent - 1, members});
  }

  std::sort(selected.begin(), selected.end());

  // E_T = union of the d-skeletons; faces of different generations coexist.
  std::set<DyadicFace> faces;
  for (const DyadicCube& cube : selected) {
    SkeletonSet sk = skeleton_union({cube}, d);
    for (const DyadicFace& face : sk.faces()) faces.insert(face);
  }
  SkeletonSet skeleton(std::vector<DyadicFace>(faces.begin(), faces.end()), d, n);
  WhitneyResult out{std::move(selected), skeleton, skeleton.sample(cloud.resolution())};
  return out;
}

CoronaPartition corona_partition(
    const CubeForest& forest, const CubeRef& q0, int k_stop, int d,
    const std::function<bool(const CubeForest&, const CubeRef&)>& stop) {
  CoronaPartition out;
  std::deque<CubeRef> tops{q0};
  while (!tops.empty()) {
    CubeRef top = tops.front();
    tops.pop_front();
    StoppingRegion region = StoppingRegion::build(
        forest, top,
        [&](const CubeForest& f, const CubeRef& q) { return q.gen >= k_stop || stop(f, q); });
    out.top_length_sum += ipow(forest.cube(top).side, d);
    for (const CubeRef& m : region.minimal_cubes()) {
      if (m.gen >= k_stop) continue;
      for (int c : forest.cube(m).children) tops.push_back(CubeRef{m.gen + 1, c});
    }
    out.regions.push_back(std::move(region));
  }
  return out;
}

}  // namespace qrect
