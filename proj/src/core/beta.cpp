#include "core/beta.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "core/geometry.hpp"
#include "core/rng.hpp"

namespace qrect {

namespace {

constexpr std::uint64_t kBetaSeed = 0x92D68CA2ull;
constexpr int kSmallInstance = 12;

struct BallContext {
  // cloud ∩ B in canonical coordinates: centered at the ball center, scaled
  // by 1/r, and rotated into the principal frame of the ball points. The
  // content grid is anchored in this frame, which is what makes the integral
  // betas invariant under similarities of (cloud, ball).
  PointCloud sub;
  Vec center;  // original ball center
  Mat rot;     // canonical rotation Q: original = center + r * Q * z
  double r = 1.0;
  int d = 1;
  double min_scale = 0.0;  // normalized by r
};

/// Objective = the beta value of a candidate plane given in normalized
/// coordinates (ball center at 0, radius 1).
using Objective = std::function<double(const AffinePlane&)>;

double plane_distance(const AffinePlane& plane, const Vec& p) { return plane.distance_to(p); }

Mat orthonormalize(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ() * Mat::Identity(m.rows(), m.cols());
  Mat r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Mat complement_frame(const Mat& frame) {
  Eigen::FullPivHouseholderQR<Mat> qr(frame);
  Mat q = qr.matrixQ();
  return q.rightCols(frame.rows() - frame.cols());
}

/// Principal d-plane of the (weighted) normalized points with the given row
/// indices: weighted centroid + top-d eigenvectors of the weighted second
/// moment. Exact minimizer of sum w dist^2.
AffinePlane principal_plane(const Mat& pts, const std::vector<double>& w,
                            const std::vector<Eigen::Index>& rows, int d) {
  const int n = static_cast<int>(pts.cols());
  Vec mean = Vec::Zero(n);
  double total = 0.0;
  for (Eigen::Index i : rows) {
    const double wi = w.empty() ? 1.0 : w[static_cast<std::size_t>(i)];
    mean += wi * pts.row(i).transpose();
    total += wi;
  }
  if (total <= 0.0) total = 1.0;
  mean /= total;
  Mat cov = Mat::Zero(n, n);
  for (Eigen::Index i : rows) {
    const double wi = w.empty() ? 1.0 : w[static_cast<std::size_t>(i)];
    Vec v = pts.row(i).transpose() - mean;
    cov += wi * v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  // Eigenvalues ascending: the top d eigenvectors are the last d columns.
  Mat frame = es.eigenvectors().rightCols(d);
  return AffinePlane(mean, orthonormalize(frame));
}

/// Nelder-Mead over a local chart around `start`: (n-d) x d frame tilt plus
/// an (n-d)-vector offset, all dimensionless (coordinates are normalized by
/// the ball radius before the search).
struct SearchDiag {
  int evaluations = 0;
};

double nelder_mead_plane(const AffinePlane& start, const Objective& obj, AffinePlane* best_plane,
                         SearchDiag* diag) {
  const int n = start.ambient_dim();
  const int d = start.dim();
  const int m = (n - d) * d + (n - d);
  const Mat f0 = start.frame();
  const Mat nf = complement_frame(f0);
  const Vec b0 = start.base();

  auto decode = [&](const Vec& x) {
    Mat a(n - d, d);
    for (int i = 0; i < n - d; ++i)
      for (int j = 0; j < d; ++j) a(i, j) = x(i * d + j);
    Vec u = x.tail(n - d);
    Mat frame = orthonormalize(f0 + nf * a);
    return AffinePlane(b0 + nf * u, frame);
  };

  double best_val = std::numeric_limits<double>::infinity();
  AffinePlane best = start;
  auto eval = [&](const Vec& x) {
    AffinePlane pl = decode(x);
    const double v = obj(pl);
    ++diag->evaluations;
    if (v < best_val) {
      best_val = v;
      best = pl;
    }
    return v;
  };

  std::vector<Vec> simplex(static_cast<std::size_t>(m) + 1, Vec::Zero(m));
  std::vector<double> fv(static_cast<std::size_t>(m) + 1);
  for (int i = 0; i <= m; ++i) {
    if (i > 0) simplex[static_cast<std::size_t>(i)](i - 1) = 0.35;
    fv[static_cast<std::size_t>(i)] = eval(simplex[static_cast<std::size_t>(i)]);
  }
  const int max_iter = 80 * m;
  for (int it = 0; it < max_iter; ++it) {
    std::vector<int> ord(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) ord[static_cast<std::size_t>(i)] = i;
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
      return fv[static_cast<std::size_t>(a)] < fv[static_cast<std::size_t>(b)];
    });
    const int lo = ord.front(), hi = ord.back(), second_hi = ord[static_cast<std::size_t>(m) - 1];
    if (fv[static_cast<std::size_t>(hi)] - fv[static_cast<std::size_t>(lo)] <
        1e-14 * (1.0 + std::abs(fv[static_cast<std::size_t>(lo)])))
      break;
    Vec centroid = Vec::Zero(m);
    for (int i = 0; i <= m; ++i)
      if (i != hi) centroid += simplex[static_cast<std::size_t>(i)];
    centroid /= m;
    Vec xr = centroid + (centroid - simplex[static_cast<std::size_t>(hi)]);
    const double fr = eval(xr);
    if (fr < fv[static_cast<std::size_t>(lo)]) {
      Vec xe = centroid + 2.0 * (centroid - simplex[static_cast<std::size_t>(hi)]);
      const double fe = eval(xe);
      simplex[static_cast<std::size_t>(hi)] = fe < fr ? xe : xr;
      fv[static_cast<std::size_t>(hi)] = std::min(fe, fr);
    } else if (fr < fv[static_cast<std::size_t>(second_hi)]) {
      simplex[static_cast<std::size_t>(hi)] = xr;
      fv[static_cast<std::size_t>(hi)] = fr;
    } else {
      Vec xc = centroid + 0.5 * (simplex[static_cast<std::size_t>(hi)] - centroid);
      const double fc = eval(xc);
      if (fc < fv[static_cast<std::size_t>(hi)]) {
        simplex[static_cast<std::size_t>(hi)] = xc;
        fv[static_cast<std::size_t>(hi)] = fc;
      } else {
        for (int i = 0; i <= m; ++i) {
          if (i == lo) continue;
          simplex[static_cast<std::size_t>(i)] =
              simplex[static_cast<std::size_t>(lo)] +
              0.5 * (simplex[static_cast<std::size_t>(i)] - simplex[static_cast<std::size_t>(lo)]);
          fv[static_cast<std::size_t>(i)] = eval(simplex[static_cast<std::size_t>(i)]);
        }
      }
    }
  }
  *best_plane = best;
  return best_val;
}

/// Multi-start search per the artifact's plane-search design: principal plane
/// of the ball points plus principal planes of 8 seeded half-samples.
double multistart_search(const BallContext& ctx, const Objective& obj, BetaResult* result) {
  const Mat& pts = ctx.sub.points();
  std::vector<Eigen::Index> all(static_cast<std::size_t>(pts.rows()));
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
  static const std::vector<double> kUnweighted;
  const std::vector<double>& w = ctx.sub.has_weights() ? ctx.sub.weights() : kUnweighted;

  std::vector<AffinePlane> starts;
  starts.push_back(principal_plane(pts, w, all, ctx.d));
  Rng rng(kBetaSeed);
  for (int s = 0; s < 8; ++s) {
    std::vector<Eigen::Index> half;
    for (Eigen::Index i : all)
      if (rng.uniform() < 0.5) half.push_back(i);
    if (half.size() < 2) half = all;
    starts.push_back(principal_plane(pts, w, half, ctx.d));
  }

  double best = std::numeric_limits<double>::infinity();
  double worst_start = 0.0;
  AffinePlane best_plane = starts.front();
  SearchDiag diag;
  for (const AffinePlane& s : starts) {
    AffinePlane pl = s;
    const double v = nelder_mead_plane(s, obj, &pl, &diag);
    worst_start = std::max(worst_start, v);
    if (v < best) {
      best = v;
      best_plane = pl;
    }
  }
  result->starts = static_cast<int>(starts.size());
  result->evaluations = diag.evaluations;
  result->multi_start_spread = worst_start - best;
  result->optimal_plane = best_plane;
  return best;
}

/// Exact sup-beta line for planar point sets: the minimal enclosing slab.
/// Candidate directions are the pair chords and their perpendiculars (small
/// sets) or the convex-hull edges (larger sets); the minimum width over those
/// directions is the true minimum.
double planar_width_line(const Mat& pts, bool pairs_only, AffinePlane* plane_out) {
  const Eigen::Index m = pts.rows();
  std::vector<Eigen::Vector2d> dirs;
  auto add_dir = [&](double dx, double dy) {
    const double norm = std::hypot(dx, dy);
    if (norm < 1e-300) return;
    dirs.emplace_back(dx / norm, dy / norm);
  };
  if (pairs_only || m <= 3) {
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i + 1; j < m; ++j) {
        add_dir(pts(j, 0) - pts(i, 0), pts(j, 1) - pts(i, 1));
        add_dir(pts(i, 1) - pts(j, 1), pts(j, 0) - pts(i, 0));  // perpendicular slab
      }
  } else {
    // Andrew monotone chain hull; slab width is attained flush with an edge.
    std::vector<Eigen::Index> ord(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = static_cast<Eigen::Index>(i);
    std::sort(ord.begin(), ord.end(), [&](Eigen::Index a, Eigen::Index b) {
      return pts(a, 0) != pts(b, 0) ? pts(a, 0) < pts(b, 0) : pts(a, 1) < pts(b, 1);
    });
    auto cross = [&](Eigen::Index o, Eigen::Index a, Eigen::Index b) {
      return (pts(a, 0) - pts(o, 0)) * (pts(b, 1) - pts(o, 1)) -
             (pts(a, 1) - pts(o, 1)) * (pts(b, 0) - pts(o, 0));
    };
    std::vector<Eigen::Index> hull;
    for (int pass = 0; pass < 2; ++pass) {
      const std::size_t base = hull.size();
      for (Eigen::Index idx : ord) {
        while (hull.size() >= base + 2 &&
               cross(hull[hull.size() - 2], hull[hull.size() - 1], idx) <= 0.0)
          hull.pop_back();
        hull.push_back(idx);
      }
      hull.pop_back();
      std::reverse(ord.begin(), ord.end());
    }
    if (hull.size() < 2) {
      add_dir(1.0, 0.0);
    } else {
      for (std::size_t i = 0; i < hull.size(); ++i) {
        const Eigen::Index a = hull[i], b = hull[(i + 1) % hull.size()];
        add_dir(pts(b, 0) - pts(a, 0), pts(b, 1) - pts(a, 1));
      }
    }
  }
  if (dirs.empty()) add_dir(1.0, 0.0);

  double best_width = std::numeric_limits<double>::infinity();
  Eigen::Vector2d best_dir = dirs.front();
  double best_mid = 0.0;
  for (const auto& u : dirs) {
    const Eigen::Vector2d nrm(-u(1), u(0));
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double c = nrm(0) * pts(i, 0) + nrm(1) * pts(i, 1);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    if (hi - lo < best_width) {
      best_width = hi - lo;
      best_dir = u;
      best_mid = 0.5 * (lo + hi);
    }
  }
  if (plane_out) {
    Mat frame(2, 1);
    frame(0, 0) = best_dir(0);
    frame(1, 0) = best_dir(1);
    Vec base(2);
    base(0) = -best_dir(1) * best_mid;
    base(1) = best_dir(0) * best_mid;
    *plane_out = AffinePlane(base, frame);
  }
  return best_width / 2.0;
}

BallContext make_context(const PointCloud& cloud, const Ball& ball, int d, double min_scale) {
  if (d < 1 || d > cloud.ambient_dim() - 1) throw InvalidArgument("beta: need 1 <= d <= n-1");
  const int n = cloud.ambient_dim();
  BallContext ctx;
  ctx.center = ball.center;
  ctx.rot = Mat::Identity(n, n);
  ctx.r = ball.radius;
  ctx.d = d;
  ctx.min_scale = min_scale / ball.radius;
  std::vector<Eigen::Index> idx = points_in_ball(cloud, ball);
  Mat sub(static_cast<Eigen::Index>(idx.size()), n);
  std::vector<double> w;
  if (cloud.has_weights()) w.reserve(idx.size());
  for (Eigen::Index r = 0; r < sub.rows(); ++r) {
    sub.row(r) = (cloud.points().row(idx[static_cast<std::size_t>(r)]) - ball.center.transpose()) / ball.radius;
    if (cloud.has_weights()) w.push_back(cloud.weights()[static_cast<std::size_t>(idx[static_cast<std::size_t>(r)])]);
  }
  if (sub.rows() > 1) {
    // Principal frame of the ball points, ordered by descending spread, with
    // signs fixed by the third moment. Covariant under rigid motions, so the
    // canonical coordinates (and the content grid anchored in them) do not
    // see the ambient orientation.
    Vec mean = sub.colwise().mean().transpose();
    Mat centered = sub.rowwise() - mean.transpose();
    Mat cov = centered.transpose() * centered;
    Eigen::SelfAdjointEigenSolver<Mat> es(cov);
    Mat q(n, n);
    for (int j = 0; j < n; ++j) {
      Vec v = es.eigenvectors().col(n - 1 - j);
      double m3 = 0.0;
      for (Eigen::Index i = 0; i < centered.rows(); ++i) {
        const double t = centered.row(i) * v;
        m3 += t * t * t;
      }
      if (m3 < 0.0) v = -v;
      q.col(j) = v;
    }
    ctx.rot = q;
    sub = sub * q;  // z = Q^T y, rowwise
  }
  const double res = cloud.resolution() / ball.radius;
  if (sub.rows() > 0) ctx.sub = PointCloud(std::move(sub), res, std::move(w));
  return ctx;
}

/// Map a plane found in canonical coordinates back to the original frame.
AffinePlane denormalize_plane(const AffinePlane& pl, const BallContext& ctx) {
  return AffinePlane(ctx.center + ctx.r * (ctx.rot * pl.base()), ctx.rot * pl.frame());
}

}  // namespace

BetaResult beta_inf(const PointCloud& cloud, const Ball& ball, int d) {
  BetaResult res;
  res.p = kBetaInfinity;
  res.ball = ball;
  BallContext ctx = make_context(cloud, ball, d, cloud.resolution());
  const Eigen::Index m = ctx.sub.size();
  if (m == 0) {
    res.empty_intersection = true;
    return res;
  }
  if (cloud.ambient_dim() == 2 && d == 1) {
    AffinePlane plane;
    res.value = planar_width_line(ctx.sub.points(), m <= kSmallInstance, &plane);
    res.optimal_plane = denormalize_plane(plane, ctx);
    res.starts = 1;
    return res;
  }
  Objective obj = [&](const AffinePlane& pl) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) worst = std::max(worst, plane_distance(pl, ctx.sub.point(i)));
    return worst;
  };
  res.value = multistart_search(ctx, obj, &res);
  res.optimal_plane = denormalize_plane(res.optimal_plane, ctx);
  return res;
}

namespace {

/// Lines through point pairs, evaluated exactly; the small-instance search
/// for the integral betas in the plane.
double pair_line_search(const BallContext& ctx, const Objective& obj, BetaResult* res) {
  const Mat& pts = ctx.sub.points();
  const Eigen::Index m = pts.rows();
  double best = std::numeric_limits<double>::infinity();
  AffinePlane best_plane;
  bool found = false;
  int evals = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = i + 1; j < m; ++j) {
      Eigen::Vector2d diff(pts(j, 0) - pts(i, 0), pts(j, 1) - pts(i, 1));
      const double norm = diff.norm();
      if (norm < 1e-14) continue;
      Mat frame(2, 1);
      frame(0, 0) = diff(0) / norm;
      frame(1, 0) = diff(1) / norm;
      AffinePlane pl(pts.row(i).transpose(), frame);
      const double v = obj(pl);
      ++evals;
      if (v < best) {
        best = v;
        best_plane = pl;
        found = true;
      }
    }
  if (!found) {  // all points coincide
    Mat frame(2, 1);
    frame(0, 0) = 1.0;
    frame(1, 0) = 0.0;
    best_plane = AffinePlane(pts.row(0).transpose(), frame);
    best = obj(best_plane);
    ++evals;
  }
  res->starts = evals;
  res->evaluations = evals;
  res->optimal_plane = best_plane;
  return best;
}

}  // namespace

BetaResult beta_content_p(const PointCloud& cloud, const Ball& ball, int d, double p,
                          double min_scale) {
  if (!(p >= 1.0)) throw InvalidArgument("beta_content_p: p >= 1");
  if (!(min_scale >= cloud.resolution()))
    throw InvalidArgument("beta_content_p: min_scale >= cloud resolution");
  BetaResult res;
  res.p = p;
  res.ball = ball;
  BallContext ctx = make_context(cloud, ball, d, min_scale);
  const Eigen::Index m = ctx.sub.size();
  if (m == 0) {
    res.empty_intersection = true;
    return res;
  }
  std::vector<double> f(static_cast<std::size_t>(m));
  Objective obj = [&](const AffinePlane& pl) {
    for (Eigen::Index i = 0; i < m; ++i) f[static_cast<std::size_t>(i)] = plane_distance(pl, ctx.sub.point(i));
    const double integral = choquet_integral(ctx.sub, f, ctx.d, p, ctx.min_scale);
    return std::pow(integral, 1.0 / p);
  };
  if (cloud.ambient_dim() == 2 && d == 1 && m <= kSmallInstance) {
    res.value = pair_line_search(ctx, obj, &res);
  } else {
    res.value = multistart_search(ctx, obj, &res);
  }
  res.optimal_plane = denormalize_plane(res.optimal_plane, ctx);
  return res;
}

BetaResult beta_measure_p(const PointCloud& cloud, const Ball& ball, int d, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("beta_measure_p: p >= 1");
  if (!cloud.has_weights()) throw InvalidArgument("beta_measure_p: weights required");
  BetaResult res;
  res.p = p;
  res.ball = ball;
  BallContext ctx = make_context(cloud, ball, d, cloud.resolution());
  const Eigen::Index m = ctx.sub.size();
  if (m == 0) {
    res.empty_intersection = true;
    return res;
  }
  double total_weight = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) total_weight += ctx.sub.weight(i);
  if (!(total_weight > 0.0)) throw InvalidArgument("beta_measure_p: zero total weight in ball");

  // Weights scale as r^d under the normalization to the unit ball.
  const double weight_scale = 1.0 / ipow(ctx.r, d);
  Objective obj = [&](const AffinePlane& pl) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
      sum += ctx.sub.weight(i) * weight_scale * std::pow(plane_distance(pl, ctx.sub.point(i)), p);
    return std::pow(sum, 1.0 / p);
  };
  if (p == 2.0) {
    std::vector<Eigen::Index> all(static_cast<std::size_t>(m));
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<Eigen::Index>(i);
    AffinePlane pl = principal_plane(ctx.sub.points(), ctx.sub.weights(), all, d);
    res.value = obj(pl);
    res.optimal_plane = denormalize_plane(pl, ctx);
    res.starts = 1;
    res.evaluations = 1;
    return res;
  }
  if (cloud.ambient_dim() == 2 && d == 1 && m <= kSmallInstance) {
    res.value = pair_line_search(ctx, obj, &res);
  } else {
    res.value = multistart_search(ctx, obj, &res);
  }
  res.optimal_plane = denormalize_plane(res.optimal_plane, ctx);
  return res;
}

double transfer_term(const PointCloud& e1, const PointCloud& e2, const Ball& ball, int d, double p,
                     double min_scale) {
  if (!(p >= 1.0)) throw InvalidArgument("transfer_term: p >= 1");
  if (e2.size() == 0) throw InvalidArgument("transfer_term: empty comparison cloud");
  const Ball twice(ball.center, 2.0 * ball.radius);
  std::vector<Eigen::Index> idx = points_in_ball(e1, twice);
  if (idx.empty()) return 0.0;
  PointCloud sub = e1.subset(idx);
  const double r = ball.radius;
  std::vector<double> f(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    const Vec y = sub.point(static_cast<Eigen::Index>(i));
    for (Eigen::Index j = 0; j < e2.size(); ++j)
      best = std::min(best, (e2.point(j) - y).norm());
    f[i] = best / r;
  }
  const double integral = choquet_integral(sub, f, d, p, std::max(min_scale, sub.resolution()));
  return std::pow(integral / ipow(r, d), 1.0 / p);
}

}  // namespace qrect
