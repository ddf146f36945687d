#include "arbor/qsm/qsm.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "arbor/common/error.hpp"
#include "arbor/geom/kdtree.hpp"
#include "arbor/kernels/nearest.hpp"
#include "arbor/metrics/metrics.hpp"

namespace arbor {

void QsmParams::validate() const {
  require(slice_thickness > 0, "qsm params: slice_thickness must be > 0");
  require(measure_height > 0, "qsm params: measure_height must be > 0");
  require(knn_k > 0, "qsm params: knn_k must be > 0");
  require(level_step > 0, "qsm params: level_step must be > 0");
  require(min_branch_length > 0, "qsm params: min_branch_length must be > 0");
  require(min_branch_points > 0, "qsm params: min_branch_points must be > 0");
  require(circle_fit_max_rmse > 0, "qsm params: circle_fit_max_rmse must be > 0");
  require(max_orphan_fraction >= 0 && max_orphan_fraction < 1, "qsm params: max_orphan_fraction must be in [0, 1)");
}

std::vector<std::size_t> statistical_inliers(const PointCloud& cloud, int k, double std_ratio) {
  const KdTree index(cloud.points);
  const auto rows = kernels::self_knn(index, static_cast<std::size_t>(k));
  std::vector<double> md(cloud.size(), 0.0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double s = 0.0;
    for (const auto& h : rows[i]) s += h.distance;
    md[i] = rows[i].empty() ? 0.0 : s / static_cast<double>(rows[i].size());
  }
  const double limit = mean(md) + std_ratio * population_std(md);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < md.size(); ++i) {
    if (md[i] <= limit) keep.push_back(i);
  }
  return keep;
}

double tree_height(const PointCloud& cloud, double p_lo, double p_hi) {
  require(cloud.size() >= 10, "tree_height: need at least 10 points");
  require(0 <= p_lo && p_lo < p_hi && p_hi <= 1, "tree_height: percentiles must satisfy 0 <= lo < hi <= 1");
  const auto keep = statistical_inliers(cloud);
  std::vector<double> z;
  z.reserve(keep.size());
  for (auto i : keep) z.push_back(cloud.points[i].z());
  std::sort(z.begin(), z.end());
  return percentile(z, p_hi) - percentile(z, p_lo);
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  // The smaller index becomes the representative.
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a;
    else parent[a] = b;
  }
};

struct Graph {
  std::vector<std::size_t> offset;
  std::vector<std::uint32_t> nbr;
  std::vector<double> w;
};

Graph knn_graph(const std::vector<Vec3>& pts, int k) {
  const KdTree index(pts);
  const auto rows = kernels::self_knn(index, static_cast<std::size_t>(k));
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj(pts.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& h : rows[i]) {
      adj[i].emplace_back(static_cast<std::uint32_t>(h.index), h.distance);
      adj[h.index].emplace_back(static_cast<std::uint32_t>(i), h.distance);
    }
  }
  Graph g;
  g.offset.assign(pts.size() + 1, 0);
  for (std::size_t i = 0; i < adj.size(); ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
            a.end());
    g.offset[i + 1] = g.offset[i] + a.size();
  }
  g.nbr.reserve(g.offset.back());
  g.w.reserve(g.offset.back());
  for (const auto& a : adj) {
    for (const auto& [j, d] : a) {
      g.nbr.push_back(j);
      g.w.push_back(d);
    }
  }
  return g;
}

}  // namespace

SkeletonGraph extract_skeleton(const PointCloud& cloud, const QsmParams& params) {
  params.validate();
  cloud.validate();
  require(cloud.size() >= 100, "extract_skeleton: need at least 100 points");
  const auto& pts = cloud.points;
  const std::size_t n = pts.size();
  const Graph g = knn_graph(pts, params.knn_k);

  // Main connected component.
  UnionFind comps(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e) comps.unite(static_cast<std::uint32_t>(i), g.nbr[e]);
  }
  std::vector<std::size_t> comp_size(n, 0);
  for (std::size_t i = 0; i < n; ++i) ++comp_size[comps.find(static_cast<std::uint32_t>(i))];
  std::uint32_t main_comp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (comp_size[i] > comp_size[main_comp]) main_comp = static_cast<std::uint32_t>(i);
  }
  const double orphan_fraction = 1.0 - static_cast<double>(comp_size[main_comp]) / static_cast<double>(n);
  if (orphan_fraction > params.max_orphan_fraction) {
    std::vector<std::size_t> sizes;
    for (auto s : comp_size) {
      if (s > 0) sizes.push_back(s);
    }
    std::sort(sizes.rbegin(), sizes.rend());
    throw SkeletonizationError("extract_skeleton: k-NN graph is disconnected (" + std::to_string(sizes.size()) +
                                   " components)",
                               sizes);
  }
  std::vector<char> in_main(n);
  for (std::size_t i = 0; i < n; ++i) in_main[i] = comps.find(static_cast<std::uint32_t>(i)) == main_comp;

  // Root slab and geodesic distances.
  double z_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (in_main[i]) z_min = std::min(z_min, pts[i].z());
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<std::int64_t> pred(n, -1);
  using Item = std::pair<double, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < n; ++i) {
    if (in_main[i] && pts[i].z() <= z_min + params.level_step) {
      dist[i] = 0.0;
      heap.emplace(0.0, static_cast<std::uint32_t>(i));
    }
  }
  std::vector<std::uint32_t> order;
  order.reserve(n);
  std::vector<char> done(n, 0);
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (done[i]) continue;
    done[i] = 1;
    order.push_back(i);
    for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e) {
      const auto j = g.nbr[e];
      const double nd = d + g.w[e];
      if (nd < dist[j]) {
        dist[j] = nd;
        pred[j] = i;
        heap.emplace(nd, j);
      }
    }
  }

  // Per-level connected clusters; level 0 is the single root cluster.
  std::vector<std::int64_t> level(n, -1);
  for (auto i : order) level[i] = static_cast<std::int64_t>(std::floor(dist[i] / params.level_step));
  UnionFind lv(n);
  for (auto i : order) {
    for (std::size_t e = g.offset[i]; e < g.offset[i + 1]; ++e) {
      const auto j = g.nbr[e];
      if (level[j] == level[i]) lv.unite(i, j);
    }
  }
  std::vector<std::uint32_t> reps;
  for (auto i : order) {
    if (level[i] == 0) lv.unite(order.front(), i);
  }
  for (auto i : order) reps.push_back(lv.find(i));
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  // Cluster ids ordered by (level, representative index).
  std::sort(reps.begin(), reps.end(), [&](std::uint32_t a, std::uint32_t b) {
    return level[a] != level[b] ? level[a] < level[b] : a < b;
  });
  std::vector<std::int64_t> rep_id(n, -1);
  for (std::size_t c = 0; c < reps.size(); ++c) rep_id[reps[c]] = static_cast<std::int64_t>(c);
  const std::size_t nc = reps.size();
  std::vector<std::uint32_t> cluster(n, 0);
  for (auto i : order) cluster[i] = static_cast<std::uint32_t>(rep_id[lv.find(i)]);

  // Parent of each cluster: majority exit cluster along shortest-path predecessors.
  std::vector<std::uint32_t> exit(n, 0);
  std::vector<std::vector<std::pair<std::uint32_t, std::size_t>>> votes(nc);
  for (auto i : order) {
    if (pred[i] < 0) continue;
    const auto p = static_cast<std::uint32_t>(pred[i]);
    exit[i] = cluster[p] != cluster[i] ? cluster[p] : exit[p];
    if (cluster[i] == 0) continue;
    auto& v = votes[cluster[i]];
    auto it = std::find_if(v.begin(), v.end(), [&](const auto& x) { return x.first == exit[i]; });
    if (it == v.end()) v.emplace_back(exit[i], 1);
    else ++it->second;
  }

  SkeletonGraph sk;
  sk.nodes.resize(nc);
  sk.support.assign(nc, 0);
  std::vector<Vec3> sum(nc, Vec3::Zero());
  for (auto i : order) {
    sum[cluster[i]] += pts[i];
    ++sk.support[cluster[i]];
  }
  for (std::size_t c = 0; c < nc; ++c) sk.nodes[c].position = sum[c] / static_cast<double>(sk.support[c]);
  std::vector<double> spread(nc, 0.0);
  for (auto i : order) {
    Vec3 d = pts[i] - sk.nodes[cluster[i]].position;
    if (cluster[i] == 0) d.z() = 0.0;
    spread[cluster[i]] += d.squaredNorm();
  }
  for (std::size_t c = 0; c < nc; ++c) {
    sk.nodes[c].radius = std::max(std::sqrt(spread[c] / static_cast<double>(sk.support[c])), 1e-9);
  }
  sk.nodes[0].position.z() = z_min;

  std::vector<std::vector<std::uint32_t>> children(nc);
  for (std::size_t c = 1; c < nc; ++c) {
    const auto& v = votes[c];
    std::uint32_t parent = 0;
    std::size_t best = 0;
    for (const auto& [pc, count] : v) {
      if (count > best || (count == best && pc < parent)) {
        best = count;
        parent = pc;
      }
    }
    sk.edges.emplace_back(parent, static_cast<std::uint32_t>(c));
    children[parent].push_back(static_cast<std::uint32_t>(c));
  }

  // Trunk: root-to-leaf path maximising the sum of radius * edge length.
  std::vector<double> best(nc, 0.0);
  std::vector<std::int64_t> next(nc, -1);
  for (std::size_t c = nc; c-- > 0;) {
    for (auto ch : children[c]) {
      const double len = (sk.nodes[ch].position - sk.nodes[c].position).norm();
      const double score = 0.5 * (sk.nodes[c].radius + sk.nodes[ch].radius) * len + best[ch];
      if (next[c] < 0 || score > best[c]) {
        best[c] = score;
        next[c] = ch;
      }
    }
  }
  for (std::int64_t c = 0; c >= 0; c = next[c]) sk.trunk_path.push_back(static_cast<std::uint32_t>(c));

  std::vector<char> on_trunk(nc, 0);
  for (auto c : sk.trunk_path) on_trunk[c] = 1;
  // Subtree reach and support for branch roots.
  std::vector<double> reach(nc, 0.0);
  std::vector<std::size_t> mass(sk.support.begin(), sk.support.end());
  for (std::size_t c = nc; c-- > 0;) {
    for (auto ch : children[c]) {
      if (on_trunk[ch]) continue;
      reach[c] = std::max(reach[c], reach[ch] + (sk.nodes[ch].position - sk.nodes[c].position).norm());
      mass[c] += mass[ch];
    }
  }
  for (auto t : sk.trunk_path) {
    for (auto ch : children[t]) {
      if (on_trunk[ch]) continue;
      const double len = reach[ch] + (sk.nodes[ch].position - sk.nodes[t].position).norm();
      if (len >= params.min_branch_length && mass[ch] >= static_cast<std::size_t>(params.min_branch_points)) {
        sk.branch_roots.push_back(t);
      }
    }
  }
  return sk;
}

CircleFit fit_circle(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.size() < 3) throw TraitUnavailable("circle fit: fewer than 3 points");
  Eigen::Vector2d mean_pt = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean_pt += p;
  mean_pt /= static_cast<double>(pts.size());

  const auto m = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXd a(m, 3);
  Eigen::VectorXd b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Vector2d q = pts[i] - mean_pt;
    a(i, 0) = q.x();
    a(i, 1) = q.y();
    a(i, 2) = 1.0;
    b(i) = -q.squaredNorm();
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 3) throw TraitUnavailable("circle fit: degenerate point configuration");
  const Eigen::Vector3d s = qr.solve(b);
  Eigen::Vector2d c(-s(0) / 2.0, -s(1) / 2.0);
  double r2 = c.squaredNorm() - s(2);
  if (!(r2 > 0) || !std::isfinite(r2)) throw TraitUnavailable("circle fit: algebraic fit has no real radius");
  double r = std::sqrt(r2);

  Eigen::MatrixXd j(m, 3);
  Eigen::VectorXd res(m);
  for (int it = 0; it < 50; ++it) {
    for (Eigen::Index i = 0; i < m; ++i) {
      const Eigen::Vector2d d = pts[i] - mean_pt - c;
      const double len = std::max(d.norm(), 1e-300);
      res(i) = len - r;
      j(i, 0) = -d.x() / len;
      j(i, 1) = -d.y() / len;
      j(i, 2) = -1.0;
    }
    const Eigen::Vector3d step = j.colPivHouseholderQr().solve(-res);
    if (!step.allFinite()) break;
    c += step.head<2>();
    r += step(2);
    if (step.norm() <= 1e-14 * std::max(1.0, r)) break;
  }
  if (!(r > 0) || !std::isfinite(r) || !c.allFinite()) throw TraitUnavailable("circle fit: refinement diverged");
  double sse = 0.0;
  for (const auto& p : pts) {
    const double e = (p - mean_pt - c).norm() - r;
    sse += e * e;
  }
  CircleFit fit;
  fit.center = c + mean_pt;
  fit.radius = r;
  fit.rmse = std::sqrt(sse / static_cast<double>(pts.size()));
  return fit;
}

DiameterResult trunk_diameter(const PointCloud& cloud, const SkeletonGraph& skeleton, const QsmParams& params) {
  params.validate();
  skeleton.validate();
  const auto& path = skeleton.trunk_path;
  const auto arc = skeleton.trunk_arc_length();
  const double h = params.measure_height;
  if (path.size() < 2 || arc.back() < h) {
    throw TraitUnavailable("trunk diameter: trunk path shorter than the measure height");
  }
  std::size_t i = 0;
  while (i + 2 < path.size() && arc[i + 1] < h) ++i;
  const double span = arc[i + 1] - arc[i];
  const double t = span > 0 ? (h - arc[i]) / span : 0.0;
  const auto& na = skeleton.nodes[path[i]];
  const auto& nb = skeleton.nodes[path[i + 1]];
  const Vec3 center = na.position + t * (nb.position - na.position);
  const double r_local = na.radius + t * (nb.radius - na.radius);
  const std::size_t lo = i >= 1 ? i - 1 : 0;
  const std::size_t hi = std::min(path.size() - 1, i + 2);
  const Vec3 tangent = (skeleton.nodes[path[hi]].position - skeleton.nodes[path[lo]].position).normalized();
  if (!tangent.allFinite()) throw TraitUnavailable("trunk diameter: degenerate trunk tangent");

  Vec3 helper = std::abs(tangent.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (helper - helper.dot(tangent) * tangent).normalized();
  const Vec3 e2 = tangent.cross(e1);
  const double gate = 3.0 * r_local;
  std::vector<Eigen::Vector2d> slice;
  for (const Vec3& p : cloud.points) {
    const Vec3 d = p - center;
    if (std::abs(d.dot(tangent)) > params.slice_thickness) continue;
    const Eigen::Vector2d q(d.dot(e1), d.dot(e2));
    if (q.norm() <= gate) slice.push_back(q);
  }
  if (slice.size() < 6) {
    throw TraitUnavailable("trunk diameter: " + std::to_string(slice.size()) + " points in the measurement slice");
  }
  DiameterResult out;
  out.fit = fit_circle(slice);
  out.slice_points = slice.size();
  if (out.fit.rmse > params.circle_fit_max_rmse) {
    throw TraitUnavailable("trunk diameter: circle fit rmse " + std::to_string(out.fit.rmse) + " m exceeds limit");
  }
  out.diameter = 2.0 * out.fit.radius;
  return out;
}

int count_branches(const SkeletonGraph& skeleton, const QsmParams& params) {
  params.validate();
  skeleton.validate();
  const std::size_t nc = skeleton.nodes.size();
  const auto adj = skeleton.adjacency();
  const auto root = skeleton.trunk_path.front();
  std::vector<std::int64_t> parent(nc, -1);
  std::vector<std::uint32_t> bfs{root};
  parent[root] = root;
  for (std::size_t k = 0; k < bfs.size(); ++k) {
    for (auto m : adj[bfs[k]]) {
      if (parent[m] < 0) {
        parent[m] = bfs[k];
        bfs.push_back(m);
      }
    }
  }
  std::vector<char> on_trunk(nc, 0);
  for (auto c : skeleton.trunk_path) on_trunk[c] = 1;
  const bool use_support = !skeleton.support.empty();
  std::vector<double> reach(nc, 0.0);
  std::vector<std::size_t> mass(nc, 0);
  for (std::size_t c = 0; c < nc; ++c) mass[c] = use_support ? skeleton.support[c] : 0;
  int count = 0;
  for (std::size_t k = bfs.size(); k-- > 1;) {
    const auto c = bfs[k];
    const auto p = static_cast<std::uint32_t>(parent[c]);
    if (on_trunk[c]) continue;
    const double len = reach[c] + (skeleton.nodes[c].position - skeleton.nodes[p].position).norm();
    if (on_trunk[p]) {
      const bool enough = !use_support || mass[c] >= static_cast<std::size_t>(params.min_branch_points);
      if (len >= params.min_branch_length && enough) ++count;
    } else {
      reach[p] = std::max(reach[p], len);
      mass[p] += mass[c];
    }
  }
  return count;
}

TraitReport extract_traits(const PointCloud& cloud, const QsmParams& params) {
  params.validate();
  TraitReport rep;
  rep.tree_height = tree_height(cloud);
  SkeletonGraph sk;
  try {
    sk = extract_skeleton(cloud, params);
  } catch (const SkeletonizationError& e) {
    rep.unavailable_reason = e.what();
    return rep;
  }
  rep.diagnostics.skeleton_nodes = sk.nodes.size();
  rep.branch_count = count_branches(sk, params);
  try {
    const auto d = trunk_diameter(cloud, sk, params);
    rep.trunk_diameter = d.diameter;
    rep.diagnostics.circle_fit_rmse = d.fit.rmse;
    rep.diagnostics.slice_points = d.slice_points;
  } catch (const TraitUnavailable& e) {
    rep.unavailable_reason = e.what();
  }
  return rep;
}

}  // namespace arbor
