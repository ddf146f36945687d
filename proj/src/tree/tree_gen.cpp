#include "arbor/tree/tree_gen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "arbor/common/error.hpp"
#include "arbor/common/rng.hpp"

namespace arbor {

namespace {

constexpr double kTrunkNodeSpacing = 0.04;   // m
constexpr double kBranchNodeSpacing = 0.05;  // m
constexpr double kCtrlSpacing = 0.5;         // m between trunk wander control points
constexpr double kMinBranchRadius = 0.0015;  // m
constexpr double kBranchTipTaper = 0.6;      // radius lost from base to tip, fraction
constexpr double kDroop = 0.15;              // tip sag as a fraction of branch length
constexpr double kBranchStartInset = 0.75;   // first branch ring, in trunk radii from the axis

/// Uniform Catmull-Rom through (k * spacing, ctrl[k]) evaluated at z.
Eigen::Vector2d catmull_rom(const std::vector<Eigen::Vector2d>& ctrl, double spacing, double z) {
  const int n = static_cast<int>(ctrl.size());
  const double f = std::clamp(z / spacing, 0.0, static_cast<double>(n - 1));
  const int k = std::min(static_cast<int>(std::floor(f)), n - 2);
  const double t = f - k;
  auto at = [&](int i) { return ctrl[std::clamp(i, 0, n - 1)]; };
  const Eigen::Vector2d p0 = at(k - 1), p1 = at(k), p2 = at(k + 1), p3 = at(k + 2);
  const double t2 = t * t, t3 = t2 * t;
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3);
}

/// Circumradius per unit nominal radius so that the polygon's mean distance
/// from the axis (averaged along its perimeter) equals the nominal radius.
double ring_scale() {
  const double a = std::numbers::pi / kRingSides;
  return a / (std::cos(a) * std::asinh(std::tan(a)));
}

/// Generalized cylinder through `centers` with `kRingSides`-gon rings and fan caps.
void sweep(const std::vector<Vec3>& centers, const std::vector<double>& radii, TriMesh& mesh) {
  const std::size_t m = centers.size();
  std::vector<Vec3> tangent(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Vec3 a = centers[i == 0 ? 0 : i - 1];
    const Vec3 b = centers[i + 1 == m ? m - 1 : i + 1];
    tangent[i] = (b - a).normalized();
  }
  // Parallel-transported frame avoids ring twist.
  Vec3 axis = Vec3::UnitX();
  if (std::abs(tangent[0].y()) < std::abs(tangent[0].dot(axis))) axis = Vec3::UnitY();
  if (std::abs(tangent[0].z()) < std::abs(tangent[0].dot(axis))) axis = Vec3::UnitZ();
  Vec3 normal = (axis - axis.dot(tangent[0]) * tangent[0]).normalized();

  const double scale = ring_scale();
  const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
  for (std::size_t i = 0; i < m; ++i) {
    normal = (normal - normal.dot(tangent[i]) * tangent[i]).normalized();
    const Vec3 binormal = tangent[i].cross(normal);
    for (int j = 0; j < kRingSides; ++j) {
      const double theta = 2.0 * std::numbers::pi * j / kRingSides;
      mesh.vertices.push_back(centers[i] + scale * radii[i] * (std::cos(theta) * normal + std::sin(theta) * binormal));
    }
  }
  auto ring = [&](std::size_t i, int j) {
    return base + static_cast<std::uint32_t>(i * kRingSides + (j % kRingSides));
  };
  for (std::size_t i = 0; i + 1 < m; ++i) {
    for (int j = 0; j < kRingSides; ++j) {
      mesh.triangles.push_back({ring(i, j), ring(i, j + 1), ring(i + 1, j + 1)});
      mesh.triangles.push_back({ring(i, j), ring(i + 1, j + 1), ring(i + 1, j)});
    }
  }
  const auto bottom = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back(centers.front());
  const auto top = static_cast<std::uint32_t>(mesh.vertices.size());
  mesh.vertices.push_back(centers.back());
  for (int j = 0; j < kRingSides; ++j) {
    mesh.triangles.push_back({bottom, ring(0, j + 1), ring(0, j)});
    mesh.triangles.push_back({top, ring(m - 1, j), ring(m - 1, j + 1)});
  }
}

}  // namespace

void TreeParams::validate() const {
  require(std::isfinite(trunk_height) && trunk_height > 0, "tree params: trunk_height must be > 0");
  require(std::isfinite(trunk_base_diameter) && trunk_base_diameter > 0,
          "tree params: trunk_base_diameter must be > 0");
  require(trunk_taper > 0 && trunk_taper <= 1, "tree params: trunk_taper must be in (0, 1]");
  require(branch_count >= 0, "tree params: branch_count must be >= 0");
  require(branch_zone.first >= 0 && branch_zone.first < branch_zone.second && branch_zone.second <= 1,
          "tree params: branch_zone must satisfy 0 <= low < high <= 1");
  require(branch_elevation_range.first <= branch_elevation_range.second &&
              branch_elevation_range.first > -90 && branch_elevation_range.second < 90,
          "tree params: branch_elevation_range must be ordered within (-90, 90) degrees");
  require(branch_length_range.first >= 0.05 && branch_length_range.first <= branch_length_range.second,
          "tree params: branch_length_range must be ordered with minimum >= 0.05 m");
  require(branch_diameter_ratio > 0 && branch_diameter_ratio < 1,
          "tree params: branch_diameter_ratio must be in (0, 1)");
  require(curvature_noise >= 0 && std::isfinite(curvature_noise), "tree params: curvature_noise must be >= 0");
}

TreeParams TreeParamRanges::draw(std::uint64_t seed, std::uint64_t index) const {
  Rng rng = Rng::stream(seed, "population", index);
  TreeParams p = fixed;
  p.seed = mix64(seed ^ mix64(index + 1));
  p.trunk_height = rng.uniform(trunk_height.first, trunk_height.second);
  p.trunk_base_diameter = rng.uniform(trunk_base_diameter.first, trunk_base_diameter.second);
  p.trunk_taper = rng.uniform(trunk_taper.first, trunk_taper.second);
  const auto span = static_cast<std::uint64_t>(branch_count.second - branch_count.first + 1);
  p.branch_count = branch_count.first + static_cast<int>(rng.index(span));
  return p;
}

std::size_t swept_triangle_count(std::span<const std::uint32_t> chain_rings) {
  std::size_t n = 0;
  for (auto rings : chain_rings) n += 2 * kRingSides * (rings - 1) + 2 * kRingSides;
  return n;
}

TreeModel generate_tree(const TreeParams& params) {
  params.validate();
  TreeModel model;
  model.params = params;
  const double H = params.trunk_height;
  const double r0 = params.trunk_base_diameter / 2.0;
  auto trunk_radius = [&](double z) { return r0 * (1.0 - (1.0 - params.trunk_taper) * z / H); };

  // Lateral trunk wander: Catmull-Rom through random offsets, pinned at the base.
  Rng trunk_rng = Rng::stream(params.seed, "trunk");
  const int n_ctrl = std::max(2, static_cast<int>(std::ceil(H / kCtrlSpacing)) + 1);
  const double ctrl_spacing = H / (n_ctrl - 1);
  std::vector<Eigen::Vector2d> ctrl(n_ctrl, Eigen::Vector2d::Zero());
  for (int k = 1; k < n_ctrl; ++k) {
    const double a = params.curvature_noise;
    ctrl[k] = {trunk_rng.uniform(-a, a), trunk_rng.uniform(-a, a)};
  }
  auto trunk_point = [&](double z) {
    const Eigen::Vector2d o = catmull_rom(ctrl, ctrl_spacing, z);
    return Vec3(o.x(), o.y(), z);
  };

  // Branch placement: seeded heights in the zone, stratified azimuths.
  Rng branch_rng = Rng::stream(params.seed, "branches");
  const int nb = params.branch_count;
  const double z_lo = params.branch_zone.first * H;
  const double z_hi = params.branch_zone.second * H;
  std::vector<double> heights(nb);
  for (auto& h : heights) h = branch_rng.uniform(z_lo, z_hi);
  std::sort(heights.begin(), heights.end());
  std::vector<int> strata(nb);
  std::iota(strata.begin(), strata.end(), 0);
  for (int i = nb - 1; i > 0; --i) {
    std::swap(strata[i], strata[branch_rng.index(static_cast<std::uint64_t>(i) + 1)]);
  }
  struct BranchDraw {
    double height, azimuth, elevation, length;
  };
  std::vector<BranchDraw> branches(nb);
  for (int i = 0; i < nb; ++i) {
    auto& b = branches[i];
    b.height = heights[i];
    b.azimuth = 2.0 * std::numbers::pi * (strata[i] + branch_rng.uniform()) / nb;
    b.elevation = branch_rng.uniform(params.branch_elevation_range.first, params.branch_elevation_range.second) *
                  std::numbers::pi / 180.0;
    // Tall-spindle habit: longer laterals low in the zone.
    const double t = z_hi > z_lo ? (b.height - z_lo) / (z_hi - z_lo) : 0.0;
    const auto [l_min, l_max] = params.branch_length_range;
    b.length = l_min + (l_max - l_min) * (1.0 - t) * branch_rng.uniform(0.6, 1.0);
  }

  // Trunk nodes on a regular grid plus one node per branch height.
  std::vector<double> trunk_z;
  const int n_grid = std::max(2, static_cast<int>(std::ceil(H / kTrunkNodeSpacing)));
  for (int j = 0; j <= n_grid; ++j) {
    const double z = H * j / n_grid;
    const bool crowded = std::any_of(heights.begin(), heights.end(),
                                     [z](double h) { return std::abs(h - z) < 0.005; });
    if (!crowded || j == 0 || j == n_grid) trunk_z.push_back(z);
  }
  for (double h : heights) {
    if (std::find(trunk_z.begin(), trunk_z.end(), h) == trunk_z.end()) trunk_z.push_back(h);
  }
  std::sort(trunk_z.begin(), trunk_z.end());

  SkeletonGraph& sk = model.skeleton;
  std::vector<Vec3> trunk_centers;
  std::vector<double> trunk_radii;
  for (std::size_t j = 0; j < trunk_z.size(); ++j) {
    const Vec3 p = trunk_point(trunk_z[j]);
    sk.nodes.push_back({p, trunk_radius(trunk_z[j])});
    sk.trunk_path.push_back(static_cast<std::uint32_t>(j));
    if (j > 0) sk.edges.emplace_back(static_cast<std::uint32_t>(j - 1), static_cast<std::uint32_t>(j));
    trunk_centers.push_back(p);
    trunk_radii.push_back(trunk_radius(trunk_z[j]));
  }
  sweep(trunk_centers, trunk_radii, model.mesh);
  model.chain_rings.push_back(static_cast<std::uint32_t>(trunk_centers.size()));

  for (const auto& b : branches) {
    const auto root = static_cast<std::uint32_t>(
        std::lower_bound(trunk_z.begin(), trunk_z.end(), b.height) - trunk_z.begin());
    sk.branch_roots.push_back(root);
    const Vec3 origin = sk.nodes[root].position;
    const double r_trunk = sk.nodes[root].radius;
    const Vec3 dir(std::cos(b.elevation) * std::cos(b.azimuth), std::cos(b.elevation) * std::sin(b.azimuth),
                   std::sin(b.elevation));
    const double r_base = std::max(kMinBranchRadius, params.branch_diameter_ratio * r_trunk);
    const double s0 = kBranchStartInset * r_trunk;
    const int n_seg = std::max(2, static_cast<int>(std::ceil((b.length - s0) / kBranchNodeSpacing)));

    std::vector<Vec3> centers;
    std::vector<double> radii;
    std::uint32_t prev = root;
    for (int k = 0; k <= n_seg; ++k) {
      const double s = s0 + (b.length - s0) * k / n_seg;
      const double f = s / b.length;
      const Vec3 p = origin + s * dir - Vec3::UnitZ() * (kDroop * b.length * f * f);
      const double r = std::max(kMinBranchRadius, r_base * (1.0 - kBranchTipTaper * f));
      const auto id = static_cast<std::uint32_t>(sk.nodes.size());
      sk.nodes.push_back({p, r});
      sk.edges.emplace_back(prev, id);
      prev = id;
      centers.push_back(p);
      radii.push_back(r);
    }
    sweep(centers, radii, model.mesh);
    model.chain_rings.push_back(static_cast<std::uint32_t>(centers.size()));
  }

  model.traits = ground_truth_traits(sk);
  return model;
}

PointCloud sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed) {
  require(!mesh.empty(), "sample_surface: mesh has no triangles");
  require(n > 0, "sample_surface: sample count must be positive");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    total += mesh.triangle_area(i);
    cumulative[i] = total;
  }
  require(total > 0, "sample_surface: mesh has zero area");

  Rng rng = Rng::stream(seed, "surface");
  PointCloud cloud;
  cloud.points.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t t = std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const auto& tri = mesh.triangles[t];
    cloud.points.push_back((1.0 - r1) * mesh.vertices[tri[0]] + r1 * (1.0 - r2) * mesh.vertices[tri[1]] +
                           r1 * r2 * mesh.vertices[tri[2]]);
  }
  return cloud;
}

TraitReport ground_truth_traits(const SkeletonGraph& skeleton, double measure_height) {
  require(!skeleton.trunk_path.empty(), "ground truth traits: skeleton has no trunk");
  const auto& path = skeleton.trunk_path;
  const double base = skeleton.nodes[path.front()].position.z();
  const double target = base + measure_height;
  const double top = skeleton.nodes[path.back()].position.z();
  require(measure_height >= 0 && target <= top,
          "ground truth traits: measure height " + std::to_string(measure_height) + " outside trunk extent");

  TraitReport report;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& a = skeleton.nodes[path[i]];
    const auto& b = skeleton.nodes[path[i + 1]];
    if (target >= a.position.z() && target <= b.position.z()) {
      const double span = b.position.z() - a.position.z();
      const double t = span > 0 ? (target - a.position.z()) / span : 0.0;
      report.trunk_diameter = 2.0 * (a.radius + t * (b.radius - a.radius));
      break;
    }
  }
  if (!report.trunk_diameter && path.size() == 1) report.trunk_diameter = 2.0 * skeleton.nodes[path[0]].radius;
  require(report.trunk_diameter.has_value(), "ground truth traits: trunk is not monotone in z");
  report.branch_count = static_cast<int>(skeleton.branch_roots.size());
  double z_min = base, z_max = base;
  for (const auto& n : skeleton.nodes) {
    z_min = std::min(z_min, n.position.z());
    z_max = std::max(z_max, n.position.z());
  }
  report.tree_height = z_max - z_min;
  report.diagnostics.skeleton_nodes = skeleton.nodes.size();
  return report;
}

}  // namespace arbor
