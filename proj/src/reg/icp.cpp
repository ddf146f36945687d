#include "arbor/reg/icp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "arbor/common/error.hpp"
#include "arbor/geom/kdtree.hpp"
#include "arbor/geom/voxel.hpp"
#include "arbor/kernels/nearest.hpp"

namespace arbor {

void IcpParams::validate() const {
  require(max_iter >= 1, "icp: max_iter must be >= 1");
  require(rms_delta >= 0 && std::isfinite(rms_delta), "icp: rms_delta must be non-negative");
  require(max_corr_dist >= 0, "icp: max_corr_dist must be non-negative");
  require(voxel_size >= 0 && std::isfinite(voxel_size), "icp: voxel_size must be non-negative");
  if (init) init->validate();
}

PointCloud apply_transform(const PointCloud& cloud, const Rigid& t) { return transform(cloud, t); }

PointCloud crop(const PointCloud& cloud, const Aabb& box) {
  PointCloud out;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.points[i];
    if ((p.array() >= box.min.array()).all() && (p.array() <= box.max.array()).all()) {
      out.points.push_back(p);
      if (cloud.has_colors()) out.colors.push_back(cloud.colors[i]);
    }
  }
  return out;
}

double rotation_angle(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double s = 0.5 * Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)).norm();
  return std::atan2(s, c);
}

Rigid kabsch(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  require(src.size() == dst.size(), "kabsch: size mismatch");
  if (src.size() < 3) throw RegistrationFailure("kabsch: fewer than 3 correspondences", src.size(), 0);
  Vec3 cs = Vec3::Zero(), cd = Vec3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) {
    cs += src[i];
    cd += dst[i];
  }
  cs /= static_cast<double>(src.size());
  cd /= static_cast<double>(src.size());
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < src.size(); ++i) h += (src[i] - cs) * (dst[i] - cd).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(0) > 0) || sv(1) <= 1e-12 * sv(0)) {
    throw RegistrationFailure("kabsch: rank-deficient cross-covariance", src.size(), 0);
  }
  const Mat3 u = svd.matrixU();
  const Mat3 v = svd.matrixV();
  Mat3 d = Mat3::Identity();
  if ((v * u.transpose()).determinant() < 0) d(2, 2) = -1.0;
  Rigid t;
  t.rotation = v * d * u.transpose();
  t.translation = cd - t.rotation * cs;
  return t;
}

namespace {

Vec3 centroid(const std::vector<Vec3>& pts) {
  Vec3 c = Vec3::Zero();
  for (const Vec3& p : pts) c += p;
  return c / static_cast<double>(pts.size());
}

// Columns are principal axes by decreasing variance; the first points up (+z)
// and the frame is right-handed.
Mat3 principal_axes(const std::vector<Vec3>& pts, const Vec3& c) {
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - c) * (p - c).transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  Mat3 axes;
  for (int j = 0; j < 3; ++j) axes.col(j) = es.eigenvectors().col(2 - j);
  if (axes(2, 0) < 0) axes.col(0) = -axes.col(0);
  if (axes.col(1).sum() < 0) axes.col(1) = -axes.col(1);
  axes.col(2) = axes.col(0).cross(axes.col(1));
  return axes;
}

bool collinear(const std::vector<Vec3>& pts) {
  const Vec3 c = centroid(pts);
  Mat3 cov = Mat3::Zero();
  for (const Vec3& p : pts) cov += (p - c) * (p - c).transpose();
  const Vec3 ev = Eigen::SelfAdjointEigenSolver<Mat3>(cov, Eigen::EigenvaluesOnly).eigenvalues();
  return !(ev(2) > 0) || ev(1) <= 1e-12 * ev(2);
}

double median_spacing(const KdTree& index) {
  const auto rows = kernels::self_knn(index, 1);
  std::vector<double> d;
  d.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.empty()) d.push_back(r.front().distance);
  }
  if (d.empty()) return 0.0;
  const std::size_t mid = (d.size() - 1) / 2;
  std::nth_element(d.begin(), d.begin() + mid, d.end());
  return d[mid];
}

struct RunResult {
  Rigid transform;
  std::vector<double> rms;
  bool converged = false;
  double inlier_fraction = 0.0;
};

RunResult run_icp(const std::vector<Vec3>& src, const KdTree& target, const Rigid& init, int max_iter,
                  double rms_delta, double max_corr) {
  RunResult r;
  r.transform = init;
  std::vector<Vec3> moved(src.size());
  std::vector<Vec3> a, b;
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < src.size(); ++i) moved[i] = r.transform.apply(src[i]);
    const auto hits = kernels::nearest_within_all(target, moved, max_corr);
    a.clear();
    b.clear();
    double sum = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      if (hits[i].index != KdTree::kNone) {
        a.push_back(moved[i]);
        b.push_back(target.point(hits[i].index));
        sum += hits[i].distance * hits[i].distance;
      }
    }
    if (a.size() < 3) {
      throw RegistrationFailure("icp: fewer than 3 correspondences within max_corr_dist", a.size(), it + 1);
    }
    const double rms = std::sqrt(sum / static_cast<double>(a.size()));
    r.rms.push_back(rms);
    r.inlier_fraction = static_cast<double>(a.size()) / static_cast<double>(src.size());
    if (it > 0 && std::abs(rms - r.rms[it - 1]) < rms_delta) {
      r.converged = true;
      break;
    }
    if (rms == 0.0) continue;
    Rigid step;
    try {
      step = kabsch(a, b);
    } catch (const RegistrationFailure& e) {
      throw RegistrationFailure(std::string("icp: ") + e.what(), a.size(), it + 1);
    }
    r.transform = step * r.transform;
    r.transform.orthonormalize();
  }
  return r;
}

}  // namespace

IcpReport icp_align(const PointCloud& source, const PointCloud& target, const IcpParams& params) {
  params.validate();
  source.validate();
  target.validate();
  PointCloud src = source, tgt = target;
  if (params.crop) {
    src = crop(src, *params.crop);
    tgt = crop(tgt, *params.crop);
  }
  if (params.voxel_size > 0) {
    src = downsample(src, params.voxel_size);
    tgt = downsample(tgt, params.voxel_size);
  }
  if (src.size() < 3 || tgt.size() < 3) {
    throw RegistrationFailure("icp: clouds need at least 3 points", std::min(src.size(), tgt.size()), 0);
  }
  if (collinear(src.points) || collinear(tgt.points)) {
    throw RegistrationFailure("icp: cloud points are collinear", std::min(src.size(), tgt.size()), 0);
  }

  const KdTree index(tgt.points);
  IcpReport rep;
  rep.source_points = src.size();
  rep.target_points = tgt.size();
  rep.max_corr_dist = params.max_corr_dist > 0 ? params.max_corr_dist : 10.0 * median_spacing(index);
  if (!(rep.max_corr_dist > 0)) {
    throw RegistrationFailure("icp: target has zero nearest-neighbour spacing", tgt.size(), 0);
  }

  Rigid init;
  if (params.init) {
    init = *params.init;
    rep.init_method = "given";
  } else {
    const Vec3 cs = centroid(src.points), ct = centroid(tgt.points);
    std::vector<std::pair<std::string, Rigid>> cand;
    cand.emplace_back("centroid", Rigid::from(Mat3::Identity(), ct - cs));
    const Mat3 as = principal_axes(src.points, cs);
    const Mat3 at = principal_axes(tgt.points, ct);
    for (int flip = 0; flip < 2; ++flip) {
      Mat3 f = Mat3::Identity();
      if (flip) f(1, 1) = f(2, 2) = -1.0;
      const Mat3 r = at * f * as.transpose();
      cand.emplace_back(flip ? "principal-flipped" : "principal", Rigid::from(r, ct - r * cs));
    }
    // Coarse screening on a strided subset of the source.
    const std::size_t stride = std::max<std::size_t>(1, src.size() / 2000);
    std::vector<Vec3> sub;
    for (std::size_t i = 0; i < src.size(); i += stride) sub.push_back(src.points[i]);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [name, t] : cand) {
      RunResult r;
      try {
        r = run_icp(sub, index, t, 30, params.rms_delta, rep.max_corr_dist);
      } catch (const RegistrationFailure&) {
        continue;
      }
      const double score = r.rms.back() / std::max(r.inlier_fraction, 1e-12);
      if (score < best) {
        best = score;
        init = r.transform;
        rep.init_method = name;
      }
    }
    if (rep.init_method.empty()) {
      throw RegistrationFailure("icp: no initial candidate produced correspondences", 0, 0);
    }
  }

  RunResult r = run_icp(src.points, index, init, params.max_iter, params.rms_delta, rep.max_corr_dist);
  rep.transform = r.transform;
  rep.rms_history = std::move(r.rms);
  rep.iterations = static_cast<int>(rep.rms_history.size());
  rep.converged = r.converged;
  rep.inlier_fraction = r.inlier_fraction;
  return rep;
}

}  // namespace arbor
