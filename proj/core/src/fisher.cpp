#include "fitslam/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace fitslam {

CameraPose camera_pose_from_heading(double x, double y, double z, double heading, double fov, double max_depth) {
  const double c = std::cos(heading), s = std::sin(heading);
  CameraPose pose;
  pose.rotation << s, -c, 0.0,  //
      0.0, 0.0, -1.0,           //
      c, s, 0.0;
  pose.translation = -pose.rotation * Eigen::Vector3d(x, y, z);
  pose.fov = fov;
  pose.max_depth = max_depth;
  return pose;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

namespace {

Eigen::Vector3d camera_point(const CameraPose& pose, const Landmark& landmark) {
  Eigen::Vector3d v = pose.to_camera(landmark.position);
  if (!(v.norm() > kDegenerateDistance)) throw DegenerateLandmark("landmark at the camera center");
  return v;
}

Eigen::Matrix3d normalization_jacobian(const Eigen::Vector3d& v) {
  const double n = v.norm();
  return Eigen::Matrix3d::Identity() / n - v * v.transpose() / (n * n * n);
}

}  // namespace

Eigen::Vector3d bearing(const CameraPose& pose, const Landmark& landmark) {
  const Eigen::Vector3d v = camera_point(pose, landmark);
  return v / v.norm();
}

Matrix36 bearing_jacobian(const CameraPose& pose, const Landmark& landmark) {
  const Eigen::Vector3d v = camera_point(pose, landmark);
  Matrix36 dv_dpose;
  dv_dpose.leftCols<3>() = -pose.rotation;
  dv_dpose.rightCols<3>() = pose.rotation * skew(landmark.position);
  return normalization_jacobian(v) * dv_dpose;
}

bool visible(const CameraPose& pose, const Landmark& landmark) {
  const Eigen::Vector3d v = pose.to_camera(landmark.position);
  if (!(v.z() > 0.0)) return false;
  if (v.norm() > pose.max_depth) return false;
  const double off_axis = std::atan2(std::hypot(v.x(), v.y()), v.z());
  return off_axis <= 0.5 * pose.fov + 1e-12;
}

Eigen::Matrix3d bearing_covariance(const CameraPose& pose, const Landmark& landmark, const FimParams& params) {
  const Eigen::Vector3d v = camera_point(pose, landmark);
  const Eigen::Matrix3d p = normalization_jacobian(v);
  const Eigen::Matrix3d q_cam = pose.rotation * landmark.covariance * pose.rotation.transpose();
  Eigen::Matrix3d qb = p * q_cam * p.transpose() +
                       Eigen::Matrix3d::Identity() * (params.bearing_sigma * params.bearing_sigma);
  return 0.5 * (qb + qb.transpose());
}

Matrix6 bearing_information(const CameraPose& pose, const Landmark& landmark, const FimParams& params) {
  const Matrix36 j = bearing_jacobian(pose, landmark);
  Eigen::Matrix3d qb = bearing_covariance(pose, landmark, params);
  Matrix6 info;
  if (params.form == FimForm::CovarianceWeighted) {
    info = j.transpose() * qb * j;
  } else {
    Eigen::LLT<Eigen::Matrix3d> llt(qb);
    if (llt.info() != Eigen::Success || qb.determinant() <= 0.0) {
      qb += Eigen::Matrix3d::Identity() * params.regularization;
      llt.compute(qb);
    }
    info = j.transpose() * llt.solve(j);
  }
  return 0.5 * (info + info.transpose());
}

Matrix6 landmark_fim(const CameraPose& pose, const Landmark& landmark, const FimParams& params) {
  if (!visible(pose, landmark)) return Matrix6::Zero();
  return bearing_information(pose, landmark, params);
}

VoxelLandmarks voxelize_landmarks(std::span<const Landmark> landmarks, double voxel_size) {
  if (!(voxel_size > 0.0)) throw ConfigError("voxel_size must be positive");
  using Key = std::tuple<long long, long long, long long>;
  struct Slot {
    std::size_t index;
    double dist2;
  };
  std::map<Key, Slot> best;
  for (std::size_t k = 0; k < landmarks.size(); ++k) {
    const Eigen::Vector3d& p = landmarks[k].position;
    const Eigen::Vector3d cell = (p / voxel_size).array().floor();
    const Key key{static_cast<long long>(cell.x()), static_cast<long long>(cell.y()),
                  static_cast<long long>(cell.z())};
    const Eigen::Vector3d center = (cell.array() + 0.5) * voxel_size;
    const double d2 = (p - center).squaredNorm();
    auto [it, inserted] = best.try_emplace(key, Slot{k, d2});
    if (!inserted && d2 < it->second.dist2) it->second = Slot{k, d2};
  }
  VoxelLandmarks out;
  out.voxel_size = voxel_size;
  out.representatives.reserve(best.size());
  for (const auto& [key, slot] : best) out.representatives.push_back(landmarks[slot.index]);
  return out;
}

PathInformation path_information(std::span<const Waypoint> waypoints, const VoxelLandmarks& voxels,
                                 const PathInformationParams& params, const GroundHeight& ground) {
  PathInformation info;
  info.per_waypoint.reserve(waypoints.size());
  for (const Waypoint& w : waypoints) {
    const double z = (ground ? ground(w.x, w.y) : 0.0) + params.sensor_height;
    const CameraPose pose = camera_pose_from_heading(w.x, w.y, z, w.heading, params.fov, params.max_depth);
    double trace = 0.0;
    for (const Landmark& lm : voxels.representatives) {
      if (!visible(pose, lm)) continue;
      trace += bearing_information(pose, lm, params.fim).trace();
    }
    info.per_waypoint.push_back(trace);
    info.raw += trace;
  }
  info.value = info.raw;
  return info;
}

PathInformation path_information(std::span<const Waypoint> waypoints, std::span<const Landmark> landmarks,
                                 double voxel_size, const PathInformationParams& params,
                                 const GroundHeight& ground) {
  return path_information(waypoints, voxelize_landmarks(landmarks, voxel_size), params, ground);
}

void normalize_path_information(std::span<PathInformation> infos) {
  double max_raw = 0.0;
  for (const PathInformation& p : infos) max_raw = std::max(max_raw, p.raw);
  const double normalizer = 1.0 / (1.0 + max_raw);
  for (PathInformation& p : infos) {
    p.normalizer = normalizer;
    p.value = normalizer * p.raw;
  }
}

std::vector<Landmark> read_landmarks(std::istream& in) {
  std::vector<Landmark> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> values;
    double v = 0.0;
    while (ls >> v) values.push_back(v);
    if (!ls.eof() || (values.size() != 3 && values.size() != 9) ||
        !std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); })) {
      throw IoError("malformed landmark on line " + std::to_string(line_no));
    }
    Landmark lm;
    lm.position = Eigen::Vector3d(values[0], values[1], values[2]);
    if (values.size() == 9) {
      lm.covariance << values[3], values[4], values[5],  //
          values[4], values[6], values[7],               //
          values[5], values[7], values[8];
    }
    out.push_back(lm);
  }
  return out;
}

}  // namespace fitslam
