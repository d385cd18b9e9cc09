#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fitslam/infogain.hpp"
#include "fitslam/planner.hpp"

namespace fitslam {

using Matrix36 = Eigen::Matrix<double, 3, 6>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kDefaultLandmarkSigma = 0.05;

/// 3D landmark (voxel center, world frame) with its position covariance.
struct Landmark {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance =
      Eigen::Matrix3d::Identity() * (kDefaultLandmarkSigma * kDefaultLandmarkSigma);
};

/// World-to-camera transform plus frustum. Camera axes: x right, y down,
/// z forward (optical axis).
struct CameraPose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();  ///< R_cw
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();   ///< t_cw
  double fov = deg2rad(87.0);
  double max_depth = 5.0;

  /// Landmark position in the camera frame.
  [[nodiscard]] Eigen::Vector3d to_camera(const Eigen::Vector3d& world) const {
    return rotation * world + translation;
  }
};

/// Level camera at world position (x, y, z) looking along `heading` (radians
/// from +x, counter-clockwise).
CameraPose camera_pose_from_heading(double x, double y, double z, double heading, double fov, double max_depth);

inline constexpr double kDegenerateDistance = 1e-9;

/// Unit bearing of the landmark in the camera frame. Throws DegenerateLandmark
/// when the landmark sits on the camera center.
Eigen::Vector3d bearing(const CameraPose& pose, const Landmark& landmark);

/// d bearing / d camera-to-world pose for the left perturbation
/// T_wc <- (Exp(phi), rho) * T_wc, columns ordered (rho, phi). Equals
/// (I/|v| - v v^T/|v|^3) * R_cw * [-I, [v_w]x].
Matrix36 bearing_jacobian(const CameraPose& pose, const Landmark& landmark);

/// Skew-symmetric cross-product matrix.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

/// Positive forward depth, angle to the optical axis <= fov/2 (inclusive),
/// and range <= max_depth.
bool visible(const CameraPose& pose, const Landmark& landmark);

enum class FimForm {
  /// I = J^T Qb^-1 J, the Gaussian information form (6x6).
  Information,
  /// I = J^T Qb J, a dimensionally consistent reading of J Q J^T.
  CovarianceWeighted,
};

struct FimParams {
  double bearing_sigma = 0.01;  ///< isotropic bearing noise added to the propagated landmark covariance
  double regularization = 1e-9;
  FimForm form = FimForm::Information;
};

/// Bearing noise covariance: P R Q R^T P^T + sigma^2 I with P = d b / d v_c.
Eigen::Matrix3d bearing_covariance(const CameraPose& pose, const Landmark& landmark, const FimParams& params);

/// Information of one bearing observation, without frustum culling.
Matrix6 bearing_information(const CameraPose& pose, const Landmark& landmark, const FimParams& params);

/// Fisher information of the landmark for the camera pose; the zero matrix
/// when the landmark is not visible.
Matrix6 landmark_fim(const CameraPose& pose, const Landmark& landmark, const FimParams& params = {});

/// Landmarks snapped to cubic voxels; one representative per voxel (the
/// landmark nearest the voxel center, first one on ties).
struct VoxelLandmarks {
  double voxel_size = 0.25;
  std::vector<Landmark> representatives;
};

VoxelLandmarks voxelize_landmarks(std::span<const Landmark> landmarks, double voxel_size);

struct PathInformation {
  double value = 0.0;       ///< normalizer * sum(per_waypoint)
  double raw = 0.0;         ///< sum(per_waypoint)
  double normalizer = 1.0;  ///< N_I
  std::vector<double> per_waypoint;  ///< summed FIM traces over visible voxels
};

struct PathInformationParams {
  double sensor_height = 0.3;  ///< camera height above the ground, meters
  double fov = deg2rad(87.0);
  double max_depth = 5.0;
  FimParams fim;
};

/// Ground elevation under a waypoint; defaults to a flat z = 0 world.
using GroundHeight = std::function<double(double x, double y)>;

/// Sum over waypoints of trace(I_i) over visible voxel representatives.
/// The normalizer is 1 until normalize_path_information() is applied.
PathInformation path_information(std::span<const Waypoint> waypoints, const VoxelLandmarks& voxels,
                                 const PathInformationParams& params, const GroundHeight& ground = {});

/// Convenience overload that voxelizes `landmarks` first. Throws ConfigError
/// when voxel_size <= 0.
PathInformation path_information(std::span<const Waypoint> waypoints, std::span<const Landmark> landmarks,
                                 double voxel_size, const PathInformationParams& params,
                                 const GroundHeight& ground = {});

/// Sets N_I = 1 / (1 + max raw) over the candidate set and rescales values.
void normalize_path_information(std::span<PathInformation> infos);

/// Reads `x y z [cxx cxy cxz cyy cyz czz]` lines. Missing covariance means
/// sigma_L^2 I with sigma_L = 0.05 m. Throws IoError on malformed input.
std::vector<Landmark> read_landmarks(std::istream& in);

}  // namespace fitslam
