#pragma once

#include <stdexcept>
#include <string>

namespace fitslam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

/// Goal unreachable or not Free. Callers blacklist the goal.
class NoPath : public Error {
 public:
  using Error::Error;
};

/// Landmark coincides with the camera center.
class DegenerateLandmark : public Error {
 public:
  using Error::Error;
};

class EmptyCandidateSet : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A path cell was found Blocked while the robot was executing the path.
class PathBlocked : public Error {
 public:
  using Error::Error;
};

}  // namespace fitslam
