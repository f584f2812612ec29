#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace facetcvt {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

using FaceId = std::int32_t;
using VertexId = std::int32_t;
using SiteId = std::int32_t;

inline constexpr FaceId kNoFace = -1;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or unreadable mesh input/output.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition (bad count, bad index...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace facetcvt
