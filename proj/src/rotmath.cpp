#include "dynaip/rotmath.hpp"

#include <algorithm>
#include <cmath>

namespace dynaip {

const char* error_category(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateInput: return "degenerate_input";
    case ErrorCode::UnknownSkeleton: return "unknown_skeleton";
    case ErrorCode::UnknownJoint: return "unknown_joint";
    case ErrorCode::ShapeMismatch: return "shape_mismatch";
    case ErrorCode::IncompleteMapping: return "incomplete_mapping";
    case ErrorCode::TooShort: return "too_short";
    case ErrorCode::ParseError: return "parse_error";
    case ErrorCode::ValidationError: return "validation_error";
    case ErrorCode::NonFiniteGradient: return "non_finite_gradient";
    case ErrorCode::IoError: return "io_error";
  }
  return "unknown";
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  if (((m.transpose() * m) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol)
    return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

Mat3 r6_to_mat(const Vec6& r) {
  const Vec3 a1 = r.head<3>();
  const Vec3 a2 = r.tail<3>();
  const double n1 = a1.norm();
  if (n1 <= 1e-12)
    throw DegenerateInput("6D rotation: first column has near-zero norm");
  const Vec3 b1 = a1 / n1;
  const Vec3 u2 = a2 - b1.dot(a2) * b1;
  const double n2 = u2.norm();
  if (n2 <= 1e-12)
    throw DegenerateInput("6D rotation: columns are near parallel");
  const Vec3 b2 = u2 / n2;
  Mat3 m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b1.cross(b2);
  return m;
}

Vec6 mat_to_r6(const Mat3& rot) {
  Vec6 r;
  r.head<3>() = rot.col(0);
  r.tail<3>() = rot.col(1);
  return r;
}

double geodesic_angle_deg(const Mat3& a, const Mat3& b) {
  const double tr = (a.transpose() * b).trace();
  // Clamp absorbs round-off so near-identity pairs do not produce NaN.
  const double c = std::clamp((tr - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * kDegPerRad;
}

Mat3 relative_to_root(const Mat3& r, const Mat3& root) {
  return root.transpose() * r;
}

Mat3 rot_x(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitX()).toRotationMatrix();
}

Mat3 rot_y(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitY()).toRotationMatrix();
}

Mat3 rot_z(double radians) {
  return Eigen::AngleAxisd(radians, Vec3::UnitZ()).toRotationMatrix();
}

Mat3 axis_angle(const Vec3& axis, double radians) {
  const double n = axis.norm();
  if (n <= 1e-15) throw DegenerateInput("axis_angle: zero axis");
  return Eigen::AngleAxisd(radians, axis / n).toRotationMatrix();
}

}  // namespace dynaip
