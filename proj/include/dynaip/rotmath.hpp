#pragma once

#include "dynaip/types.hpp"

namespace dynaip {

/// True when m is orthonormal with determinant +1 within tol.
bool is_rotation(const Mat3& m, double tol = 1e-9);

/// Project a 6D rotation representation (two, possibly unnormalized, column
/// vectors stacked as [a1; a2]) onto SO(3) via Gram-Schmidt; the third column
/// is the cross product of the first two. Throws DegenerateInput when a1 is
/// near zero or a2 is near parallel to a1, which signals an untrained or
/// blown-up network output.
Mat3 r6_to_mat(const Vec6& r);

/// First two columns of a rotation matrix, stacked as [col0; col1].
Vec6 mat_to_r6(const Mat3& rot);

/// Geodesic distance between two rotations in degrees, range [0, 180].
double geodesic_angle_deg(const Mat3& a, const Mat3& b);

/// Express a global orientation relative to the root: root^T * r.
Mat3 relative_to_root(const Mat3& r, const Mat3& root);

Mat3 rot_x(double radians);
Mat3 rot_y(double radians);
Mat3 rot_z(double radians);

/// Rotation of `radians` about an arbitrary (non-zero) axis.
Mat3 axis_angle(const Vec3& axis, double radians);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegPerRad = 180.0 / kPi;

inline double deg2rad(double deg) { return deg / kDegPerRad; }

}  // namespace dynaip
