#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace dynaip {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// World convention: Z is up, gravity points along -Z.
inline constexpr int kUpAxis = 2;

enum class ErrorCode {
  DegenerateInput,
  UnknownSkeleton,
  UnknownJoint,
  ShapeMismatch,
  IncompleteMapping,
  TooShort,
  ParseError,
  ValidationError,
  NonFiniteGradient,
  IoError,
};

/// Machine-readable category slug for an error code (used by the CLI).
const char* error_category(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }
  const char* category() const noexcept { return error_category(code_); }

 private:
  ErrorCode code_;
};

#define DYNAIP_DEFINE_ERROR(Name)                              \
  struct Name : Error {                                        \
    explicit Name(const std::string& what)                     \
        : Error(ErrorCode::Name, what) {}                      \
  }

DYNAIP_DEFINE_ERROR(DegenerateInput);
DYNAIP_DEFINE_ERROR(UnknownSkeleton);
DYNAIP_DEFINE_ERROR(UnknownJoint);
DYNAIP_DEFINE_ERROR(ShapeMismatch);
DYNAIP_DEFINE_ERROR(IncompleteMapping);
DYNAIP_DEFINE_ERROR(TooShort);
DYNAIP_DEFINE_ERROR(ParseError);
DYNAIP_DEFINE_ERROR(ValidationError);
DYNAIP_DEFINE_ERROR(NonFiniteGradient);
DYNAIP_DEFINE_ERROR(IoError);

#undef DYNAIP_DEFINE_ERROR

/// Flatten a 3x3 matrix into 9 values in row-major element order.
inline Vec9 flatten_rowmajor(const Mat3& m) {
  Vec9 v;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) v[3 * r + c] = m(r, c);
  return v;
}

inline Mat3 unflatten_rowmajor(const Eigen::Ref<const VecX>& v) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = v[3 * r + c];
  return m;
}

}  // namespace dynaip
