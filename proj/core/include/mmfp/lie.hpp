#pragma once

#include <array>
#include <vector>

namespace mmfp {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>; // row-major

Mat3 mat3_identity();
Mat3 mat3_mul(const Mat3& a, const Mat3& b);
Mat3 mat3_transpose(const Mat3& a);
Vec3 mat3_apply(const Mat3& a, const Vec3& v);

Mat3 so3_hat(const Vec3& w);
Vec3 so3_vee(const Mat3& m); // inverse of so3_hat; assumes m is exactly skew

// Rodrigues exponential. Switches to the Taylor expansion of
// sin(t)/t and (1-cos(t))/t^2 below t = 1e-4.
Mat3 so3_exp(const Vec3& w);

// Inverse of so3_exp onto the ball of radius pi. Three branches:
// small angle (series), generic (acos), and near pi where the angle
// comes from asin of the skew norm and the axis from the symmetric
// part, both of which stay well conditioned as the angle approaches pi.
Vec3 so3_log(const Mat3& r);

// Right Jacobian of so3_exp: Exp(w + d) ~ Exp(w) Exp(Jr(w) d).
Mat3 so3_right_jacobian(const Vec3& w);

double norm3(const Vec3& v);
double dot3(const Vec3& a, const Vec3& b);

// Pose as translation plus rotation vector: [tx, ty, tz, wx, wy, wz].
// Squared distance uses the chordal translation term plus lambda times
// the squared geodesic angle between the rotations.
double se3_dist_sq(const std::array<double, 6>& a, const std::array<double, 6>& b, double lambda);

// Gradient of se3_dist_sq(a, b, lambda) with respect to b.
// Rotation part is 2 * lambda * Jr(w_b)^T * Log(R_a^T R_b).
std::array<double, 6> se3_dist_sq_grad_b(const std::array<double, 6>& a, const std::array<double, 6>& b,
                                         double lambda);

} // namespace mmfp
