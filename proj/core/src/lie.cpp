#include "mmfp/lie.hpp"

#include <algorithm>
#include <cmath>

namespace mmfp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kSmallAngle = 1e-4;  // below this, series for the trig ratios
constexpr double kNearPi = kPi - 1e-5; // above this, symmetric-part extraction
} // namespace

Mat3 mat3_identity() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }

Mat3 mat3_mul(const Mat3& a, const Mat3& b) {
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 3; ++k) acc += a[i * 3 + k] * b[k * 3 + j];
            c[i * 3 + j] = acc;
        }
    return c;
}

Mat3 mat3_transpose(const Mat3& a) {
    return {a[0], a[3], a[6], a[1], a[4], a[7], a[2], a[5], a[8]};
}

Vec3 mat3_apply(const Mat3& a, const Vec3& v) {
    return {a[0] * v[0] + a[1] * v[1] + a[2] * v[2],
            a[3] * v[0] + a[4] * v[1] + a[5] * v[2],
            a[6] * v[0] + a[7] * v[1] + a[8] * v[2]};
}

Mat3 so3_hat(const Vec3& w) {
    return {0, -w[2], w[1], w[2], 0, -w[0], -w[1], w[0], 0};
}

Vec3 so3_vee(const Mat3& m) { return {m[7], m[2], m[3]}; }

double norm3(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Mat3 so3_exp(const Vec3& w) {
    double t = norm3(w);
    double a, b; // sin(t)/t and (1-cos(t))/t^2
    if (t < kSmallAngle) {
        double t2 = t * t;
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        a = std::sin(t) / t;
        b = (1.0 - std::cos(t)) / (t * t);
    }
    Mat3 k = so3_hat(w);
    Mat3 k2 = mat3_mul(k, k);
    Mat3 r = mat3_identity();
    for (int i = 0; i < 9; ++i) r[i] += a * k[i] + b * k2[i];
    return r;
}

Vec3 so3_log(const Mat3& r) {
    double tr = r[0] + r[4] + r[8];
    double c = std::clamp((tr - 1.0) * 0.5, -1.0, 1.0);
    Vec3 v = {(r[7] - r[5]) * 0.5, (r[2] - r[6]) * 0.5, (r[3] - r[1]) * 0.5}; // = sin(t) * axis
    double s = std::clamp(norm3(v), 0.0, 1.0);

    double t = std::acos(c);
    if (t < kSmallAngle) {
        // axis * t = v * t / sin(t); series for t / sin(t)
        double t2 = t * t;
        double k = 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0;
        return {v[0] * k, v[1] * k, v[2] * k};
    }
    if (t < kNearPi) {
        double k = t / s;
        return {v[0] * k, v[1] * k, v[2] * k};
    }

    // Near pi: acos of a value near -1 loses ~half the digits, so take the
    // angle from asin(|skew|) instead and the axis from the symmetric part
    // n n^T = I + (S - I) / (1 - cos t), which stays O(1) conditioned here.
    t = kPi - std::asin(s);
    double b = 1.0 - c; // ~2, well away from zero
    double nxx = 1.0 + (0.5 * (r[0] + r[0]) - 1.0) / b;
    double nyy = 1.0 + (0.5 * (r[4] + r[4]) - 1.0) / b;
    double nzz = 1.0 + (0.5 * (r[8] + r[8]) - 1.0) / b;
    double nxy = 0.5 * (r[1] + r[3]) / b;
    double nxz = 0.5 * (r[2] + r[6]) / b;
    double nyz = 0.5 * (r[5] + r[7]) / b;
    Vec3 n;
    if (nxx >= nyy && nxx >= nzz) {
        double d = std::sqrt(std::max(nxx, 0.0));
        n = {d, nxy / d, nxz / d};
    } else if (nyy >= nzz) {
        double d = std::sqrt(std::max(nyy, 0.0));
        n = {nxy / d, d, nyz / d};
    } else {
        double d = std::sqrt(std::max(nzz, 0.0));
        n = {nxz / d, nyz / d, d};
    }
    double nn = norm3(n);
    n = {n[0] / nn, n[1] / nn, n[2] / nn};

    // Sign: align with the skew part when it is informative, otherwise pick
    // the deterministic representative with the largest component positive.
    double align = dot3(n, v);
    bool flip;
    if (std::abs(align) > 1e-12) {
        flip = align < 0.0;
    } else {
        int k = 0;
        if (std::abs(n[1]) > std::abs(n[k])) k = 1;
        if (std::abs(n[2]) > std::abs(n[k])) k = 2;
        flip = n[k] < 0.0;
    }
    if (flip) n = {-n[0], -n[1], -n[2]};
    return {n[0] * t, n[1] * t, n[2] * t};
}

Mat3 so3_right_jacobian(const Vec3& w) {
    double t = norm3(w);
    double a, b; // (1-cos t)/t^2 and (t - sin t)/t^3
    if (t < kSmallAngle) {
        double t2 = t * t;
        a = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        b = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    } else {
        a = (1.0 - std::cos(t)) / (t * t);
        b = (t - std::sin(t)) / (t * t * t);
    }
    Mat3 k = so3_hat(w);
    Mat3 k2 = mat3_mul(k, k);
    Mat3 j = mat3_identity();
    for (int i = 0; i < 9; ++i) j[i] += -a * k[i] + b * k2[i];
    return j;
}

double se3_dist_sq(const std::array<double, 6>& a, const std::array<double, 6>& b, double lambda) {
    double dp = 0.0;
    for (int i = 0; i < 3; ++i) {
        double d = a[i] - b[i];
        dp += d * d;
    }
    Mat3 ra = so3_exp({a[3], a[4], a[5]});
    Mat3 rb = so3_exp({b[3], b[4], b[5]});
    Vec3 phi = so3_log(mat3_mul(mat3_transpose(ra), rb));
    double ang = dot3(phi, phi);
    return dp + lambda * ang;
}

std::array<double, 6> se3_dist_sq_grad_b(const std::array<double, 6>& a, const std::array<double, 6>& b,
                                         double lambda) {
    std::array<double, 6> g{};
    for (int i = 0; i < 3; ++i) g[i] = 2.0 * (b[i] - a[i]);
    Vec3 wb = {b[3], b[4], b[5]};
    Mat3 ra = so3_exp({a[3], a[4], a[5]});
    Mat3 rb = so3_exp(wb);
    Vec3 phi = so3_log(mat3_mul(mat3_transpose(ra), rb));
    Mat3 jt = mat3_transpose(so3_right_jacobian(wb));
    Vec3 gw = mat3_apply(jt, phi);
    g[3] = 2.0 * lambda * gw[0];
    g[4] = 2.0 * lambda * gw[1];
    g[5] = 2.0 * lambda * gw[2];
    return g;
}

} // namespace mmfp
