#include "mmfp/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace mmfp {

std::string space_name(Space s) { return s == Space::euclidean ? "euclidean" : "se3"; }

Space space_from_name(const std::string& name) {
    if (name == "euclidean") return Space::euclidean;
    if (name == "se3") return Space::se3;
    throw std::invalid_argument("unknown space '" + name + "' (expected euclidean or se3)");
}

void Trajectory::validate() const {
    if (point_dim <= 0) throw std::invalid_argument("Trajectory: point_dim must be positive");
    if (space == Space::se3 && point_dim != 6)
        throw std::invalid_argument("Trajectory: se3 points must have 6 coordinates");
    if (points.empty()) throw std::invalid_argument("Trajectory: empty");
    for (const auto& p : points) {
        if (static_cast<int>(p.size()) != point_dim)
            throw std::invalid_argument("Trajectory: point size " + std::to_string(p.size()) +
                                        " does not match point_dim " + std::to_string(point_dim));
        for (double v : p)
            if (!std::isfinite(v)) throw std::invalid_argument("Trajectory: non-finite coordinate");
    }
}

std::vector<double> flatten(const Trajectory& x) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(x.T()) * x.point_dim);
    for (const auto& p : x.points) v.insert(v.end(), p.begin(), p.end());
    return v;
}

Trajectory unflatten(const std::vector<double>& v, Space space, int point_dim, int T) {
    if (static_cast<int>(v.size()) != T * point_dim)
        throw std::invalid_argument("unflatten: size " + std::to_string(v.size()) + " != T*point_dim " +
                                    std::to_string(T * point_dim));
    Trajectory x;
    x.space = space;
    x.point_dim = point_dim;
    x.points.resize(T);
    for (int t = 0; t < T; ++t) x.points[t].assign(v.begin() + static_cast<std::ptrdiff_t>(t) * point_dim,
                                                   v.begin() + static_cast<std::ptrdiff_t>(t + 1) * point_dim);
    return x;
}

Normalization Normalization::identity(int point_dim) {
    Normalization n;
    n.offset.assign(point_dim, 0.0);
    n.scale.assign(point_dim, 1.0);
    return n;
}

Normalization Normalization::fit(const std::vector<Trajectory>& trajs) {
    if (trajs.empty()) throw std::invalid_argument("Normalization::fit: empty trajectory set");
    int dim = trajs.front().point_dim;
    Space space = trajs.front().space;
    std::vector<double> lo(dim, 1e300), hi(dim, -1e300);
    for (const auto& x : trajs)
        for (const auto& p : x.points)
            for (int d = 0; d < dim; ++d) {
                lo[d] = std::min(lo[d], p[d]);
                hi[d] = std::max(hi[d], p[d]);
            }
    Normalization n;
    n.offset.resize(dim);
    n.scale.resize(dim);
    for (int d = 0; d < dim; ++d) {
        if (space == Space::se3 && d >= 3) {
            n.offset[d] = 0.0;
            n.scale[d] = 1.0;
        } else {
            n.offset[d] = 0.5 * (lo[d] + hi[d]);
            n.scale[d] = std::max(0.5 * (hi[d] - lo[d]), 1e-9);
        }
    }
    return n;
}

void Normalization::validate(int point_dim) const {
    if (static_cast<int>(offset.size()) != point_dim || static_cast<int>(scale.size()) != point_dim)
        throw std::invalid_argument("Normalization: offset/scale size does not match point_dim");
    for (double s : scale)
        if (!(s > 0.0)) throw std::invalid_argument("Normalization: scale entries must be positive");
}

Trajectory Normalization::normalize(const Trajectory& x) const {
    Trajectory y = x;
    for (auto& p : y.points)
        for (std::size_t d = 0; d < p.size(); ++d) p[d] = (p[d] - offset[d]) / scale[d];
    return y;
}

Trajectory Normalization::denormalize(const Trajectory& x) const {
    Trajectory y = x;
    for (auto& p : y.points)
        for (std::size_t d = 0; d < p.size(); ++d) p[d] = p[d] * scale[d] + offset[d];
    return y;
}

namespace {
bool points_equal(const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

std::array<double, 6> as_pose(const std::vector<double>& p) {
    return {p[0], p[1], p[2], p[3], p[4], p[5]};
}
} // namespace

double traj_dist_sq(const Trajectory& a, const Trajectory& b, double lambda) {
    if (a.T() != b.T() || a.point_dim != b.point_dim || a.space != b.space)
        throw std::invalid_argument("traj_dist_sq: shape mismatch (T " + std::to_string(a.T()) + " vs " +
                                    std::to_string(b.T()) + ", dim " + std::to_string(a.point_dim) + " vs " +
                                    std::to_string(b.point_dim) + ")");
    double acc = 0.0;
    for (int t = 0; t < a.T(); ++t) {
        const auto& pa = a.points[t];
        const auto& pb = b.points[t];
        if (points_equal(pa, pb)) continue;
        if (a.space == Space::euclidean) {
            for (int d = 0; d < a.point_dim; ++d) {
                double diff = pa[d] - pb[d];
                acc += diff * diff;
            }
        } else {
            acc += se3_dist_sq(as_pose(pa), as_pose(pb), lambda);
        }
    }
    return acc;
}

std::vector<double> traj_dist_sq_grad_b(const Trajectory& a, const Trajectory& b, double lambda) {
    if (a.T() != b.T() || a.point_dim != b.point_dim || a.space != b.space)
        throw std::invalid_argument("traj_dist_sq_grad_b: shape mismatch");
    std::vector<double> g(static_cast<std::size_t>(a.T()) * a.point_dim, 0.0);
    for (int t = 0; t < a.T(); ++t) {
        const auto& pa = a.points[t];
        const auto& pb = b.points[t];
        double* gt = &g[static_cast<std::size_t>(t) * a.point_dim];
        if (a.space == Space::euclidean) {
            for (int d = 0; d < a.point_dim; ++d) gt[d] = 2.0 * (pb[d] - pa[d]);
        } else {
            auto gp = se3_dist_sq_grad_b(as_pose(pa), as_pose(pb), lambda);
            for (int d = 0; d < 6; ++d) gt[d] = gp[d];
        }
    }
    return g;
}

Trajectory resample_trajectory(const Trajectory& x, int T_new) {
    if (x.T() < 2) throw std::invalid_argument("resample_trajectory: need T >= 2");
    if (T_new < 2) throw std::invalid_argument("resample_trajectory: need T_new >= 2");
    int T = x.T();
    Trajectory y;
    y.space = x.space;
    y.point_dim = x.point_dim;
    y.points.resize(T_new);
    for (int k = 0; k < T_new; ++k) {
        if (k == 0) {
            y.points[k] = x.points.front();
            continue;
        }
        if (k == T_new - 1) {
            y.points[k] = x.points.back();
            continue;
        }
        double u = static_cast<double>(k) * (T - 1) / (T_new - 1);
        int i = static_cast<int>(u);
        if (i >= T - 1) i = T - 2;
        double w = u - i;
        const auto& p0 = x.points[i];
        const auto& p1 = x.points[i + 1];
        std::vector<double> p(x.point_dim);
        if (w == 0.0) {
            p = p0;
        } else if (x.space == Space::euclidean) {
            for (int d = 0; d < x.point_dim; ++d) p[d] = (1.0 - w) * p0[d] + w * p1[d];
        } else {
            for (int d = 0; d < 3; ++d) p[d] = (1.0 - w) * p0[d] + w * p1[d];
            Mat3 r0 = so3_exp({p0[3], p0[4], p0[5]});
            Mat3 r1 = so3_exp({p1[3], p1[4], p1[5]});
            Vec3 d01 = so3_log(mat3_mul(mat3_transpose(r0), r1));
            Mat3 rw = mat3_mul(r0, so3_exp({w * d01[0], w * d01[1], w * d01[2]}));
            Vec3 wv = so3_log(rw);
            p[3] = wv[0];
            p[4] = wv[1];
            p[5] = wv[2];
        }
        y.points[k] = p;
    }
    return y;
}

} // namespace mmfp
