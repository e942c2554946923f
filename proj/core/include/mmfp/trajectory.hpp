#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmfp/lie.hpp"

namespace mmfp {

enum class Space { euclidean, se3 };

std::string space_name(Space s);
Space space_from_name(const std::string& name);

// Fixed-length sequence of configurations. Euclidean points have
// point_dim entries; SE(3) points are [tx, ty, tz, wx, wy, wz] with the
// rotation in exponential coordinates.
struct Trajectory {
    Space space = Space::euclidean;
    int point_dim = 0;
    std::vector<std::vector<double>> points;

    int T() const { return static_cast<int>(points.size()); }
    void validate() const; // shape + finiteness
};

// Row-major flattening: point 0 first, T*point_dim entries total.
std::vector<double> flatten(const Trajectory& x);
Trajectory unflatten(const std::vector<double>& v, Space space, int point_dim, int T);

// Per-coordinate affine map x_norm = (x - offset) / scale. For SE(3)
// the rotation coordinates keep offset 0 and scale 1; they are already
// order one and rescaling them would change the group geometry.
struct Normalization {
    std::vector<double> offset, scale;

    static Normalization identity(int point_dim);
    static Normalization fit(const std::vector<Trajectory>& trajs);

    Trajectory normalize(const Trajectory& x) const;
    Trajectory denormalize(const Trajectory& x) const;
    void validate(int point_dim) const;
};

// Squared trajectory distance. Euclidean: sum of squared coordinate
// differences. SE(3): per timestep squared translation distance plus
// lambda times the squared geodesic rotation angle. Timesteps that are
// bitwise equal contribute exactly zero.
double traj_dist_sq(const Trajectory& a, const Trajectory& b, double lambda);

// d(traj_dist_sq)/d(flatten(b)), same layout as flatten.
std::vector<double> traj_dist_sq_grad_b(const Trajectory& a, const Trajectory& b, double lambda);

// Uniform-parameter piecewise-linear resampling to T_new points;
// endpoints preserved exactly. SE(3) rotations interpolate along the
// geodesic between consecutive poses.
Trajectory resample_trajectory(const Trajectory& x, int T_new);

} // namespace mmfp
