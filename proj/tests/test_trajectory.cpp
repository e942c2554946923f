#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mmfp/rng.hpp"
#include "mmfp/trajectory.hpp"

using namespace mmfp;

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

Trajectory make_traj(Space space, int point_dim, const std::vector<std::vector<double>>& pts) {
    Trajectory x;
    x.space = space;
    x.point_dim = point_dim;
    x.points = pts;
    return x;
}

Trajectory random_traj(Rng& rng, Space space, int point_dim, int T, double rot_mag = 1.5) {
    Trajectory x;
    x.space = space;
    x.point_dim = point_dim;
    x.points.resize(T);
    for (auto& p : x.points) {
        p = rng.normal_vec(static_cast<std::size_t>(point_dim));
        if (space == Space::se3) {
            double n = std::sqrt(p[3] * p[3] + p[4] * p[4] + p[5] * p[5]);
            double t = rng.uniform(0.0, rot_mag);
            for (int d = 3; d < 6; ++d) p[d] *= n > 0.0 ? t / n : 0.0;
        }
    }
    return x;
}

} // namespace

TEST_CASE("space names round-trip and reject unknowns") {
    CHECK(space_name(Space::euclidean) == "euclidean");
    CHECK(space_name(Space::se3) == "se3");
    CHECK(space_from_name("euclidean") == Space::euclidean);
    CHECK(space_from_name("se3") == Space::se3);
    CHECK_THROWS_AS(space_from_name("se2"), std::invalid_argument);
}

TEST_CASE("trajectory validation catches shape and finiteness errors") {
    auto ok = make_traj(Space::euclidean, 2, {{0.0, 1.0}, {2.0, 3.0}});
    CHECK_NOTHROW(ok.validate());
    CHECK_THROWS_AS(make_traj(Space::euclidean, 2, {}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_traj(Space::euclidean, 2, {{0.0}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_traj(Space::euclidean, 0, {{}}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_traj(Space::se3, 3, {{0.0, 0.0, 0.0}}).validate(), std::invalid_argument);
    auto inf = make_traj(Space::euclidean, 1, {{std::numeric_limits<double>::infinity()}});
    CHECK_THROWS_AS(inf.validate(), std::invalid_argument);
}

TEST_CASE("flatten and unflatten invert each other bitwise") {
    Rng rng(6);
    auto x = random_traj(rng, Space::euclidean, 3, 7);
    auto flat = flatten(x);
    REQUIRE(flat.size() == 21);
    // row-major: point t occupies [t*dim, (t+1)*dim)
    for (int t = 0; t < 7; ++t)
        for (int d = 0; d < 3; ++d) CHECK(flat[static_cast<std::size_t>(t) * 3 + d] == x.points[t][d]);
    auto back = unflatten(flat, Space::euclidean, 3, 7);
    CHECK(back.space == x.space);
    CHECK(back.point_dim == x.point_dim);
    for (int t = 0; t < 7; ++t) CHECK(back.points[t] == x.points[t]);
    CHECK_THROWS_AS(unflatten(flat, Space::euclidean, 3, 8), std::invalid_argument);
}

TEST_CASE("normalization identity maps trajectories to themselves") {
    Rng rng(7);
    auto x = random_traj(rng, Space::euclidean, 4, 5);
    auto n = Normalization::identity(4);
    auto y = n.normalize(x);
    for (int t = 0; t < 5; ++t) CHECK(y.points[t] == x.points[t]);
}

TEST_CASE("fit centers each coordinate on its midrange") {
    auto a = make_traj(Space::euclidean, 2, {{-2.0, 10.0}, {4.0, 10.0}});
    auto b = make_traj(Space::euclidean, 2, {{0.0, 14.0}, {1.0, 12.0}});
    auto n = Normalization::fit({a, b});
    CHECK(n.offset[0] == doctest::Approx(1.0));  // midrange of [-2, 4]
    CHECK(n.scale[0] == doctest::Approx(3.0));   // half-range
    CHECK(n.offset[1] == doctest::Approx(12.0)); // midrange of [10, 14]
    CHECK(n.scale[1] == doctest::Approx(2.0));
    auto an = n.normalize(a);
    for (const auto& p : an.points)
        for (double v : p) {
            CHECK(v >= -1.0 - 1e-12);
            CHECK(v <= 1.0 + 1e-12);
        }
    // constant coordinate must not produce a zero scale
    auto c = make_traj(Space::euclidean, 1, {{5.0}, {5.0}});
    auto nc = Normalization::fit({c});
    CHECK(nc.scale[0] > 0.0);
}

TEST_CASE("fit leaves se3 rotation coordinates untouched") {
    Rng rng(8);
    auto x = random_traj(rng, Space::se3, 6, 6);
    auto n = Normalization::fit({x});
    for (int d = 3; d < 6; ++d) {
        CHECK(n.offset[d] == 0.0);
        CHECK(n.scale[d] == 1.0);
    }
    auto y = n.normalize(x);
    for (int t = 0; t < 6; ++t)
        for (int d = 3; d < 6; ++d) CHECK(y.points[t][d] == x.points[t][d]);
}

TEST_CASE("normalize then denormalize recovers coordinates") {
    Rng rng(9);
    auto x = random_traj(rng, Space::euclidean, 3, 8);
    auto n = Normalization::fit({x});
    auto back = n.denormalize(n.normalize(x));
    for (int t = 0; t < 8; ++t)
        for (int d = 0; d < 3; ++d) CHECK(std::abs(back.points[t][d] - x.points[t][d]) < 1e-12);
}

TEST_CASE("normalization validation rejects bad shapes and scales") {
    Normalization n = Normalization::identity(3);
    CHECK_NOTHROW(n.validate(3));
    CHECK_THROWS_AS(n.validate(2), std::invalid_argument);
    n.scale[1] = 0.0;
    CHECK_THROWS_AS(n.validate(3), std::invalid_argument);
}

TEST_CASE("euclidean trajectory distance has the closed form") {
    auto a = make_traj(Space::euclidean, 2, {{0.0, 0.0}, {1.0, 1.0}});
    auto b = make_traj(Space::euclidean, 2, {{3.0, 4.0}, {1.0, 1.0}});
    CHECK(traj_dist_sq(a, b, 1.0) == doctest::Approx(25.0));
    auto c = make_traj(Space::euclidean, 3, {{0, 0, 0}, {0, 0, 0}});
    CHECK_THROWS_AS(traj_dist_sq(a, c, 1.0), std::invalid_argument);
}

TEST_CASE("bitwise-equal trajectories are at distance exactly zero") {
    Rng rng(10);
    auto e = random_traj(rng, Space::euclidean, 5, 9);
    CHECK(traj_dist_sq(e, e, 1.0) == 0.0);
    auto s = random_traj(rng, Space::se3, 6, 9);
    CHECK(traj_dist_sq(s, s, 2.5) == 0.0);
    auto copy = s;
    CHECK(traj_dist_sq(s, copy, 2.5) == 0.0);
}

TEST_CASE("se3 trajectory distance weights the rotation by lambda") {
    auto a = make_traj(Space::se3, 6, {{0, 0, 0, 0, 0, 0}});
    auto b = make_traj(Space::se3, 6, {{1, 0, 0, 0, 0, kPi / 2}});
    double d0 = traj_dist_sq(a, b, 0.0);
    double d2 = traj_dist_sq(a, b, 2.0);
    CHECK(d0 == doctest::Approx(1.0));
    CHECK(d2 == doctest::Approx(1.0 + 2.0 * (kPi / 2) * (kPi / 2)).epsilon(1e-12));
}

TEST_CASE("distance gradient matches finite differences in both spaces") {
    Rng rng(11);
    const double h = 1e-6;
    for (Space space : {Space::euclidean, Space::se3}) {
        int dim = space == Space::euclidean ? 3 : 6;
        auto a = random_traj(rng, space, dim, 4);
        auto b = random_traj(rng, space, dim, 4);
        auto g = traj_dist_sq_grad_b(a, b, 0.8);
        REQUIRE(g.size() == static_cast<std::size_t>(4 * dim));
        for (int t = 0; t < 4; ++t)
            for (int d = 0; d < dim; ++d) {
                auto bp = b, bm = b;
                bp.points[t][d] += h;
                bm.points[t][d] -= h;
                double fd = (traj_dist_sq(a, bp, 0.8) - traj_dist_sq(a, bm, 0.8)) / (2.0 * h);
                CHECK(std::abs(fd - g[static_cast<std::size_t>(t) * dim + d]) <= 1e-5 * std::max(1.0, std::abs(fd)));
            }
    }
}

TEST_CASE("resampling to the same length copies the trajectory") {
    Rng rng(12);
    auto x = random_traj(rng, Space::euclidean, 2, 9);
    auto y = resample_trajectory(x, 9);
    for (int t = 0; t < 9; ++t) CHECK(y.points[t] == x.points[t]);
}

TEST_CASE("resampling a two-point segment fills in the straight line") {
    auto x = make_traj(Space::euclidean, 1, {{0.0}, {1.0}});
    auto y = resample_trajectory(x, 5);
    REQUIRE(y.T() == 5);
    for (int k = 0; k < 5; ++k) CHECK(y.points[k][0] == doctest::Approx(k / 4.0).epsilon(1e-15));
}

TEST_CASE("resampling preserves endpoints bitwise") {
    Rng rng(13);
    for (Space space : {Space::euclidean, Space::se3}) {
        int dim = space == Space::euclidean ? 3 : 6;
        auto x = random_traj(rng, space, dim, 7);
        for (int tn : {2, 5, 7, 12, 40}) {
            auto y = resample_trajectory(x, tn);
            CHECK(y.points.front() == x.points.front());
            CHECK(y.points.back() == x.points.back());
        }
    }
}

TEST_CASE("upsampling then downsampling over nested grids round-trips") {
    Rng rng(14);
    auto x = random_traj(rng, Space::euclidean, 2, 5);
    auto up = resample_trajectory(x, 9); // grid of 5 nests in grid of 9
    auto back = resample_trajectory(up, 5);
    for (int t = 0; t < 5; ++t)
        for (int d = 0; d < 2; ++d) CHECK(std::abs(back.points[t][d] - x.points[t][d]) < 1e-12);
}

TEST_CASE("se3 resampling interpolates rotations along the geodesic") {
    double theta = 1.2;
    auto x = make_traj(Space::se3, 6, {{0, 0, 0, 0, 0, 0}, {2.0, 0, 0, 0, 0, theta}});
    auto y = resample_trajectory(x, 3);
    REQUIRE(y.T() == 3);
    CHECK(y.points[1][0] == doctest::Approx(1.0));
    CHECK(y.points[1][5] == doctest::Approx(theta / 2.0).epsilon(1e-12));
    CHECK(std::abs(y.points[1][3]) < 1e-12);
    CHECK(std::abs(y.points[1][4]) < 1e-12);
}

TEST_CASE("resampling rejects degenerate lengths") {
    auto x = make_traj(Space::euclidean, 1, {{0.0}, {1.0}});
    CHECK_THROWS_AS(resample_trajectory(x, 1), std::invalid_argument);
    auto one = make_traj(Space::euclidean, 1, {{0.0}});
    CHECK_THROWS_AS(resample_trajectory(one, 5), std::invalid_argument);
}
