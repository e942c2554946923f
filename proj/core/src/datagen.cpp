#include "mmfp/datagen.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "mmfp/lie.hpp"
#include "mmfp/rng.hpp"

namespace mmfp {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Catmull-Rom through the control points, one-sided tangents at the
// ends. u in [0, n_segments]; integer u hits control points exactly.
std::vector<double> spline_eval(const std::vector<std::vector<double>>& ctrl, double u) {
    const int nseg = static_cast<int>(ctrl.size()) - 1;
    int seg = static_cast<int>(u);
    if (seg >= nseg) seg = nseg - 1;
    const double s = u - seg;
    const std::size_t dim = ctrl[0].size();
    std::vector<double> out(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        const double p0 = ctrl[seg][d], p1 = ctrl[seg + 1][d];
        const double t0 = seg == 0 ? p1 - p0 : 0.5 * (p1 - ctrl[seg - 1][d]);
        const double t1 = seg == nseg - 1 ? p1 - p0 : 0.5 * (ctrl[seg + 2][d] - p0);
        const double h00 = (2.0 * s - 3.0) * s * s + 1.0;
        const double h10 = ((s - 2.0) * s + 1.0) * s;
        const double h01 = (3.0 - 2.0 * s) * s * s;
        const double h11 = (s - 1.0) * s * s;
        out[d] = h00 * p0 + h10 * t0 + h01 * p1 + h11 * t1;
    }
    return out;
}

double smoothstep01(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    return t * t * (3.0 - 2.0 * t);
}

MotionDataset finish(MotionDataset ds) {
    ds.norm = Normalization::fit(ds.trajectories);
    ds.validate();
    return ds;
}

const std::array<const char*, 4> kToyRouteNames = {"top", "upper", "lower", "bottom"};
const std::array<double, 4> kToyRouteHeights = {1.0, 0.45, -0.45, -1.0};

const std::array<const char*, 5> kPourDirectionNames = {"very left", "left", "center", "right", "very right"};
const std::array<const char*, 5> kWaveDirectionNames = {"very left", "left", "front", "right", "very right"};
const std::array<double, 5> kDirectionAngles = {-1.0, -0.5, 0.0, 0.5, 1.0};
const std::array<const char*, 3> kWaveStyleNames = {"small", "big", "very big"};
const std::array<double, 3> kWaveAmplitudes = {0.25, 0.55, 0.9};

std::string toy_level1_text() { return "go to the origin"; }
std::string toy_level2_text(int route) {
    return std::string("go to the origin via the ") + kToyRouteNames[route] + " passage";
}

std::string pour_level1_text() { return "Give me a drink, anything please"; }
std::string pour_level2_text(int style) {
    return style == 0 ? "pour me a cup of water" : "pour me a glass of wine";
}
std::string pour_level3_text(int style, int dir) {
    return pour_level2_text(style) + " from the " + kPourDirectionNames[dir];
}

std::string wave_level1_text() { return "wave your hand"; }
std::string wave_level2_text(int style) { return std::string("wave your hand ") + kWaveStyleNames[style]; }
std::string wave_level3_text(int style, int dir) {
    return wave_level2_text(style) + " to the " + kWaveDirectionNames[dir];
}

} // namespace

MotionDataset gen_toy2d(std::uint64_t seed) {
    MotionDataset ds;
    ds.space = Space::euclidean;
    ds.point_dim = 2;
    ds.T = 201;
    Rng rng = Rng::derive(seed, 0);

    const std::vector<double> start = {-1.2, 0.0};
    const std::vector<double> goal = {0.0, 0.0};
    const double jitter_sigma = 0.06; // 3% of the 2-unit workspace

    for (int route = 0; route < 4; ++route) {
        const double h = kToyRouteHeights[route];
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<std::vector<double>> ctrl = {
                start, {-0.9, 0.8 * h}, {-0.6, h}, {-0.3, 0.8 * h}, goal};
            for (int i = 1; i <= 3; ++i)
                for (int d = 0; d < 2; ++d) ctrl[i][d] += jitter_sigma * rng.normal();

            Trajectory x;
            x.space = Space::euclidean;
            x.point_dim = 2;
            x.points.reserve(ds.T);
            const int nseg = static_cast<int>(ctrl.size()) - 1;
            for (int k = 0; k < ds.T; ++k) {
                if (k == 0) {
                    x.points.push_back(start);
                } else if (k == ds.T - 1) {
                    x.points.push_back(goal);
                } else {
                    x.points.push_back(spline_eval(ctrl, static_cast<double>(k) * nseg / (ds.T - 1)));
                }
            }
            ds.trajectories.push_back(std::move(x));
            ds.annotations.push_back({Annotation{1, toy_level1_text(), {}},
                                      Annotation{2, toy_level2_text(route),
                                                 {{"path", route < 2 ? 0 : 1}, {"task", route}}}});
        }
    }
    return finish(std::move(ds));
}

MotionDataset gen_se3_pouring(std::uint64_t seed) {
    MotionDataset ds;
    ds.space = Space::se3;
    ds.point_dim = 6;
    ds.T = 480;
    Rng rng = Rng::derive(seed, 0);

    for (int style = 0; style < 2; ++style) {
        for (int dir = 0; dir < 5; ++dir) {
            // Bounded jitter: the worst-case composed rotation angle stays
            // under 1.02 + 1.02 + 1.02 < pi, so so3_log never wraps.
            const double azimuth = kDirectionAngles[dir] + 0.02 * rng.uniform(-1.0, 1.0);
            const double radius_jit = 1.0 + 0.02 * rng.uniform(-1.0, 1.0);
            const double tilt_amp = 1.0 + 0.02 * rng.uniform(-1.0, 1.0);
            const double roll_amp = style == 1 ? 1.0 + 0.02 * rng.uniform(-1.0, 1.0) : 0.0;
            const double height_jit = 0.008 * rng.uniform(-1.0, 1.0);

            Trajectory x;
            x.space = Space::se3;
            x.point_dim = 6;
            x.points.reserve(ds.T);
            for (int k = 0; k < ds.T; ++k) {
                const double t = static_cast<double>(k) / (ds.T - 1);
                const double approach = smoothstep01(t / 0.45);
                const double radius = (0.55 - 0.37 * approach) * radius_jit;
                const double height = 0.32 - 0.08 * approach + height_jit;
                const double tilt = tilt_amp * smoothstep01((t - 0.45) / 0.4);
                const double roll = roll_amp * smoothstep01((t - 0.85) / 0.15);

                const Mat3 r = mat3_mul(mat3_mul(so3_exp({0.0, 0.0, azimuth}),
                                                 so3_exp({0.0, tilt, 0.0})),
                                        so3_exp({-roll, 0.0, 0.0}));
                const Vec3 w = so3_log(r);
                x.points.push_back({radius * std::cos(azimuth), radius * std::sin(azimuth), height,
                                    w[0], w[1], w[2]});
            }
            ds.trajectories.push_back(std::move(x));
            ds.annotations.push_back({Annotation{1, pour_level1_text(), {}},
                                      Annotation{2, pour_level2_text(style), {{"style", style}}},
                                      Annotation{3, pour_level3_text(style, dir),
                                                 {{"style", style}, {"direction", dir}}}});
        }
    }
    return finish(std::move(ds));
}

MotionDataset gen_waving7dof(std::uint64_t seed) {
    MotionDataset ds;
    ds.space = Space::euclidean;
    ds.point_dim = 7;
    ds.T = 720;
    Rng rng = Rng::derive(seed, 0);

    const std::array<double, 7> weight = {0.12, 0.25, 0.18, 0.55, 0.22, 1.0, 0.35};
    const std::array<double, 7> phase = {0.0, 0.3, 0.6, 0.2, 0.5, 0.0, 0.4};

    for (int style = 0; style < 3; ++style) {
        for (int dir = 0; dir < 5; ++dir) {
            for (int rep = 0; rep < 2; ++rep) {
                // Uniform amplitude jitter keeps the style classes
                // strictly ordered: 1.03 * 0.25 < 0.97 * 0.55.
                const double amp = kWaveAmplitudes[style] * (1.0 + 0.03 * rng.uniform(-1.0, 1.0));
                const double dir_jit = 0.02 * rng.normal();
                const double phase_jit = 0.05 * rng.normal();

                std::array<double, 7> rest = {kDirectionAngles[dir] + dir_jit, 0.35,
                                              0.2 * kDirectionAngles[dir], -1.2, 0.0, 1.4, 0.0};
                Trajectory x;
                x.space = Space::euclidean;
                x.point_dim = 7;
                x.points.reserve(ds.T);
                for (int k = 0; k < ds.T; ++k) {
                    const double t = static_cast<double>(k) / (ds.T - 1);
                    const double env = std::sin(kPi * t);
                    const double carrier = 2.0 * kPi * 2.0 * t + phase_jit;
                    std::vector<double> q(7);
                    for (int j = 0; j < 7; ++j)
                        q[j] = rest[j] + amp * weight[j] * std::sin(carrier + phase[j]) * env * env;
                    x.points.push_back(std::move(q));
                }
                ds.trajectories.push_back(std::move(x));
                ds.annotations.push_back({Annotation{1, wave_level1_text(), {}},
                                          Annotation{2, wave_level2_text(style), {{"style", style}}},
                                          Annotation{3, wave_level3_text(style, dir),
                                                     {{"style", style}, {"direction", dir}}}});
            }
        }
    }
    return finish(std::move(ds));
}

MotionDataset generate_dataset(const std::string& kind, std::uint64_t seed) {
    if (kind == "toy2d") return gen_toy2d(seed);
    if (kind == "se3-pouring") return gen_se3_pouring(seed);
    if (kind == "waving7") return gen_waving7dof(seed);
    throw std::invalid_argument("generate_dataset: unknown kind '" + kind +
                                "', expected toy2d, se3-pouring or waving7");
}

namespace {

void add(ParaphraseMap& map, const std::string& canonical, std::vector<std::string> variants) {
    map[canonical] = ParaphraseSet{canonical, std::move(variants)};
}

std::string pour_style_phrase(int style, int which) {
    // which: 0 = "fill ...", 1 = "pour some ...".
    if (style == 0) return which == 0 ? "fill a cup with water" : "pour some water";
    return which == 0 ? "fill a glass with wine" : "pour some wine";
}

std::string pour_dir_phrase(int dir, int which) {
    // which: 0 = "from the ... side", 1 = "approaching from the ...".
    const std::string name = kPourDirectionNames[dir];
    return which == 0 ? "from the " + name + " side" : "approaching from the " + name;
}

} // namespace

ParaphraseMap builtin_train_paraphrases(const std::string& kind) {
    ParaphraseMap map;
    if (kind == "toy2d") {
        add(map, toy_level1_text(), {"move to the origin", "head to the origin", "take a path to the origin"});
        for (int r = 0; r < 4; ++r) {
            const std::string name = kToyRouteNames[r];
            add(map, toy_level2_text(r),
                {"move to the origin via the " + name + " passage",
                 "head to the origin through the " + name + " passage",
                 "take the " + name + " passage to the origin"});
        }
        return map;
    }
    if (kind == "se3-pouring") {
        add(map, pour_level1_text(), {"give me any drink", "bring me a drink please"});
        for (int s = 0; s < 2; ++s)
            add(map, pour_level2_text(s), {pour_style_phrase(s, 0), pour_style_phrase(s, 1)});
        for (int s = 0; s < 2; ++s)
            for (int d = 0; d < 5; ++d)
                add(map, pour_level3_text(s, d),
                    {pour_style_phrase(s, 0) + " " + pour_dir_phrase(d, 0),
                     pour_style_phrase(s, 1) + " " + pour_dir_phrase(d, 1)});
        return map;
    }
    if (kind == "waving7") {
        add(map, wave_level1_text(), {"wave the hand", "do a waving motion"});
        for (int s = 0; s < 3; ++s) {
            const std::string name = kWaveStyleNames[s];
            add(map, wave_level2_text(s), {"wave " + name, "do a " + name + " waving motion"});
            for (int d = 0; d < 5; ++d) {
                const std::string where = kWaveDirectionNames[d];
                add(map, wave_level3_text(s, d),
                    {"wave " + name + " to the " + where, "do a " + name + " waving motion to the " + where});
            }
        }
        return map;
    }
    throw std::invalid_argument("builtin_train_paraphrases: unknown kind '" + kind + "'");
}

ParaphraseMap builtin_heldout_paraphrases(const std::string& kind) {
    ParaphraseMap map;
    if (kind == "toy2d") {
        add(map, toy_level1_text(), {"take a path and head to the origin", "move toward the origin"});
        for (int r = 0; r < 4; ++r) {
            const std::string name = kToyRouteNames[r];
            add(map, toy_level2_text(r),
                {"move to the origin through the " + name + " passage",
                 "take the " + name + " passage and head to the origin"});
        }
        return map;
    }
    if (kind == "se3-pouring") {
        add(map, pour_level1_text(), {"bring me any drink please"});
        add(map, pour_level2_text(0), {"fill a cup with some water"});
        add(map, pour_level2_text(1), {"fill a glass with some wine"});
        for (int s = 0; s < 2; ++s)
            for (int d = 0; d < 5; ++d)
                add(map, pour_level3_text(s, d), {pour_style_phrase(s, 0) + " " + pour_dir_phrase(d, 1)});
        return map;
    }
    if (kind == "waving7") {
        add(map, wave_level1_text(), {"do a hand waving motion"});
        for (int s = 0; s < 3; ++s) {
            const std::string name = kWaveStyleNames[s];
            add(map, wave_level2_text(s), {"wave the hand " + name});
            for (int d = 0; d < 5; ++d)
                add(map, wave_level3_text(s, d), {"wave the hand " + name + " to the " + kWaveDirectionNames[d]});
        }
        return map;
    }
    throw std::invalid_argument("builtin_heldout_paraphrases: unknown kind '" + kind + "'");
}

} // namespace mmfp
