// Acceptance harness: runs the release gate end to end and prints one
// [PASS]/[FAIL] line per criterion. Optional argv values select criterion
// numbers ("mmfp_acceptance 3 10"). Exits nonzero when anything fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mmfp/checkpoint.hpp"
#include "mmfp/cli.hpp"
#include "mmfp/datagen.hpp"
#include "mmfp/dataset.hpp"
#include "mmfp/diffusion.hpp"
#include "mmfp/flow.hpp"
#include "mmfp/lie.hpp"
#include "mmfp/manifold.hpp"
#include "mmfp/metrics.hpp"
#include "mmfp/rng.hpp"
#include "mmfp/runconfig.hpp"
#include "mmfp/textenc.hpp"
#include "mmfp/trajectory.hpp"

namespace fs = std::filesystem;
using namespace mmfp;

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kGradTol = 1e-4;

// |analytic - fd| <= tol * max(1, |fd|), reported as the worst ratio.
struct GradStats {
    double worst = 0.0;
    void add(double analytic, double fd) {
        worst = std::max(worst, std::abs(analytic - fd) / std::max(1.0, std::abs(fd)));
    }
    bool ok() const { return worst <= kGradTol; }
};

Trajectory random_traj(Rng& rng, Space space, int point_dim, int T) {
    Trajectory x;
    x.space = space;
    x.point_dim = point_dim;
    for (int t = 0; t < T; ++t) {
        auto p = rng.normal_vec(static_cast<std::size_t>(point_dim));
        if (space == Space::se3)
            for (int d = 3; d < 6; ++d) p[static_cast<std::size_t>(d)] *= 0.4;
        x.points.push_back(std::move(p));
    }
    return x;
}

void nudge(Mlp& net, Rng& rng) {
    for (double& p : net.params()) p += 0.05 * rng.normal();
}

void check_manifold_grads(Rng& rng, Space space, GradStats& stats) {
    const int point_dim = space == Space::se3 ? 6 : 2 + rng.uniform_int(2);
    const int T = 3 + rng.uniform_int(2);
    ManifoldConfig cfg;
    cfg.m = 2;
    cfg.encoder_hidden = {4};
    cfg.decoder_hidden = {4};
    cfg.lambda_rot = 0.7;
    cfg.seed = rng.next_u64();
    MotionManifold mf = MotionManifold::make(space, point_dim, T, cfg);
    Rng init = Rng::derive(cfg.seed, 0);
    mf.encoder().init(init);
    mf.decoder().init(init);
    nudge(mf.encoder(), rng);
    nudge(mf.decoder(), rng);

    std::vector<Trajectory> data;
    for (int i = 0; i < 3; ++i) data.push_back(random_traj(rng, space, point_dim, T));
    const std::vector<int> batch{0, 1, 2};
    std::vector<MixupDraw> mixup{{0, 1, rng.uniform(-0.4, 1.4)}, {1, 2, rng.uniform(-0.4, 1.4)}};
    const double eta = 0.05, delta = 0.1;

    std::vector<double> eg(mf.encoder().params().size(), 0.0), dg(mf.decoder().params().size(), 0.0);
    manifold_objective_grad(mf, data, batch, mixup, eta, delta, eg, dg, nullptr);

    auto value = [&] { return manifold_objective(mf, data, batch, mixup, eta, delta); };
    auto probe = [&](Mlp& net, const std::vector<double>& grad) {
        for (std::size_t j = 0; j < net.params().size(); ++j) {
            const double save = net.params()[j];
            net.params()[j] = save + kFdStep;
            const double up = value();
            net.params()[j] = save - kFdStep;
            const double down = value();
            net.params()[j] = save;
            stats.add(grad[j], (up - down) / (2.0 * kFdStep));
        }
    };
    probe(mf.encoder(), eg);
    probe(mf.decoder(), dg);
}

std::vector<FlowItem> random_flow_items(Rng& rng, const TextEncoder& enc, int m, int n) {
    std::vector<FlowItem> items(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        items[static_cast<std::size_t>(i)].z = rng.normal_vec(static_cast<std::size_t>(m));
        items[static_cast<std::size_t>(i)].c = enc.encode("item " + std::to_string(i));
        const int k = rng.uniform_int(3);
        for (int v = 0; v < k; ++v)
            items[static_cast<std::size_t>(i)].paraphrases.push_back(
                enc.encode("item " + std::to_string(i) + " variant " + std::to_string(v)));
    }
    return items;
}

void check_flow_grads(Rng& rng, const TextEncoder& enc, GradStats& stats) {
    const int m = 2, p = 2;
    Mlp field(MlpSpec{1 + m + p, {4}, m});
    Mlp head(MlpSpec{kTaskVectorDim, {2}, p});
    Rng init(rng.next_u64());
    field.init(init);
    head.init(init);
    nudge(field, rng);
    nudge(head, rng);

    const auto items = random_flow_items(rng, enc, m, 3);
    std::vector<FmDraw> draws;
    for (const auto& item : items) draws.push_back({rng.uniform(), rng.normal_vec(item.z.size())});
    const double gamma = 0.3;

    std::vector<double> fg(field.params().size(), 0.0), hg(head.params().size(), 0.0);
    regularized_fm_loss_grad(field, head, items, gamma, -1, draws, fg, hg);

    auto value = [&] { return regularized_fm_loss(field, head, items, gamma, -1, draws); };
    auto probe = [&](Mlp& net, const std::vector<double>& grad) {
        for (std::size_t j = 0; j < net.params().size(); ++j) {
            const double save = net.params()[j];
            net.params()[j] = save + kFdStep;
            const double up = value();
            net.params()[j] = save - kFdStep;
            const double down = value();
            net.params()[j] = save;
            stats.add(grad[j], (up - down) / (2.0 * kFdStep));
        }
    };
    probe(field, fg);
    probe(head, hg);
}

void check_score_grads(Rng& rng, const TextEncoder& enc, GradStats& stats) {
    const int m = 2, p = 2;
    Mlp score(MlpSpec{1 + m + p, {4}, m});
    Mlp head(MlpSpec{kTaskVectorDim, {2}, p});
    Rng init(rng.next_u64());
    score.init(init);
    head.init(init);
    nudge(score, rng);
    nudge(head, rng);

    const auto items = random_flow_items(rng, enc, m, 3);
    const NoiseSchedule sched = NoiseSchedule::vp_cosine(16);
    std::vector<DiffusionDraw> draws;
    for (const auto& item : items)
        draws.push_back({1 + rng.uniform_int(sched.n_steps), rng.normal_vec(item.z.size())});

    std::vector<double> sg(score.params().size(), 0.0), hg(head.params().size(), 0.0);
    denoising_loss_grad(score, head, items, sched, draws, sg, hg);

    auto value = [&] { return denoising_loss(score, head, items, sched, draws); };
    auto probe = [&](Mlp& net, const std::vector<double>& grad) {
        for (std::size_t j = 0; j < net.params().size(); ++j) {
            const double save = net.params()[j];
            net.params()[j] = save + kFdStep;
            const double up = value();
            net.params()[j] = save - kFdStep;
            const double down = value();
            net.params()[j] = save;
            stats.add(grad[j], (up - down) / (2.0 * kFdStep));
        }
    };
    probe(score, sg);
    probe(head, hg);
}

void check_classifier_grads(Rng& rng, GradStats& stats) {
    Mlp net(MlpSpec{5, {6}, 3});
    Rng init(rng.next_u64());
    net.init(init);
    nudge(net, rng);
    std::vector<std::vector<double>> feats;
    std::vector<int> labels;
    for (int i = 0; i < 6; ++i) {
        feats.push_back(rng.normal_vec(5));
        labels.push_back(rng.uniform_int(3));
    }
    std::vector<double> grad(net.params().size(), 0.0);
    classifier_loss_grad(net, feats, labels, grad);
    for (std::size_t j = 0; j < net.params().size(); ++j) {
        const double save = net.params()[j];
        std::vector<double> scratch(grad.size(), 0.0);
        net.params()[j] = save + kFdStep;
        const double up = classifier_loss_grad(net, feats, labels, scratch);
        net.params()[j] = save - kFdStep;
        std::fill(scratch.begin(), scratch.end(), 0.0);
        const double down = classifier_loss_grad(net, feats, labels, scratch);
        net.params()[j] = save;
        stats.add(grad[j], (up - down) / (2.0 * kFdStep));
    }
}

bool criterion_gradients(std::string& detail) {
    const TextEncoder enc = TextEncoder::hash_encoder();
    GradStats manifold_stats, flow_stats, score_stats, clf_stats;
    Rng rng(2024);
    for (int i = 0; i < 10; ++i) check_manifold_grads(rng, Space::euclidean, manifold_stats);
    for (int i = 0; i < 10; ++i) check_manifold_grads(rng, Space::se3, manifold_stats);
    for (int i = 0; i < 20; ++i) check_flow_grads(rng, enc, flow_stats);
    for (int i = 0; i < 20; ++i) check_score_grads(rng, enc, score_stats);
    for (int i = 0; i < 20; ++i) check_classifier_grads(rng, clf_stats);
    std::ostringstream out;
    out << "worst rel err: encoder/decoder " << manifold_stats.worst << ", field/head " << flow_stats.worst
        << ", score " << score_stats.worst << ", classifier " << clf_stats.worst;
    detail = out.str();
    return manifold_stats.ok() && flow_stats.ok() && score_stats.ok() && clf_stats.ok();
}

bool criterion_geometry(std::string& detail) {
    Rng rng(7);
    double worst = 0.0;
    auto round_trip = [&](const Vec3& w) {
        const Mat3 r = so3_exp(w);
        const Mat3 back = so3_exp(so3_log(r));
        double err = 0.0;
        for (int i = 0; i < 9; ++i) err += (back[i] - r[i]) * (back[i] - r[i]);
        worst = std::max(worst, std::sqrt(err));
    };
    for (int i = 0; i < 9000; ++i) {
        Vec3 axis{rng.normal(), rng.normal(), rng.normal()};
        const double n = norm3(axis);
        const double angle = rng.uniform() * 3.14159265358979;
        for (auto& a : axis) a *= angle / n;
        round_trip(axis);
    }
    constexpr double kPi = 3.14159265358979323846;
    for (int i = 0; i < 1000; ++i) {
        Vec3 axis{rng.normal(), rng.normal(), rng.normal()};
        const double n = norm3(axis);
        const double angle = kPi - std::pow(10.0, -(3.0 + 5.0 * rng.uniform()));
        for (auto& a : axis) a *= angle / n;
        round_trip(axis);
    }
    const bool rot_ok = worst <= 1e-9;

    Trajectory a, b;
    a.space = b.space = Space::se3;
    a.point_dim = b.point_dim = 6;
    a.points.push_back({0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    b.points.push_back({0.0, 0.0, 0.0, 0.0, 0.0, kPi / 2.0});
    const double d = traj_dist_sq(a, b, 1.0);
    const double expected = (kPi / 2.0) * (kPi / 2.0);
    const bool hand_ok = std::abs(d - expected) <= 1e-12;

    std::ostringstream out;
    out << "worst round trip " << worst << ", quarter-turn distance off by " << std::abs(d - expected);
    detail = out.str();
    return rot_ok && hand_ok;
}

double mmd_reference(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b,
                     double sigma) {
    auto kernel = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::exp(-s / (2.0 * sigma * sigma));
    };
    double kxx = 0.0, kyy = 0.0, kxy = 0.0;
    for (const auto& x : a)
        for (const auto& y : a) kxx += kernel(x, y);
    for (const auto& x : b)
        for (const auto& y : b) kyy += kernel(x, y);
    for (const auto& x : a)
        for (const auto& y : b) kxy += kernel(x, y);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    return kxx / (na * na) + kyy / (nb * nb) - 2.0 * kxy / (na * nb);
}

bool criterion_mmd(std::string& detail) {
    Rng rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int dim = 1 + rng.uniform_int(3);
        const int na = 1 + rng.uniform_int(5), nb = 1 + rng.uniform_int(5);
        std::vector<std::vector<double>> a, b;
        for (int i = 0; i < na; ++i) a.push_back(rng.normal_vec(static_cast<std::size_t>(dim)));
        for (int i = 0; i < nb; ++i) b.push_back(rng.normal_vec(static_cast<std::size_t>(dim)));
        const double sigma = 0.5 + rng.uniform();
        worst = std::max(worst, std::abs(mmd_sq(a, b, KernelSpec{sigma}) - mmd_reference(a, b, sigma)));
        if (mmd_sq(a, a, KernelSpec{sigma}) != 0.0) worst = 1.0;
    }
    const std::vector<std::vector<double>> u{{0.0}}, v{{1.0}};
    const double hand = mmd_sq(u, v, KernelSpec{1.0});
    const double expected = 2.0 - 2.0 * std::exp(-0.5);
    const bool hand_ok = std::abs(hand - expected) <= 1e-12;
    std::ostringstream out;
    out << "worst oracle gap " << worst << ", hand value off by " << std::abs(hand - expected);
    detail = out.str();
    return worst <= 1e-12 && hand_ok;
}

bool criterion_ode(std::string& detail) {
    const int m = 3, p = 2;
    const std::vector<double> tau{0.3, -0.7};
    const std::vector<double> z0{1.0, -0.5, 2.0};

    Mlp zero_field(MlpSpec{1 + m + p, {}, m}); // fresh parameters are all zero
    bool identity_ok = true;
    for (OdeSolver solver : {OdeSolver::euler, OdeSolver::rk4}) {
        SamplerConfig cfg;
        cfg.steps = 7;
        cfg.solver = solver;
        identity_ok = identity_ok && sample_latent(zero_field, tau, cfg, z0) == z0;
    }

    Mlp constant_field(MlpSpec{1 + m + p, {}, m});
    for (int d = 0; d < m; ++d) constant_field.params()[static_cast<std::size_t>(m * (1 + m + p) + d)] = 1.0;
    SamplerConfig euler4;
    euler4.steps = 4;
    const auto shifted = sample_latent(constant_field, tau, euler4, std::vector<double>(m, 0.0));
    const bool constant_ok = shifted == std::vector<double>(m, 1.0);

    Mlp linear_field(MlpSpec{1 + m + p, {}, m}); // v_d = z_d, so dz/ds = z
    for (int d = 0; d < m; ++d) linear_field.params()[static_cast<std::size_t>(d * (1 + m + p) + 1 + d)] = 1.0;
    auto rel_err = [&](OdeSolver solver, int steps) {
        SamplerConfig cfg;
        cfg.steps = steps;
        cfg.solver = solver;
        const auto z1 = sample_latent(linear_field, tau, cfg, z0);
        double worst = 0.0;
        for (int d = 0; d < m; ++d) {
            const double exact = z0[static_cast<std::size_t>(d)] * std::exp(1.0);
            worst = std::max(worst, std::abs(z1[static_cast<std::size_t>(d)] - exact) / std::abs(exact));
        }
        return worst;
    };
    const double euler_err = rel_err(OdeSolver::euler, 1000);
    const double rk4_err = rel_err(OdeSolver::rk4, 100);

    std::ostringstream out;
    out << "exp growth rel err: euler " << euler_err << ", rk4 " << rk4_err;
    detail = out.str();
    return identity_ok && constant_ok && euler_err <= 1e-3 && rk4_err <= 1e-8;
}

bool criterion_loss_identities(std::string& detail) {
    const TextEncoder enc = TextEncoder::hash_encoder();
    Rng rng(33);
    const int m = 3, p = 2;
    Mlp field(MlpSpec{1 + m + p, {6}, m});
    Mlp head(MlpSpec{kTaskVectorDim, {4}, p});
    Rng init(4);
    field.init(init);
    head.init(init);
    auto items = random_flow_items(rng, enc, m, 4);

    Rng draws_a = Rng::derive(9, 0), draws_b = Rng::derive(9, 0);
    const double reg0 = regularized_fm_loss(field, head, items, 0.0, -1, draws_a);
    const double plain = conditional_fm_loss(field, head, items, draws_b);
    const bool gamma0_ok = reg0 == plain;

    auto self_items = items;
    for (auto& item : self_items) item.paraphrases = {item.c};
    std::vector<FmDraw> draws;
    for (const auto& item : self_items) draws.push_back({rng.uniform(), rng.normal_vec(item.z.size())});
    const double with_reg = regularized_fm_loss(field, head, self_items, 0.7, -1, draws);
    const double without = regularized_fm_loss(field, head, self_items, 0.0, -1, draws);
    const bool self_paraphrase_ok = with_reg == without;

    bool vp_ok = true;
    for (const NoiseSchedule& sched : {NoiseSchedule::vp_linear(1e-4, 0.02, 1000), NoiseSchedule::vp_cosine(1000)}) {
        if (sched.alpha_bar[0] != 1.0) vp_ok = false;
        for (int t = 1; t <= sched.n_steps; ++t) {
            const double ab = sched.alpha_bar[static_cast<std::size_t>(t)];
            if (!(ab < sched.alpha_bar[static_cast<std::size_t>(t - 1)])) vp_ok = false;
            if (ab + (1.0 - ab) != 1.0) vp_ok = false;
        }
    }

    detail = std::string("gamma-0 match ") + (gamma0_ok ? "exact" : "BROKEN") + ", self-paraphrase term " +
             (self_paraphrase_ok ? "exactly zero" : "NONZERO") + ", vp schedules " +
             (vp_ok ? "monotone and variance preserving" : "BROKEN");
    return gamma0_ok && self_paraphrase_ok && vp_ok;
}

// Shared full-scale toy setup for criteria 6 through 9: dataset seed 7,
// default manifold, classifiers seeded per label kind like the eval
// command does.
struct Lab {
    MotionDataset ds;
    ParaphraseMap train_paras, heldout_paras;
    TextEncoder enc = TextEncoder::hash_encoder();
    MotionManifold manifold = MotionManifold::identity_adapter(Space::euclidean, 1, 1, 1.0);
    std::vector<FlowItem> flow_items, plain_items;
    std::vector<TrajClassifier> clfs;
    bool built = false;

    bool have_default_flow = false;
    Checkpoint default_flow;

    std::map<std::uint64_t, Checkpoint> flow800; // 800-epoch models by seed, gamma 0.1
};

Lab& lab() {
    static Lab instance;
    return instance;
}

void ensure_lab() {
    Lab& l = lab();
    if (l.built) return;
    std::fprintf(stderr, "... building shared toy setup (dataset seed 7, default manifold)\n");
    l.ds = generate_dataset("toy2d", 7);
    l.train_paras = builtin_train_paraphrases("toy2d");
    l.heldout_paras = builtin_heldout_paraphrases("toy2d");
    l.manifold = train_manifold(l.ds, ManifoldConfig{}).manifold;
    l.flow_items = make_latent_pairs(l.ds, l.manifold, l.enc, l.train_paras);
    l.plain_items = make_latent_pairs(l.ds, l.manifold, l.enc, {});
    for (const std::string& kind : l.ds.label_kinds()) {
        ClassifierConfig ccfg;
        ccfg.seed ^= fnv1a64(kind.data(), kind.size());
        l.clfs.push_back(train_classifier(l.ds, kind, ccfg));
    }
    l.built = true;
}

Checkpoint base_checkpoint() {
    const Lab& l = lab();
    Checkpoint ckpt;
    ckpt.space = l.ds.space;
    ckpt.point_dim = l.ds.point_dim;
    ckpt.T = l.ds.T;
    ckpt.norm = l.ds.norm;
    ckpt.manifold = l.manifold;
    ckpt.text_encoder = l.enc;
    return ckpt;
}

Checkpoint flow_checkpoint(FlowTrainResult&& r) {
    Checkpoint ckpt = base_checkpoint();
    ckpt.generative = GenerativeKind::flow;
    ckpt.head = std::move(r.head);
    ckpt.net = std::move(r.field);
    return ckpt;
}

SampleFn sampler_for(const Checkpoint& ckpt) {
    return [&ckpt](const std::string& text, int n, std::uint64_t seed) {
        SamplerConfig sc = ckpt.sampler;
        sc.seed = seed;
        return generate_motion(ckpt, text, n, sc);
    };
}

const Checkpoint& default_flow_checkpoint() {
    ensure_lab();
    Lab& l = lab();
    if (!l.have_default_flow) {
        std::fprintf(stderr, "... training default flow model\n");
        l.default_flow = flow_checkpoint(train_latent_flow(l.flow_items, l.manifold.m(), FlowTrainConfig{}));
        l.have_default_flow = true;
    }
    return l.default_flow;
}

const Checkpoint& flow800_checkpoint(std::uint64_t seed) {
    ensure_lab();
    Lab& l = lab();
    auto it = l.flow800.find(seed);
    if (it == l.flow800.end()) {
        std::fprintf(stderr, "... training 800-epoch flow model, seed %llu\n",
                     static_cast<unsigned long long>(seed));
        FlowTrainConfig cfg;
        cfg.epochs = 800;
        cfg.seed = seed;
        it = l.flow800.emplace(seed, flow_checkpoint(train_latent_flow(l.flow_items, l.manifold.m(), cfg))).first;
    }
    return it->second;
}

bool criterion_toy_accuracy(std::string& detail) {
    const Checkpoint& ckpt = default_flow_checkpoint();
    const Lab& l = lab();
    const auto acc = motion_accuracy(sampler_for(ckpt), l.ds, l.clfs, 100, 0);
    std::ostringstream out;
    out << "path " << acc.at("path") << "% (need >= 98), task " << acc.at("task") << "% (need >= 90)";
    detail = out.str();
    return acc.at("path") >= 98.0 && acc.at("task") >= 90.0;
}

bool criterion_mmd_separation(std::string& detail) {
    const Checkpoint& ckpt = default_flow_checkpoint();
    const Lab& l = lab();
    const SampleFn sample = sampler_for(ckpt);
    const auto texts = l.ds.texts_at_level(2);
    const KernelSpec kernel;

    std::vector<std::vector<std::vector<double>>> gen_feats, demo_feats;
    for (const auto& text : texts) {
        std::vector<std::vector<double>> gen;
        for (const auto& x : sample(text, 100, text_seed(0, text)))
            gen.push_back(eval_features(l.ds.norm.normalize(x), 64));
        gen_feats.push_back(std::move(gen));
        std::vector<std::vector<double>> demos;
        for (int i : l.ds.trajectories_for_text(text))
            demos.push_back(eval_features(l.ds.norm.normalize(l.ds.trajectories[static_cast<std::size_t>(i)]), 64));
        demo_feats.push_back(std::move(demos));
    }

    int hits = 0;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        const double own = mmd_sq(gen_feats[i], demo_feats[i], kernel);
        bool separated = true;
        for (std::size_t j = 0; j < texts.size(); ++j)
            if (j != i && mmd_sq(gen_feats[i], demo_feats[j], kernel) <= own) separated = false;
        hits += separated ? 1 : 0;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(texts.size());
    std::ostringstream out;
    out << hits << "/" << texts.size() << " texts closest to their own demos (need >= 90%)";
    detail = out.str();
    return frac >= 0.9;
}

double task_accuracy(const Checkpoint& ckpt) {
    const Lab& l = lab();
    return motion_accuracy(sampler_for(ckpt), l.ds, l.clfs, 100, 0).at("task");
}

bool criterion_flow_vs_diffusion(std::string& detail) {
    ensure_lab();
    Lab& l = lab();
    double flow_mean = 0.0, diff_mean = 0.0;
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        flow_mean += task_accuracy(flow800_checkpoint(seed));
        std::fprintf(stderr, "... training 800-epoch vp-cosine diffusion, seed %llu\n",
                     static_cast<unsigned long long>(seed));
        DiffusionTrainConfig dcfg;
        dcfg.epochs = 800;
        dcfg.seed = seed;
        const NoiseSchedule sched = NoiseSchedule::vp_cosine(1000);
        auto r = train_latent_diffusion(l.plain_items, l.manifold.m(), sched, dcfg);
        Checkpoint ckpt = base_checkpoint();
        ckpt.generative = GenerativeKind::diffusion;
        ckpt.head = std::move(r.head);
        ckpt.net = std::move(r.score);
        ckpt.schedule = sched;
        diff_mean += task_accuracy(ckpt);
    }
    flow_mean /= 3.0;
    diff_mean /= 3.0;
    std::ostringstream out;
    out << "mean task accuracy over 3 seeds: flow " << flow_mean << "% vs vp-cosine diffusion " << diff_mean << "%";
    detail = out.str();
    return flow_mean >= diff_mean;
}

double robustness_ratio(const Checkpoint& ckpt) {
    const Lab& l = lab();
    const SampleFn sample = sampler_for(ckpt);
    const KernelSpec kernel;
    const double seen = level_mmd(sample, l.ds, 2, 100, kernel, 64, 0);
    const double robust = robust_level_mmd(sample, l.ds, 2, l.heldout_paras, 100, kernel, 64, 0);
    return robust / seen;
}

bool criterion_regularizer(std::string& detail) {
    ensure_lab();
    Lab& l = lab();
    double with_reg = 0.0, without_reg = 0.0;
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        with_reg += robustness_ratio(flow800_checkpoint(seed));
        std::fprintf(stderr, "... training 800-epoch flow without the paraphrase term, seed %llu\n",
                     static_cast<unsigned long long>(seed));
        FlowTrainConfig cfg;
        cfg.epochs = 800;
        cfg.seed = seed;
        cfg.gamma = 0.0;
        without_reg += robustness_ratio(flow_checkpoint(train_latent_flow(l.flow_items, l.manifold.m(), cfg)));
    }
    with_reg /= 3.0;
    without_reg /= 3.0;
    std::ostringstream out;
    out << "mean held-out/seen mmd ratio over 3 seeds: gamma 0.1 -> " << with_reg << ", gamma 0 -> " << without_reg;
    detail = out.str();
    return with_reg <= without_reg;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "<unreadable " + path + ">";
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

bool criterion_determinism(std::string& detail) {
    const fs::path dir = "/tmp/mmfp_acceptance_scratch";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto p = [&](const std::string& name) { return (dir / name).string(); };

    std::ofstream(p("cfg.json")) << R"({
      "manifold": {"m": 2, "encoder_hidden": [8], "decoder_hidden": [8], "epochs": 3, "batch_size": 16},
      "flow": {"epochs": 3, "batch_size": 16, "field_hidden": [8], "head_hidden": [8], "p": 2},
      "diffusion": {"epochs": 3, "batch_size": 16, "score_hidden": [8], "head_hidden": [8], "p": 2},
      "schedule": {"n_steps": 12},
      "sampler": {"steps": 6},
      "eval": {"n_per_text": 2, "max_timesteps": 16, "classifier": {"hidden": [8], "epochs": 3}}
    })";

    std::vector<std::string> mismatches;
    auto run_twice = [&](const std::string& what, const std::vector<std::string>& args_a,
                         const std::vector<std::string>& args_b, const std::string& out_a,
                         const std::string& out_b) {
        if (run_cli(args_a) != 0 || run_cli(args_b) != 0) {
            mismatches.push_back(what + " (command failed)");
            return;
        }
        if (slurp(out_a) != slurp(out_b)) mismatches.push_back(what);
    };

    run_twice("gen-data", {"gen-data", "--kind", "toy2d", "--seed", "3", "--out", p("d1.json")},
              {"gen-data", "--kind", "toy2d", "--seed", "3", "--out", p("d2.json")}, p("d1.json"), p("d2.json"));
    if (slurp(p("d1.train-paraphrases.json")) != slurp(p("d2.train-paraphrases.json")))
        mismatches.push_back("gen-data paraphrases");

    run_twice("train-manifold",
              {"train-manifold", "--data", p("d1.json"), "--config", p("cfg.json"), "--out", p("m1.json")},
              {"train-manifold", "--data", p("d1.json"), "--config", p("cfg.json"), "--out", p("m2.json")},
              p("m1.json"), p("m2.json"));
    run_twice("train-flow",
              {"train-flow", "--data", p("d1.json"), "--ckpt", p("m1.json"), "--paraphrases",
               p("d1.train-paraphrases.json"), "--config", p("cfg.json"), "--out", p("f1.json")},
              {"train-flow", "--data", p("d1.json"), "--ckpt", p("m1.json"), "--paraphrases",
               p("d1.train-paraphrases.json"), "--config", p("cfg.json"), "--out", p("f2.json")},
              p("f1.json"), p("f2.json"));
    run_twice("train-diffusion",
              {"train-diffusion", "--data", p("d1.json"), "--ckpt", p("m1.json"), "--schedule", "vp1", "--config",
               p("cfg.json"), "--out", p("g1.json")},
              {"train-diffusion", "--data", p("d1.json"), "--ckpt", p("m1.json"), "--schedule", "vp1", "--config",
               p("cfg.json"), "--out", p("g2.json")},
              p("g1.json"), p("g2.json"));
    run_twice("sample",
              {"sample", "--ckpt", p("f1.json"), "--text", "go to the origin", "--n", "4", "--seed", "5", "--out",
               p("s1.json")},
              {"sample", "--ckpt", p("f1.json"), "--text", "go to the origin", "--n", "4", "--seed", "5", "--out",
               p("s2.json")},
              p("s1.json"), p("s2.json"));
    run_twice("eval",
              {"eval", "--ckpt", p("f1.json"), "--data", p("d1.json"), "--paraphrases",
               p("d1.heldout-paraphrases.json"), "--config", p("cfg.json"), "--report", p("r1.json")},
              {"eval", "--ckpt", p("f1.json"), "--data", p("d1.json"), "--paraphrases",
               p("d1.heldout-paraphrases.json"), "--config", p("cfg.json"), "--report", p("r2.json")},
              p("r1.json"), p("r2.json"));

    fs::remove_all(dir);
    if (mismatches.empty()) {
        detail = "gen-data, train-manifold, train-flow, train-diffusion, sample, eval all byte-identical";
        return true;
    }
    detail = "non-deterministic: ";
    for (const auto& m : mismatches) detail += m + " ";
    return false;
}

struct Criterion {
    int id;
    const char* name;
    bool (*run)(std::string&);
};

const Criterion kCriteria[] = {
    {1, "analytic gradients match finite differences for every network family", criterion_gradients},
    {2, "rotation exp/log round trips and the quarter-turn distance", criterion_geometry},
    {3, "mmd matches a brute-force oracle and the hand value", criterion_mmd},
    {4, "ode sampler reproduces zero, constant and exponential-growth fields", criterion_ode},
    {5, "loss identities and vp schedule invariants hold exactly", criterion_loss_identities},
    {6, "toy pipeline at defaults reaches the accuracy floor", criterion_toy_accuracy},
    {7, "generated samples sit closest to their own text's demos", criterion_mmd_separation},
    {8, "flow beats the strongest diffusion baseline on task accuracy", criterion_flow_vs_diffusion},
    {9, "paraphrase regularizer improves the held-out mmd ratio", criterion_regularizer},
    {10, "every command is byte-identical across reruns", criterion_determinism},
};

} // namespace

int main(int argc, char** argv) {
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : kCriteria) {
        if (!wanted.empty() && !wanted.count(c.id)) continue;
        std::string detail;
        bool ok;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            ok = false;
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
        std::fflush(stdout);
        failures += ok ? 0 : 1;
    }
    if (failures) std::printf("%d criterion(s) failed\n", failures);
    return failures ? 1 : 0;
}
