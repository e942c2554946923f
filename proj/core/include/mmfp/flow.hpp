#pragma once

#include <cstdint>
#include <vector>

#include "mmfp/dataset.hpp"
#include "mmfp/manifold.hpp"
#include "mmfp/mlp.hpp"
#include "mmfp/rng.hpp"
#include "mmfp/textenc.hpp"

namespace mmfp {

// One training example: latent point, task vector of its text, and the
// task vectors of that text's paraphrases (possibly none).
struct FlowItem {
    std::vector<double> z;
    std::vector<double> c;
    std::vector<std::vector<double>> paraphrases;
};

// Expands the many-to-many dataset: one item per (trajectory, annotation)
// pair; annotations sharing a trajectory share its latent point.
std::vector<FlowItem> make_latent_pairs(const MotionDataset& ds, const MotionManifold& mf,
                                        const TextEncoder& enc, const ParaphraseMap& paras);

struct FlowTrainConfig {
    double gamma = 0.1;     // paraphrase robustness weight
    int k_paraphrases = -1; // per-item paraphrases used per step; -1 = all
    int epochs = 2000;
    int batch_size = 10;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    std::vector<int> field_hidden{128, 128};
    std::vector<int> head_hidden{256, 64};
    int p = 3; // text embedding dimension

    void validate() const;
};

enum class OdeSolver { euler, rk4 };

struct SamplerConfig {
    int steps = 100;
    OdeSolver solver = OdeSolver::euler;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FmDraw {
    double s = 0.0;
    std::vector<double> z0;
};

struct FmTarget {
    std::vector<double> z_s;
    std::vector<double> target; // z1 - z0
};

// z_s = (1-s) z0 + s z1. Throws std::domain_error for s outside [0,1].
FmTarget fm_target_sample(const std::vector<double>& z0, const std::vector<double>& z1, double s);

// mean_i [ ||v(s_i, z_s_i, h(c_i)) - (z_i - z0_i)||^2
//          + gamma * mean_k ||h(c_i) - h(c_ik)||^2 ]
// draws holds one (s, z0) per item. k limits paraphrases per item, -1 = all.
double regularized_fm_loss(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items, double gamma,
                           int k, const std::vector<FmDraw>& draws);
// Same, drawing (s, z0) from rng in item order.
double regularized_fm_loss(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items, double gamma,
                           int k, Rng& rng);
// Plain conditional FM loss; bit-identical to gamma = 0 on the same draws.
double conditional_fm_loss(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items, Rng& rng);

double regularized_fm_loss_grad(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items,
                                double gamma, int k, const std::vector<FmDraw>& draws,
                                std::vector<double>& field_grad, std::vector<double>& head_grad);

struct FlowTrainResult {
    Mlp field; // v(s, z, tau), input layout (s, z, tau)
    Mlp head;  // h: 768 -> p
    double initial_loss = 0.0; // on frozen draws, before and after training
    double final_loss = 0.0;
    std::vector<double> loss_log; // mean loss per epoch
};

FlowTrainResult train_latent_flow(const std::vector<FlowItem>& items, int m, const FlowTrainConfig& cfg);

// Integrates dz/ds = v(s, z, tau) from s=0 to s=1 starting at z0.
std::vector<double> sample_latent(const Mlp& field, const std::vector<double>& tau, const SamplerConfig& cfg,
                                  const std::vector<double>& z0);
// Draws z0 ~ N(0, I_m) from rng first.
std::vector<double> sample_latent(const Mlp& field, const std::vector<double>& tau, const SamplerConfig& cfg,
                                  int m, Rng& rng);

} // namespace mmfp
