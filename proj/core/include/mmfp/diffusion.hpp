#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mmfp/flow.hpp"
#include "mmfp/mlp.hpp"
#include "mmfp/rng.hpp"

namespace mmfp {

enum class ScheduleKind { ve, vp_linear, vp_cosine };

std::string schedule_name(ScheduleKind k);
ScheduleKind schedule_from_name(const std::string& name);

// Discrete noise schedule over n_steps. VP kinds expose alpha_bar with
// alpha_bar[0] = 1.0 exactly and strictly decreasing entries; VE exposes
// sigma, geometric between sigma_min and sigma_max with exact endpoints.
// beta is clipped to 0.999 so the ancestral update never divides by zero.
struct NoiseSchedule {
    ScheduleKind kind = ScheduleKind::vp_linear;
    int n_steps = 1000;
    double beta_min = 1e-4, beta_max = 0.02; // vp_linear
    double sigma_min = 0.01, sigma_max = 10.0; // ve
    std::vector<double> alpha_bar; // size n_steps + 1 (vp kinds)
    std::vector<double> beta;      // size n_steps + 1, beta[0] = 0 (vp kinds)
    std::vector<double> sigma;     // size n_steps + 1 (ve)

    static NoiseSchedule ve(double sigma_min, double sigma_max, int n_steps);
    static NoiseSchedule vp_linear(double beta_min, double beta_max, int n_steps);
    static NoiseSchedule vp_cosine(int n_steps);

    bool is_vp() const { return kind != ScheduleKind::ve; }
    void validate() const;
};

// VP: z_t = sqrt(alpha_bar_t) z1 + sqrt(1 - alpha_bar_t) eps.
// VE: z_t = z1 + sigma_t eps. Requires 0 <= t <= n_steps.
std::vector<double> forward_noising(const std::vector<double>& z1, int t, const NoiseSchedule& sched,
                                    const std::vector<double>& eps);

struct DiffusionDraw {
    int t = 1;
    std::vector<double> eps;
};

// mean_i || eps_hat(t_i/N, z_t_i, h(c_i)) - eps_i ||^2 over frozen draws.
double denoising_loss(const Mlp& score, const Mlp& head, const std::vector<FlowItem>& items,
                      const NoiseSchedule& sched, const std::vector<DiffusionDraw>& draws);
// Draws t uniform on {1..N} and eps ~ N(0,I) per item.
double denoising_loss(const Mlp& score, const Mlp& head, const std::vector<FlowItem>& items,
                      const NoiseSchedule& sched, Rng& rng);

double denoising_loss_grad(const Mlp& score, const Mlp& head, const std::vector<FlowItem>& items,
                           const NoiseSchedule& sched, const std::vector<DiffusionDraw>& draws,
                           std::vector<double>& score_grad, std::vector<double>& head_grad);

struct DiffusionTrainConfig {
    int epochs = 2000;
    int batch_size = 10;
    double lr = 1e-3;
    std::uint64_t seed = 0;
    std::vector<int> score_hidden{128, 128};
    std::vector<int> head_hidden{256, 64};
    int p = 3;

    void validate() const;
};

struct DiffusionTrainResult {
    Mlp score; // eps predictor, input layout (t/N, z_t, tau)
    Mlp head;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    std::vector<double> loss_log;
};

DiffusionTrainResult train_latent_diffusion(const std::vector<FlowItem>& items, int m,
                                            const NoiseSchedule& sched, const DiffusionTrainConfig& cfg);

// Ancestral sampling from t = n_steps down to 0. rng supplies the initial
// state and the per-step noise.
std::vector<double> sample_diffusion(const Mlp& score, const std::vector<double>& tau,
                                     const NoiseSchedule& sched, int m, Rng& rng);

} // namespace mmfp
