#include "mmfp/diffusion.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mmfp/adam.hpp"
#include "mmfp/log.hpp"

namespace mmfp {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kBetaClip = 0.999;
} // namespace

std::string schedule_name(ScheduleKind k) {
    switch (k) {
        case ScheduleKind::ve: return "ve";
        case ScheduleKind::vp_linear: return "vp_linear";
        default: return "vp_cosine";
    }
}

ScheduleKind schedule_from_name(const std::string& name) {
    if (name == "ve") return ScheduleKind::ve;
    if (name == "vp_linear") return ScheduleKind::vp_linear;
    if (name == "vp_cosine") return ScheduleKind::vp_cosine;
    throw std::invalid_argument("unknown schedule '" + name + "' (expected ve, vp_linear, vp_cosine)");
}

NoiseSchedule NoiseSchedule::ve(double sigma_min, double sigma_max, int n_steps) {
    if (!(0.0 < sigma_min && sigma_min < sigma_max))
        throw std::invalid_argument("NoiseSchedule::ve: need 0 < sigma_min < sigma_max");
    if (n_steps < 1) throw std::invalid_argument("NoiseSchedule::ve: n_steps must be >= 1");
    NoiseSchedule s;
    s.kind = ScheduleKind::ve;
    s.n_steps = n_steps;
    s.sigma_min = sigma_min;
    s.sigma_max = sigma_max;
    s.sigma.resize(n_steps + 1);
    double log_ratio = std::log(sigma_max / sigma_min);
    for (int t = 0; t <= n_steps; ++t)
        s.sigma[t] = sigma_min * std::exp(log_ratio * static_cast<double>(t) / n_steps);
    s.sigma[0] = sigma_min;       // exact endpoints by contract
    s.sigma[n_steps] = sigma_max;
    s.validate();
    return s;
}

NoiseSchedule NoiseSchedule::vp_linear(double beta_min, double beta_max, int n_steps) {
    if (!(0.0 < beta_min && beta_min < beta_max && beta_max < 1.0))
        throw std::invalid_argument("NoiseSchedule::vp_linear: need 0 < beta_min < beta_max < 1");
    if (n_steps < 1) throw std::invalid_argument("NoiseSchedule::vp_linear: n_steps must be >= 1");
    NoiseSchedule s;
    s.kind = ScheduleKind::vp_linear;
    s.n_steps = n_steps;
    s.beta_min = beta_min;
    s.beta_max = beta_max;
    s.beta.assign(n_steps + 1, 0.0);
    s.alpha_bar.assign(n_steps + 1, 1.0);
    for (int t = 1; t <= n_steps; ++t) {
        double b = n_steps == 1 ? beta_min
                                : beta_min + (beta_max - beta_min) * static_cast<double>(t - 1) / (n_steps - 1);
        s.beta[t] = b;
        s.alpha_bar[t] = s.alpha_bar[t - 1] * (1.0 - b);
    }
    s.validate();
    return s;
}

NoiseSchedule NoiseSchedule::vp_cosine(int n_steps) {
    if (n_steps < 1) throw std::invalid_argument("NoiseSchedule::vp_cosine: n_steps must be >= 1");
    NoiseSchedule s;
    s.kind = ScheduleKind::vp_cosine;
    s.n_steps = n_steps;
    s.beta.assign(n_steps + 1, 0.0);
    s.alpha_bar.assign(n_steps + 1, 1.0);
    const double off = 0.008;
    auto f = [&](double t) {
        double a = std::cos((t / n_steps + off) / (1.0 + off) * (kPi / 2.0));
        return a * a;
    };
    double f0 = f(0.0);
    for (int t = 1; t <= n_steps; ++t) {
        s.alpha_bar[t] = f(static_cast<double>(t)) / f0;
        double b = 1.0 - s.alpha_bar[t] / s.alpha_bar[t - 1];
        s.beta[t] = std::min(b, kBetaClip);
    }
    s.validate();
    return s;
}

void NoiseSchedule::validate() const {
    if (n_steps < 1) throw std::invalid_argument("NoiseSchedule: n_steps must be >= 1");
    if (kind == ScheduleKind::ve) {
        if (static_cast<int>(sigma.size()) != n_steps + 1)
            throw std::invalid_argument("NoiseSchedule: sigma table size mismatch");
        for (int t = 0; t < n_steps; ++t)
            if (!(sigma[t] < sigma[t + 1]))
                throw std::invalid_argument("NoiseSchedule: sigma must be strictly increasing");
    } else {
        if (static_cast<int>(alpha_bar.size()) != n_steps + 1 || static_cast<int>(beta.size()) != n_steps + 1)
            throw std::invalid_argument("NoiseSchedule: alpha_bar/beta table size mismatch");
        if (alpha_bar[0] != 1.0) throw std::invalid_argument("NoiseSchedule: alpha_bar[0] must be 1");
        for (int t = 0; t < n_steps; ++t)
            if (!(alpha_bar[t + 1] < alpha_bar[t]))
                throw std::invalid_argument("NoiseSchedule: alpha_bar must be strictly decreasing");
        for (int t = 1; t <= n_steps; ++t)
            if (!(beta[t] > 0.0 && beta[t] < 1.0))
                throw std::invalid_argument("NoiseSchedule: beta must lie in (0,1)");
    }
}

std::vector<double> forward_noising(const std::vector<double>& z1, int t, const NoiseSchedule& sched,
                                    const std::vector<double>& eps) {
    if (t < 0 || t > sched.n_steps)
        throw std::out_of_range("forward_noising: t " + std::to_string(t) + " outside [0, " +
                                std::to_string(sched.n_steps) + "]");
    if (z1.size() != eps.size()) throw std::invalid_argument("forward_noising: z1/eps size mismatch");
    std::vector<double> zt(z1.size());
    if (sched.is_vp()) {
        double ab = sched.alpha_bar[static_cast<std::size_t>(t)];
        double sa = std::sqrt(ab);
        double sn = std::sqrt(1.0 - ab);
        for (std::size_t d = 0; d < z1.size(); ++d) zt[d] = sa * z1[d] + sn * eps[d];
    } else {
        double sg = sched.sigma[static_cast<std::size_t>(t)];
        for (std::size_t d = 0; d < z1.size(); ++d) zt[d] = z1[d] + sg * eps[d];
    }
    return zt;
}

namespace {

std::vector<double> score_input(double t_norm, const std::vector<double>& zt, const std::vector<double>& tau) {
    std::vector<double> u;
    u.reserve(1 + zt.size() + tau.size());
    u.push_back(t_norm);
    u.insert(u.end(), zt.begin(), zt.end());
    u.insert(u.end(), tau.begin(), tau.end());
    return u;
}

std::vector<DiffusionDraw> make_draws(const std::vector<FlowItem>& items, const NoiseSchedule& sched,
                                      Rng& rng) {
    std::vector<DiffusionDraw> draws(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        draws[i].t = 1 + rng.uniform_int(sched.n_steps);
        draws[i].eps = rng.normal_vec(items[i].z.size());
    }
    return draws;
}

} // namespace

double denoising_loss(const Mlp& score, const Mlp& head, const std::vector<FlowItem>& items,
                      const NoiseSchedule& sched, const std::vector<DiffusionDraw>& draws) {
    if (items.empty()) throw std::invalid_argument("denoising_loss: empty batch");
    if (draws.size() != items.size()) throw std::invalid_argument("denoising_loss: draws/items size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto tau = head.forward(items[i].c);
        auto zt = forward_noising(items[i].z, draws[i].t, sched, draws[i].eps);
        auto pred = score.forward(score_input(static_cast<double>(draws[i].t) / sched.n_steps, zt, tau));
        for (std::size_t d = 0; d < pred.size(); ++d) {
            double r = pred[d] - draws[i].eps[d];
            acc += r * r;
        }
    }
    return acc / static_cast<double>(items.size());
}

double denoising_loss(const Mlp& score, const Mlp& head, const std::vector<FlowItem>& items,
                      const NoiseSchedule& sched, Rng& rng) {
    auto draws = make_draws(items, sched, rng);
    return denoising_loss(score, head, items, sched, draws);
}

double denoising_loss_grad(const Mlp& score, const Mlp& head, const std::vector<FlowItem>& items,
                           const NoiseSchedule& sched, const std::vector<DiffusionDraw>& draws,
                           std::vector<double>& score_grad, std::vector<double>& head_grad) {
    if (items.empty()) throw std::invalid_argument("denoising_loss_grad: empty batch");
    if (draws.size() != items.size()) throw std::invalid_argument("denoising_loss_grad: draws/items size mismatch");
    double nb = static_cast<double>(items.size());
    std::size_t m = items.front().z.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        Mlp::Tape th, ts;
        auto tau = head.forward(items[i].c, th);
        auto zt = forward_noising(items[i].z, draws[i].t, sched, draws[i].eps);
        auto pred = score.forward(score_input(static_cast<double>(draws[i].t) / sched.n_steps, zt, tau), ts);
        std::vector<double> dp(pred.size());
        for (std::size_t d = 0; d < pred.size(); ++d) {
            double r = pred[d] - draws[i].eps[d];
            acc += r * r;
            dp[d] = 2.0 * r / nb;
        }
        auto du = score.backward(ts, dp, score_grad);
        std::vector<double> dtau(du.begin() + 1 + static_cast<std::ptrdiff_t>(m), du.end());
        head.backward(th, dtau, head_grad);
    }
    return acc / nb;
}

void DiffusionTrainConfig::validate() const {
    if (epochs < 0 || batch_size < 1) throw std::invalid_argument("DiffusionTrainConfig: bad epochs/batch_size");
    if (!(lr > 0.0)) throw std::invalid_argument("DiffusionTrainConfig: lr must be positive");
    if (p < 1) throw std::invalid_argument("DiffusionTrainConfig: p must be >= 1");
}

DiffusionTrainResult train_latent_diffusion(const std::vector<FlowItem>& items, int m,
                                            const NoiseSchedule& sched, const DiffusionTrainConfig& cfg) {
    cfg.validate();
    sched.validate();
    if (items.empty()) throw std::invalid_argument("train_latent_diffusion: no latent-task pairs");
    for (const auto& item : items)
        if (static_cast<int>(item.z.size()) != m)
            throw std::invalid_argument("train_latent_diffusion: latent size does not match m");

    DiffusionTrainResult result;
    result.score = Mlp(MlpSpec{1 + m + cfg.p, cfg.score_hidden, m});
    result.head = Mlp(MlpSpec{kTaskVectorDim, cfg.head_hidden, cfg.p});
    Rng init_score = Rng::derive(cfg.seed, 0);
    Rng init_head = Rng::derive(cfg.seed, 1);
    Rng shuffle_rng = Rng::derive(cfg.seed, 2);
    Rng draw_rng = Rng::derive(cfg.seed, 3);
    result.score.init(init_score);
    result.head.init(init_head);

    Rng eval_rng = Rng::derive(cfg.seed, 4);
    auto eval_draws = make_draws(items, sched, eval_rng);
    result.initial_loss = denoising_loss(result.score, result.head, items, sched, eval_draws);

    AdamConfig acfg;
    acfg.lr = cfg.lr;
    Adam opt_score(result.score.params().size(), acfg);
    Adam opt_head(result.head.params().size(), acfg);
    std::vector<double> score_grad(result.score.params().size());
    std::vector<double> head_grad(result.head.params().size());

    int n = static_cast<int>(items.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    int last_finite = -1;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double epoch_sum = 0.0;
        int steps = 0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            int end = std::min(start + cfg.batch_size, n);
            std::vector<FlowItem> batch;
            batch.reserve(static_cast<std::size_t>(end - start));
            for (int idx = start; idx < end; ++idx) batch.push_back(items[static_cast<std::size_t>(order[idx])]);
            auto draws = make_draws(batch, sched, draw_rng);
            std::fill(score_grad.begin(), score_grad.end(), 0.0);
            std::fill(head_grad.begin(), head_grad.end(), 0.0);
            double loss = denoising_loss_grad(result.score, result.head, batch, sched, draws, score_grad, head_grad);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_latent_diffusion: non-finite loss at epoch " +
                                         std::to_string(epoch) + "; last finite epoch " + std::to_string(last_finite));
            opt_score.step(result.score.params(), score_grad);
            opt_head.step(result.head.params(), head_grad);
            epoch_sum += loss;
            ++steps;
        }
        result.loss_log.push_back(epoch_sum / steps);
        last_finite = epoch;
        if ((epoch + 1) % 200 == 0 || epoch + 1 == cfg.epochs)
            log_info("train_latent_diffusion epoch " + std::to_string(epoch + 1) + "/" + std::to_string(cfg.epochs) +
                     " loss=" + std::to_string(result.loss_log.back()));
        else
            log_debug("train_latent_diffusion epoch " + std::to_string(epoch + 1) + " loss=" +
                      std::to_string(result.loss_log.back()));
    }

    result.final_loss = denoising_loss(result.score, result.head, items, sched, eval_draws);
    return result;
}

std::vector<double> sample_diffusion(const Mlp& score, const std::vector<double>& tau,
                                     const NoiseSchedule& sched, int m, Rng& rng) {
    sched.validate();
    auto check_finite = [](const std::vector<double>& z, int t) {
        for (double v : z)
            if (!std::isfinite(v))
                throw std::runtime_error("sample_diffusion: non-finite state at step " + std::to_string(t));
    };

    std::vector<double> z = rng.normal_vec(static_cast<std::size_t>(m));
    if (sched.is_vp()) {
        for (int t = sched.n_steps; t >= 1; --t) {
            double ab_t = sched.alpha_bar[static_cast<std::size_t>(t)];
            double ab_prev = sched.alpha_bar[static_cast<std::size_t>(t - 1)];
            double beta = sched.beta[static_cast<std::size_t>(t)];
            double alpha = 1.0 - beta;
            auto eps = score.forward(score_input(static_cast<double>(t) / sched.n_steps, z, tau));
            double coef = beta / std::sqrt(1.0 - ab_t);
            double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
            double var = beta * (1.0 - ab_prev) / (1.0 - ab_t);
            double sd = t > 1 ? std::sqrt(var) : 0.0;
            for (int d = 0; d < m; ++d) {
                double mean = inv_sqrt_alpha * (z[static_cast<std::size_t>(d)] - coef * eps[static_cast<std::size_t>(d)]);
                double noise = t > 1 ? rng.normal() : 0.0;
                z[static_cast<std::size_t>(d)] = mean + sd * noise;
            }
            check_finite(z, t);
        }
    } else {
        for (double& v : z) v *= sched.sigma.back();
        for (int t = sched.n_steps; t >= 1; --t) {
            double s_t = sched.sigma[static_cast<std::size_t>(t)];
            double s_prev = sched.sigma[static_cast<std::size_t>(t - 1)];
            double dv = s_t * s_t - s_prev * s_prev;
            auto eps = score.forward(score_input(static_cast<double>(t) / sched.n_steps, z, tau));
            double sd = t > 1 ? std::sqrt(s_prev * s_prev * dv / (s_t * s_t)) : 0.0;
            for (int d = 0; d < m; ++d) {
                double mean = z[static_cast<std::size_t>(d)] - dv / s_t * eps[static_cast<std::size_t>(d)];
                double noise = t > 1 ? rng.normal() : 0.0;
                z[static_cast<std::size_t>(d)] = mean + sd * noise;
            }
            check_finite(z, t);
        }
    }
    return z;
}

} // namespace mmfp
