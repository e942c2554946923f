#include "mmfp/flow.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "mmfp/adam.hpp"
#include "mmfp/log.hpp"

namespace mmfp {

std::vector<FlowItem> make_latent_pairs(const MotionDataset& ds, const MotionManifold& mf,
                                        const TextEncoder& enc, const ParaphraseMap& paras) {
    std::map<std::string, std::vector<double>> cache;
    auto encode_cached = [&](const std::string& text) -> const std::vector<double>& {
        auto it = cache.find(text);
        if (it == cache.end()) it = cache.emplace(text, enc.encode(text)).first;
        return it->second;
    };
    std::vector<FlowItem> items;
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        auto z = mf.encode(ds.norm.normalize(ds.trajectories[i]));
        for (const auto& a : ds.annotations[i]) {
            FlowItem item;
            item.z = z;
            item.c = encode_cached(a.text);
            auto pit = paras.find(a.text);
            if (pit != paras.end())
                for (const auto& v : pit->second.variants) item.paraphrases.push_back(encode_cached(v));
            items.push_back(std::move(item));
        }
    }
    return items;
}

void FlowTrainConfig::validate() const {
    if (gamma < 0.0) throw std::invalid_argument("FlowTrainConfig: gamma must be >= 0");
    if (epochs < 0 || batch_size < 1) throw std::invalid_argument("FlowTrainConfig: bad epochs/batch_size");
    if (!(lr > 0.0)) throw std::invalid_argument("FlowTrainConfig: lr must be positive");
    if (p < 1) throw std::invalid_argument("FlowTrainConfig: p must be >= 1");
}

void SamplerConfig::validate() const {
    if (steps < 1) throw std::invalid_argument("SamplerConfig: steps must be >= 1");
}

FmTarget fm_target_sample(const std::vector<double>& z0, const std::vector<double>& z1, double s) {
    if (z0.size() != z1.size()) throw std::invalid_argument("fm_target_sample: dimension mismatch");
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("fm_target_sample: s must lie in [0,1]");
    FmTarget t;
    t.z_s.resize(z0.size());
    t.target.resize(z0.size());
    for (std::size_t k = 0; k < z0.size(); ++k) {
        t.z_s[k] = (1.0 - s) * z0[k] + s * z1[k];
        t.target[k] = z1[k] - z0[k];
    }
    return t;
}

namespace {

int paraphrase_count(const FlowItem& item, int k) {
    int avail = static_cast<int>(item.paraphrases.size());
    if (k < 0 || k >= avail) {
        if (k > avail) log_debug("regularized_fm_loss: requested " + std::to_string(k) + " paraphrases, only " +
                                 std::to_string(avail) + " available; using all");
        return avail;
    }
    return k;
}

std::vector<double> field_input(double s, const std::vector<double>& z_s, const std::vector<double>& tau) {
    std::vector<double> u;
    u.reserve(1 + z_s.size() + tau.size());
    u.push_back(s);
    u.insert(u.end(), z_s.begin(), z_s.end());
    u.insert(u.end(), tau.begin(), tau.end());
    return u;
}

std::vector<FmDraw> make_draws(const std::vector<FlowItem>& items, Rng& rng) {
    std::vector<FmDraw> draws(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        draws[i].s = rng.uniform();
        draws[i].z0 = rng.normal_vec(items[i].z.size());
    }
    return draws;
}

} // namespace

double regularized_fm_loss(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items, double gamma,
                           int k, const std::vector<FmDraw>& draws) {
    if (items.empty()) throw std::invalid_argument("regularized_fm_loss: empty batch");
    if (draws.size() != items.size()) throw std::invalid_argument("regularized_fm_loss: draws/items size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        auto tau = head.forward(item.c);
        auto t = fm_target_sample(draws[i].z0, item.z, draws[i].s);
        auto v = field.forward(field_input(draws[i].s, t.z_s, tau));
        double fm = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) {
            double r = v[d] - t.target[d];
            fm += r * r;
        }
        acc += fm;
        if (gamma > 0.0) {
            int kk = paraphrase_count(item, k);
            if (kk > 0) {
                double reg = 0.0;
                for (int j = 0; j < kk; ++j) {
                    auto tau_k = head.forward(item.paraphrases[static_cast<std::size_t>(j)]);
                    for (std::size_t d = 0; d < tau.size(); ++d) {
                        double r = tau[d] - tau_k[d];
                        reg += r * r;
                    }
                }
                acc += gamma * (reg / kk);
            }
        }
    }
    return acc / static_cast<double>(items.size());
}

double regularized_fm_loss(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items, double gamma,
                           int k, Rng& rng) {
    auto draws = make_draws(items, rng);
    return regularized_fm_loss(field, head, items, gamma, k, draws);
}

double conditional_fm_loss(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items, Rng& rng) {
    return regularized_fm_loss(field, head, items, 0.0, 0, rng);
}

double regularized_fm_loss_grad(const Mlp& field, const Mlp& head, const std::vector<FlowItem>& items,
                                double gamma, int k, const std::vector<FmDraw>& draws,
                                std::vector<double>& field_grad, std::vector<double>& head_grad) {
    if (items.empty()) throw std::invalid_argument("regularized_fm_loss_grad: empty batch");
    if (draws.size() != items.size())
        throw std::invalid_argument("regularized_fm_loss_grad: draws/items size mismatch");
    double nb = static_cast<double>(items.size());
    std::size_t m = items.front().z.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        Mlp::Tape th, tf;
        auto tau = head.forward(item.c, th);
        auto t = fm_target_sample(draws[i].z0, item.z, draws[i].s);
        auto v = field.forward(field_input(draws[i].s, t.z_s, tau), tf);
        std::vector<double> dv(v.size());
        double fm = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) {
            double r = v[d] - t.target[d];
            fm += r * r;
            dv[d] = 2.0 * r / nb;
        }
        acc += fm;
        auto du = field.backward(tf, dv, field_grad);
        std::vector<double> dtau(du.begin() + 1 + static_cast<std::ptrdiff_t>(m), du.end());
        if (gamma > 0.0) {
            int kk = paraphrase_count(item, k);
            if (kk > 0) {
                double reg = 0.0;
                double w = gamma / (nb * kk);
                for (int j = 0; j < kk; ++j) {
                    Mlp::Tape tk;
                    auto tau_k = head.forward(item.paraphrases[static_cast<std::size_t>(j)], tk);
                    std::vector<double> dtau_k(tau.size());
                    for (std::size_t d = 0; d < tau.size(); ++d) {
                        double r = tau[d] - tau_k[d];
                        reg += r * r;
                        dtau[d] += w * 2.0 * r;
                        dtau_k[d] = -w * 2.0 * r;
                    }
                    head.backward(tk, dtau_k, head_grad);
                }
                acc += gamma * (reg / kk);
            }
        }
        head.backward(th, dtau, head_grad);
    }
    return acc / nb;
}

FlowTrainResult train_latent_flow(const std::vector<FlowItem>& items, int m, const FlowTrainConfig& cfg) {
    cfg.validate();
    if (items.empty()) throw std::invalid_argument("train_latent_flow: no latent-task pairs");
    for (const auto& item : items)
        if (static_cast<int>(item.z.size()) != m)
            throw std::invalid_argument("train_latent_flow: latent size does not match m");

    if (cfg.k_paraphrases > 0) {
        int max_avail = 0;
        for (const auto& item : items) max_avail = std::max(max_avail, static_cast<int>(item.paraphrases.size()));
        if (cfg.k_paraphrases > max_avail)
            log_info("train_latent_flow: k_paraphrases " + std::to_string(cfg.k_paraphrases) +
                     " exceeds available paraphrases (max " + std::to_string(max_avail) + "); using all");
    }

    FlowTrainResult result;
    result.field = Mlp(MlpSpec{1 + m + cfg.p, cfg.field_hidden, m});
    result.head = Mlp(MlpSpec{kTaskVectorDim, cfg.head_hidden, cfg.p});
    Rng init_field = Rng::derive(cfg.seed, 0);
    Rng init_head = Rng::derive(cfg.seed, 1);
    Rng shuffle_rng = Rng::derive(cfg.seed, 2);
    Rng draw_rng = Rng::derive(cfg.seed, 3);
    result.field.init(init_field);
    result.head.init(init_head);

    Rng eval_rng = Rng::derive(cfg.seed, 4);
    auto eval_draws = make_draws(items, eval_rng);
    result.initial_loss = regularized_fm_loss(result.field, result.head, items, cfg.gamma, cfg.k_paraphrases,
                                              eval_draws);

    AdamConfig acfg;
    acfg.lr = cfg.lr;
    Adam opt_field(result.field.params().size(), acfg);
    Adam opt_head(result.head.params().size(), acfg);
    std::vector<double> field_grad(result.field.params().size());
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
            auto draws = make_draws(batch, draw_rng);
            std::fill(field_grad.begin(), field_grad.end(), 0.0);
            std::fill(head_grad.begin(), head_grad.end(), 0.0);
            double loss = regularized_fm_loss_grad(result.field, result.head, batch, cfg.gamma, cfg.k_paraphrases,
                                                   draws, field_grad, head_grad);
            if (!std::isfinite(loss))
                throw std::runtime_error("train_latent_flow: non-finite loss at epoch " + std::to_string(epoch) +
                                         "; last finite epoch " + std::to_string(last_finite));
            opt_field.step(result.field.params(), field_grad);
            opt_head.step(result.head.params(), head_grad);
            epoch_sum += loss;
            ++steps;
        }
        result.loss_log.push_back(epoch_sum / steps);
        last_finite = epoch;
        if ((epoch + 1) % 200 == 0 || epoch + 1 == cfg.epochs)
            log_info("train_latent_flow epoch " + std::to_string(epoch + 1) + "/" + std::to_string(cfg.epochs) +
                     " loss=" + std::to_string(result.loss_log.back()));
        else
            log_debug("train_latent_flow epoch " + std::to_string(epoch + 1) + " loss=" +
                      std::to_string(result.loss_log.back()));
    }

    result.final_loss = regularized_fm_loss(result.field, result.head, items, cfg.gamma, cfg.k_paraphrases,
                                            eval_draws);
    return result;
}

namespace {

std::vector<double> eval_field(const Mlp& field, double s, const std::vector<double>& z,
                               const std::vector<double>& tau) {
    return field.forward(field_input(s, z, tau));
}

} // namespace

std::vector<double> sample_latent(const Mlp& field, const std::vector<double>& tau, const SamplerConfig& cfg,
                                  const std::vector<double>& z0) {
    cfg.validate();
    std::vector<double> z = z0;
    std::size_t m = z.size();
    double h = 1.0 / cfg.steps;
    for (int k = 0; k < cfg.steps; ++k) {
        double s = static_cast<double>(k) * h;
        if (cfg.solver == OdeSolver::euler) {
            auto v = eval_field(field, s, z, tau);
            for (std::size_t d = 0; d < m; ++d) z[d] += h * v[d];
        } else {
            auto k1 = eval_field(field, s, z, tau);
            std::vector<double> zt(m);
            for (std::size_t d = 0; d < m; ++d) zt[d] = z[d] + 0.5 * h * k1[d];
            auto k2 = eval_field(field, s + 0.5 * h, zt, tau);
            for (std::size_t d = 0; d < m; ++d) zt[d] = z[d] + 0.5 * h * k2[d];
            auto k3 = eval_field(field, s + 0.5 * h, zt, tau);
            for (std::size_t d = 0; d < m; ++d) zt[d] = z[d] + h * k3[d];
            auto k4 = eval_field(field, s + h, zt, tau);
            for (std::size_t d = 0; d < m; ++d) z[d] += h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
        }
        for (double v : z)
            if (!std::isfinite(v))
                throw std::runtime_error("sample_latent: non-finite state at step " + std::to_string(k));
    }
    return z;
}

std::vector<double> sample_latent(const Mlp& field, const std::vector<double>& tau, const SamplerConfig& cfg,
                                  int m, Rng& rng) {
    return sample_latent(field, tau, cfg, rng.normal_vec(static_cast<std::size_t>(m)));
}

} // namespace mmfp
