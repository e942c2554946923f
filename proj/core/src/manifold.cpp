#include "mmfp/manifold.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mmfp/adam.hpp"
#include "mmfp/log.hpp"

namespace mmfp {

void ManifoldConfig::validate() const {
    if (m < 1) throw std::invalid_argument("ManifoldConfig: m must be >= 1");
    if (eta < 0.0 || delta < 0.0) throw std::invalid_argument("ManifoldConfig: eta and delta must be >= 0");
    if (!(mixup_low < mixup_high)) throw std::invalid_argument("ManifoldConfig: mixup_low must be < mixup_high");
    if (epochs < 0 || batch_size < 1) throw std::invalid_argument("ManifoldConfig: bad epochs/batch_size");
    if (!(lr > 0.0)) throw std::invalid_argument("ManifoldConfig: lr must be positive");
    if (!(lambda_rot >= 0.0)) throw std::invalid_argument("ManifoldConfig: lambda_rot must be >= 0");
}

MotionManifold MotionManifold::make(Space space, int point_dim, int T, const ManifoldConfig& cfg) {
    cfg.validate();
    MotionManifold mf;
    mf.space_ = space;
    mf.point_dim_ = point_dim;
    mf.T_ = T;
    mf.lambda_rot_ = cfg.lambda_rot;
    if (cfg.identity) {
        mf.identity_ = true;
        mf.m_ = T * point_dim;
        return mf;
    }
    mf.m_ = cfg.m;
    int dim = T * point_dim;
    mf.encoder_ = Mlp(MlpSpec{dim, cfg.encoder_hidden, cfg.m});
    mf.decoder_ = Mlp(MlpSpec{cfg.m, cfg.decoder_hidden, dim});
    return mf;
}

MotionManifold MotionManifold::identity_adapter(Space space, int point_dim, int T, double lambda_rot) {
    ManifoldConfig cfg;
    cfg.identity = true;
    cfg.lambda_rot = lambda_rot;
    return make(space, point_dim, T, cfg);
}

std::vector<double> MotionManifold::encode(const Trajectory& x_norm) const {
    auto flat = flatten(x_norm);
    if (identity_) return flat;
    return encoder_.forward(flat);
}

std::vector<double> MotionManifold::decode_flat(const std::vector<double>& z) const {
    if (identity_) {
        if (static_cast<int>(z.size()) != m_) throw std::invalid_argument("decode: latent size mismatch");
        return z;
    }
    return decoder_.forward(z);
}

Trajectory MotionManifold::decode(const std::vector<double>& z) const {
    return unflatten(decode_flat(z), space_, point_dim_, T_);
}

double reconstruction_loss(const MotionManifold& mf, const std::vector<Trajectory>& batch_norm) {
    if (batch_norm.empty()) throw std::invalid_argument("reconstruction_loss: empty batch");
    double acc = 0.0;
    for (const auto& x : batch_norm) acc += traj_dist_sq(x, mf.decode(mf.encode(x)), mf.lambda_rot());
    return acc / static_cast<double>(batch_norm.size());
}

std::vector<double> latent_mixup(const std::vector<double>& zi, const std::vector<double>& zj, double alpha) {
    if (zi.size() != zj.size()) throw std::invalid_argument("latent_mixup: dimension mismatch");
    std::vector<double> z(zi.size());
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = alpha * zi[k] + (1.0 - alpha) * zj[k];
    return z;
}

namespace {

// sum_t ||y_{t+1} - y_t||^2 on a flat trajectory; optional gradient out.
double smoothness_of_flat(const std::vector<double>& y, int T, int dim, std::vector<double>* dy, double w) {
    double acc = 0.0;
    for (int t = 0; t + 1 < T; ++t) {
        const double* a = &y[static_cast<std::size_t>(t) * dim];
        const double* b = &y[static_cast<std::size_t>(t + 1) * dim];
        for (int d = 0; d < dim; ++d) {
            double diff = b[d] - a[d];
            acc += diff * diff;
            if (dy) {
                (*dy)[static_cast<std::size_t>(t + 1) * dim + d] += w * 2.0 * diff;
                (*dy)[static_cast<std::size_t>(t) * dim + d] -= w * 2.0 * diff;
            }
        }
    }
    return acc;
}

} // namespace

double smoothness_energy(const MotionManifold& mf, const std::vector<std::vector<double>>& zs) {
    if (zs.empty()) throw std::invalid_argument("smoothness_energy: empty sample list");
    double acc = 0.0;
    for (const auto& z : zs) {
        auto y = mf.decode_flat(z);
        acc += smoothness_of_flat(y, mf.T(), mf.point_dim(), nullptr, 0.0);
    }
    return acc / static_cast<double>(zs.size());
}

double manifold_objective(const MotionManifold& mf, const std::vector<Trajectory>& data_norm,
                          const std::vector<int>& batch, const std::vector<MixupDraw>& mixup, double eta,
                          double delta) {
    if (batch.empty()) throw std::invalid_argument("manifold_objective: empty batch");
    double recon = 0.0, latent = 0.0;
    for (int idx : batch) {
        const auto& x = data_norm[static_cast<std::size_t>(idx)];
        auto z = mf.encode(x);
        recon += traj_dist_sq(x, mf.decode(z), mf.lambda_rot());
        double n2 = 0.0;
        for (double v : z) n2 += v * v;
        latent += n2;
    }
    double nb = static_cast<double>(batch.size());
    double total = recon / nb + eta * (latent / nb);
    if (!mixup.empty()) {
        std::vector<std::vector<double>> zs;
        zs.reserve(mixup.size());
        for (const auto& d : mixup)
            zs.push_back(latent_mixup(mf.encode(data_norm[static_cast<std::size_t>(d.i)]),
                                      mf.encode(data_norm[static_cast<std::size_t>(d.j)]), d.alpha));
        total += delta * smoothness_energy(mf, zs);
    }
    return total;
}

double manifold_objective_grad(const MotionManifold& mf, const std::vector<Trajectory>& data_norm,
                               const std::vector<int>& batch, const std::vector<MixupDraw>& mixup, double eta,
                               double delta, std::vector<double>& enc_grad, std::vector<double>& dec_grad,
                               std::array<double, 3>* components) {
    if (mf.is_identity()) throw std::invalid_argument("manifold_objective_grad: identity adapter has no parameters");
    if (batch.empty()) throw std::invalid_argument("manifold_objective_grad: empty batch");
    const Mlp& enc = mf.encoder();
    const Mlp& dec = mf.decoder();
    double nb = static_cast<double>(batch.size());

    double recon = 0.0, latent = 0.0, smooth = 0.0;
    for (int idx : batch) {
        const auto& x = data_norm[static_cast<std::size_t>(idx)];
        auto x_flat = flatten(x);
        Mlp::Tape te, td;
        auto z = enc.forward(x_flat, te);
        auto y_flat = dec.forward(z, td);
        auto y = unflatten(y_flat, mf.space(), mf.point_dim(), mf.T());
        recon += traj_dist_sq(x, y, mf.lambda_rot());
        auto dy = traj_dist_sq_grad_b(x, y, mf.lambda_rot());
        for (double& v : dy) v /= nb;
        auto dz = dec.backward(td, dy, dec_grad);
        for (std::size_t k = 0; k < z.size(); ++k) {
            latent += z[k] * z[k];
            dz[k] += eta * 2.0 * z[k] / nb;
        }
        enc.backward(te, dz, enc_grad);
    }

    if (!mixup.empty()) {
        double nm = static_cast<double>(mixup.size());
        for (const auto& d : mixup) {
            auto xi_flat = flatten(data_norm[static_cast<std::size_t>(d.i)]);
            auto xj_flat = flatten(data_norm[static_cast<std::size_t>(d.j)]);
            Mlp::Tape ti, tj, td;
            auto zi = enc.forward(xi_flat, ti);
            auto zj = enc.forward(xj_flat, tj);
            auto z = latent_mixup(zi, zj, d.alpha);
            auto y = dec.forward(z, td);
            std::vector<double> dy(y.size(), 0.0);
            smooth += smoothness_of_flat(y, mf.T(), mf.point_dim(), &dy, delta / nm);
            auto dz = dec.backward(td, dy, dec_grad);
            auto dzi = dz;
            for (double& v : dzi) v *= d.alpha;
            enc.backward(ti, dzi, enc_grad);
            for (double& v : dz) v *= (1.0 - d.alpha);
            enc.backward(tj, dz, enc_grad);
        }
        smooth /= nm;
    }

    if (components) *components = {recon / nb, latent / nb, smooth};
    return recon / nb + eta * (latent / nb) + delta * smooth;
}

ManifoldTrainResult train_manifold(const MotionDataset& ds, const ManifoldConfig& cfg) {
    cfg.validate();
    if (ds.trajectories.empty()) throw std::invalid_argument("train_manifold: empty dataset");

    MotionManifold mf = MotionManifold::make(ds.space, ds.point_dim, ds.T, cfg);
    if (mf.is_identity()) return {std::move(mf), {}};

    std::vector<Trajectory> data_norm;
    data_norm.reserve(ds.trajectories.size());
    for (const auto& x : ds.trajectories) data_norm.push_back(ds.norm.normalize(x));

    Rng init_enc = Rng::derive(cfg.seed, 0);
    Rng init_dec = Rng::derive(cfg.seed, 1);
    Rng shuffle_rng = Rng::derive(cfg.seed, 2);
    Rng mixup_rng = Rng::derive(cfg.seed, 3);
    mf.encoder().init(init_enc);
    mf.decoder().init(init_dec);

    AdamConfig acfg;
    acfg.lr = cfg.lr;
    Adam opt_enc(mf.encoder().params().size(), acfg);
    Adam opt_dec(mf.decoder().params().size(), acfg);

    int n = static_cast<int>(data_norm.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    ManifoldTrainResult result{std::move(mf), {}};
    MotionManifold& model = result.manifold;
    std::vector<double> enc_grad(model.encoder().params().size());
    std::vector<double> dec_grad(model.decoder().params().size());

    int last_finite = -1;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        std::array<double, 3> epoch_sum{0.0, 0.0, 0.0};
        int steps = 0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            int end = std::min(start + cfg.batch_size, n);
            std::vector<int> batch(order.begin() + start, order.begin() + end);
            std::vector<MixupDraw> mixup;
            if (cfg.delta > 0.0) {
                mixup.resize(static_cast<std::size_t>(cfg.batch_size));
                for (auto& d : mixup) {
                    d.i = mixup_rng.uniform_int(n);
                    d.j = mixup_rng.uniform_int(n);
                    d.alpha = mixup_rng.uniform(cfg.mixup_low, cfg.mixup_high);
                }
            }
            std::fill(enc_grad.begin(), enc_grad.end(), 0.0);
            std::fill(dec_grad.begin(), dec_grad.end(), 0.0);
            std::array<double, 3> comps{};
            double total = manifold_objective_grad(model, data_norm, batch, mixup, cfg.eta, cfg.delta, enc_grad,
                                                   dec_grad, &comps);
            if (!std::isfinite(total))
                throw std::runtime_error("train_manifold: non-finite loss at epoch " + std::to_string(epoch) +
                                         "; last finite epoch " + std::to_string(last_finite));
            opt_enc.step(model.encoder().params(), enc_grad);
            opt_dec.step(model.decoder().params(), dec_grad);
            for (int c = 0; c < 3; ++c) epoch_sum[c] += comps[c];
            ++steps;
        }
        std::array<double, 3> epoch_mean{epoch_sum[0] / steps, epoch_sum[1] / steps, epoch_sum[2] / steps};
        result.loss_log.push_back(epoch_mean);
        last_finite = epoch;
        if ((epoch + 1) % 200 == 0 || epoch + 1 == cfg.epochs)
            log_info("train_manifold epoch " + std::to_string(epoch + 1) + "/" + std::to_string(cfg.epochs) +
                     " recon=" + std::to_string(epoch_mean[0]) + " latent=" + std::to_string(epoch_mean[1]) +
                     " smooth=" + std::to_string(epoch_mean[2]));
        else
            log_debug("train_manifold epoch " + std::to_string(epoch + 1) + " recon=" + std::to_string(epoch_mean[0]) +
                      " latent=" + std::to_string(epoch_mean[1]) + " smooth=" + std::to_string(epoch_mean[2]));
    }
    return result;
}

} // namespace mmfp
