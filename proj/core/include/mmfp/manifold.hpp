#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mmfp/dataset.hpp"
#include "mmfp/mlp.hpp"
#include "mmfp/trajectory.hpp"

namespace mmfp {

struct ManifoldConfig {
    int m = 3;
    double eta = 1e-2;   // latent norm weight
    double delta = 1e-1; // smoothness weight
    double mixup_low = -0.4, mixup_high = 1.4;
    std::vector<int> encoder_hidden{256, 128};
    std::vector<int> decoder_hidden{128, 256};
    int epochs = 2000;
    int batch_size = 10;
    double lr = 1e-3;
    double lambda_rot = 1.0; // rotation weight in the SE(3) distance
    std::uint64_t seed = 0;
    bool identity = false; // flatten/unflatten adapter, no learned nets

    void validate() const;
};

// Encoder g and decoder f over normalized trajectories. All encode and
// decode calls here stay in normalized coordinates; callers denormalize
// at the output boundary.
class MotionManifold {
  public:
    static MotionManifold make(Space space, int point_dim, int T, const ManifoldConfig& cfg);
    static MotionManifold identity_adapter(Space space, int point_dim, int T, double lambda_rot);

    Space space() const { return space_; }
    int point_dim() const { return point_dim_; }
    int T() const { return T_; }
    int m() const { return m_; }
    bool is_identity() const { return identity_; }
    double lambda_rot() const { return lambda_rot_; }

    Mlp& encoder() { return encoder_; }
    const Mlp& encoder() const { return encoder_; }
    Mlp& decoder() { return decoder_; }
    const Mlp& decoder() const { return decoder_; }

    std::vector<double> encode(const Trajectory& x_norm) const;
    Trajectory decode(const std::vector<double>& z) const;
    std::vector<double> decode_flat(const std::vector<double>& z) const;

  private:
    Space space_ = Space::euclidean;
    int point_dim_ = 0, T_ = 0, m_ = 0;
    bool identity_ = false;
    double lambda_rot_ = 1.0;
    Mlp encoder_, decoder_;
};

// Mean over the batch of d^2(x, f(g(x))), normalized coordinates.
double reconstruction_loss(const MotionManifold& mf, const std::vector<Trajectory>& batch_norm);

std::vector<double> latent_mixup(const std::vector<double>& zi, const std::vector<double>& zj, double alpha);

// Mean over samples of sum_t ||f^{t+1}(z) - f^t(z)||^2 on the decoded
// trajectories (SE(3) differences taken on the flat local coordinates).
double smoothness_energy(const MotionManifold& mf, const std::vector<std::vector<double>>& zs);

struct MixupDraw {
    int i = 0, j = 0;
    double alpha = 0.0;
};

// Full training objective on frozen draws:
//   mean_batch[ d^2(x, f(g(x))) + eta*||g(x)||^2 ] + delta * mean_mixup[ smoothness ]
// Exposed separately from the trainer so gradients can be checked by
// finite differences on the exact expression the trainer minimizes.
double manifold_objective(const MotionManifold& mf, const std::vector<Trajectory>& data_norm,
                          const std::vector<int>& batch, const std::vector<MixupDraw>& mixup, double eta,
                          double delta);

// Same value; accumulates parameter gradients. Component outputs are the
// unweighted means (reconstruction, latent norm, smoothness).
double manifold_objective_grad(const MotionManifold& mf, const std::vector<Trajectory>& data_norm,
                               const std::vector<int>& batch, const std::vector<MixupDraw>& mixup, double eta,
                               double delta, std::vector<double>& enc_grad, std::vector<double>& dec_grad,
                               std::array<double, 3>* components);

struct ManifoldTrainResult {
    MotionManifold manifold;
    // Per epoch: mean reconstruction, latent norm, smoothness over steps.
    std::vector<std::array<double, 3>> loss_log;
};

ManifoldTrainResult train_manifold(const MotionDataset& ds, const ManifoldConfig& cfg);

} // namespace mmfp
