#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mmfp/rng.hpp"

namespace mmfp {

// Fully connected net: ELU(alpha=1) on hidden layers, affine output.
struct MlpSpec {
    int in_dim = 0;
    std::vector<int> hidden;
    int out_dim = 0;

    // [in_dim, hidden..., out_dim]
    std::vector<int> layer_sizes() const;
    std::size_t param_count() const;
    void validate() const; // throws std::invalid_argument on non-positive dims
};

// Parameters live in one flat vector. Layout, in layer order:
// W_0 row-major (n_out x n_in), b_0, W_1, b_1, ...
// The flat layout is what checkpoints store and what Adam steps over.
class Mlp {
  public:
    Mlp() = default;
    explicit Mlp(MlpSpec spec);

    // Uniform init on [-a, a] with a = sqrt(1 / fan_in); biases zero.
    void init(Rng& rng);

    const MlpSpec& spec() const { return spec_; }
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    std::vector<double> forward(const std::vector<double>& x) const;

    // Activation record for one forward pass.
    struct Tape {
        std::vector<std::vector<double>> inputs; // inputs[l] = input to layer l; inputs[0] = x
        std::vector<std::vector<double>> pre;    // pre[l] = W_l inputs[l] + b_l (hidden layers only keep it for ELU')
    };
    std::vector<double> forward(const std::vector<double>& x, Tape& tape) const;

    // Accumulates dL/dparams into grad (flat layout, same size as params)
    // and returns dL/dx. grad must be pre-sized; it is added to, not reset.
    std::vector<double> backward(const Tape& tape, const std::vector<double>& dout,
                                 std::vector<double>& grad) const;

  private:
    MlpSpec spec_;
    std::vector<double> params_;
};

inline double elu(double u) { return u > 0.0 ? u : std::exp(u) - 1.0; }
inline double elu_deriv(double u) { return u > 0.0 ? 1.0 : std::exp(u); }

} // namespace mmfp
