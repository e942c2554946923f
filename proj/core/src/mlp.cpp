#include "mmfp/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace mmfp {

std::vector<int> MlpSpec::layer_sizes() const {
    std::vector<int> s;
    s.reserve(hidden.size() + 2);
    s.push_back(in_dim);
    for (int h : hidden) s.push_back(h);
    s.push_back(out_dim);
    return s;
}

std::size_t MlpSpec::param_count() const {
    auto s = layer_sizes();
    std::size_t n = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l)
        n += static_cast<std::size_t>(s[l + 1]) * static_cast<std::size_t>(s[l]) + static_cast<std::size_t>(s[l + 1]);
    return n;
}

void MlpSpec::validate() const {
    if (in_dim <= 0) throw std::invalid_argument("MlpSpec: in_dim must be positive");
    if (out_dim <= 0) throw std::invalid_argument("MlpSpec: out_dim must be positive");
    for (int h : hidden)
        if (h <= 0) throw std::invalid_argument("MlpSpec: hidden dims must be positive");
}

Mlp::Mlp(MlpSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    params_.assign(spec_.param_count(), 0.0);
}

void Mlp::init(Rng& rng) {
    auto s = spec_.layer_sizes();
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < s.size(); ++l) {
        auto n_out = static_cast<std::size_t>(s[l + 1]);
        auto n_in = static_cast<std::size_t>(s[l]);
        double bound = std::sqrt(1.0 / static_cast<double>(n_in));
        for (std::size_t i = 0; i < n_out * n_in; ++i) params_[off + i] = rng.uniform(-bound, bound);
        off += n_out * n_in;
        for (std::size_t i = 0; i < n_out; ++i) params_[off + i] = 0.0;
        off += n_out;
    }
}

std::vector<double> Mlp::forward(const std::vector<double>& x) const {
    Tape tape;
    return forward(x, tape);
}

std::vector<double> Mlp::forward(const std::vector<double>& x, Tape& tape) const {
    if (static_cast<int>(x.size()) != spec_.in_dim) throw std::invalid_argument("Mlp::forward: input size mismatch");
    auto s = spec_.layer_sizes();
    std::size_t n_layers = s.size() - 1;
    tape.inputs.assign(n_layers, {});
    tape.pre.assign(n_layers, {});

    std::vector<double> cur = x;
    std::size_t off = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        auto n_out = static_cast<std::size_t>(s[l + 1]);
        auto n_in = static_cast<std::size_t>(s[l]);
        tape.inputs[l] = cur;
        std::vector<double> z(n_out);
        for (std::size_t i = 0; i < n_out; ++i) {
            double acc = params_[off + n_out * n_in + i]; // bias
            const double* w = &params_[off + i * n_in];
            for (std::size_t j = 0; j < n_in; ++j) acc += w[j] * cur[j];
            z[i] = acc;
        }
        off += n_out * n_in + n_out;
        tape.pre[l] = z;
        if (l + 1 < n_layers) {
            for (auto& v : z) v = elu(v);
        }
        cur = std::move(z);
    }
    return cur;
}

std::vector<double> Mlp::backward(const Tape& tape, const std::vector<double>& dout,
                                  std::vector<double>& grad) const {
    auto s = spec_.layer_sizes();
    std::size_t n_layers = s.size() - 1;
    if (tape.inputs.size() != n_layers) throw std::invalid_argument("Mlp::backward: tape layer count mismatch");
    if (static_cast<int>(dout.size()) != spec_.out_dim)
        throw std::invalid_argument("Mlp::backward: dout size mismatch");
    if (grad.size() != params_.size()) throw std::invalid_argument("Mlp::backward: grad size mismatch");

    // Offset of each layer's block in the flat layout.
    std::vector<std::size_t> offs(n_layers);
    std::size_t off = 0;
    for (std::size_t l = 0; l < n_layers; ++l) {
        offs[l] = off;
        off += static_cast<std::size_t>(s[l + 1]) * static_cast<std::size_t>(s[l]) + static_cast<std::size_t>(s[l + 1]);
    }

    std::vector<double> dz = dout; // gradient wrt layer pre-activation (output layer is affine)
    for (std::size_t l = n_layers; l-- > 0;) {
        auto n_out = static_cast<std::size_t>(s[l + 1]);
        auto n_in = static_cast<std::size_t>(s[l]);
        if (l + 1 < n_layers) {
            // dz currently holds gradient wrt ELU output; fold in ELU'.
            for (std::size_t i = 0; i < n_out; ++i) dz[i] *= elu_deriv(tape.pre[l][i]);
        }
        const std::vector<double>& in = tape.inputs[l];
        double* gw = &grad[offs[l]];
        double* gb = &grad[offs[l] + n_out * n_in];
        for (std::size_t i = 0; i < n_out; ++i) {
            gb[i] += dz[i];
            double* gwr = gw + i * n_in;
            for (std::size_t j = 0; j < n_in; ++j) gwr[j] += dz[i] * in[j];
        }
        std::vector<double> dx(n_in, 0.0);
        const double* w = &params_[offs[l]];
        for (std::size_t i = 0; i < n_out; ++i) {
            const double* wr = w + i * n_in;
            for (std::size_t j = 0; j < n_in; ++j) dx[j] += dz[i] * wr[j];
        }
        dz = std::move(dx);
    }
    return dz;
}

} // namespace mmfp
