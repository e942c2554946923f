#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mmfp {

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Adam with bias correction. State is per-parameter first and second
// moment estimates plus the step counter.
class Adam {
  public:
    Adam() = default;
    explicit Adam(std::size_t n, AdamConfig cfg = {}) : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {}

    const AdamConfig& config() const { return cfg_; }
    std::size_t size() const { return m_.size(); }
    std::uint64_t steps() const { return t_; }

    void step(std::vector<double>& params, const std::vector<double>& grad) {
        if (params.size() != m_.size() || grad.size() != m_.size())
            throw std::invalid_argument("Adam::step: size mismatch");
        ++t_;
        double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grad[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grad[i] * grad[i];
            double mhat = m_[i] / c1;
            double vhat = v_[i] / c2;
            params[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }

  private:
    AdamConfig cfg_;
    std::vector<double> m_, v_;
    std::uint64_t t_ = 0;
};

} // namespace mmfp
