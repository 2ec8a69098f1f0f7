#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gup/error.hpp"

namespace gup {

struct AdamConfig {
    double learning_rate = 0.0001;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

class AdamOptimizer {
public:
    AdamOptimizer(const AdamConfig& cfg, std::size_t n)
        : cfg_(cfg), m_(n, 0.0), v_(n, 0.0) {
        // zero is allowed: a rate-0 run is the no-op baseline used in tests
        require(cfg.learning_rate >= 0.0, Errc::invalid_argument, "learning rate must be nonnegative");
        require(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0, Errc::invalid_argument, "beta1 must be in [0,1)");
        require(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0, Errc::invalid_argument, "beta2 must be in [0,1)");
        require(cfg.epsilon > 0.0, Errc::invalid_argument, "epsilon must be positive");
    }

    void step(std::vector<double>& params, const std::vector<double>& grads) {
        require(params.size() == m_.size() && grads.size() == m_.size(),
                Errc::dimension_mismatch, "optimizer state size mismatch");
        ++t_;
        const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
        const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m_[i] = cfg_.beta1 * m_[i] + (1.0 - cfg_.beta1) * grads[i];
            v_[i] = cfg_.beta2 * v_[i] + (1.0 - cfg_.beta2) * grads[i] * grads[i];
            const double mhat = m_[i] / bc1;
            const double vhat = v_[i] / bc2;
            params[i] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }

    long steps_taken() const { return t_; }

private:
    AdamConfig cfg_;
    std::vector<double> m_, v_;
    long t_ = 0;
};

} // namespace gup
