#pragma once

// Internal stepper helpers and per-family factories; the public entry
// point is make_stepper() in optimizer.cpp.

#include <cmath>
#include <memory>
#include <span>
#include <vector>

#include "descent/errors.hpp"
#include "descent/optimizer.hpp"
#include "descent/vec.hpp"

namespace descent::detail {

// Assembles the outcome and rejects non-finite weights.
StepOutcome make_outcome(const ParameterSet& old_params, std::vector<double> values,
                         const GradientEvaluation& eval, double effective_lr,
                         std::int64_t extra_evals);

// buf <- beta*buf + (1-beta)*x
inline void ema(std::vector<double>& buf, double beta, std::span<const double> x) {
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = beta * buf[i] + (1.0 - beta) * x[i];
}

// buf <- beta*buf + (1-beta)*x^2
inline void ema_sq(std::vector<double>& buf, double beta, std::span<const double> x) {
    for (std::size_t i = 0; i < buf.size(); ++i)
        buf[i] = beta * buf[i] + (1.0 - beta) * x[i] * x[i];
}

// One AdamW tensor update with decoupled decay; shared verbatim by the
// AdamW stepper and Muon's non-2D route so both produce identical
// trajectories. The multiplier scales both the gradient term and the
// decay, t is the bias-correction step index.
inline void adamw_tensor_update(std::span<double> w, std::span<const double> g,
                                std::span<double> m, std::span<double> v,
                                std::int64_t t, double eta, double multiplier,
                                double beta1, double beta2, double eps, double lambda,
                                bool literal_decay_sign) {
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    const double decay = literal_decay_sign ? -lambda : lambda;
    for (std::size_t i = 0; i < w.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        w[i] -= multiplier * (eta * mhat / std::sqrt(vhat + eps) + decay * w[i]);
    }
}

std::unique_ptr<Stepper> make_basic_stepper(const OptimizerSpec& spec);
std::unique_ptr<Stepper> make_adam_family_stepper(const OptimizerSpec& spec);
std::unique_ptr<Stepper> make_modern_stepper(const OptimizerSpec& spec);
std::unique_ptr<Stepper> make_wrapper_stepper(const OptimizerSpec& spec);

}  // namespace descent::detail
