#include <cmath>

#include "descent/kernels.hpp"
#include "descent/schedule.hpp"
#include "steppers.hpp"

namespace descent::detail {
namespace {

// Factored second moments for matrix2d tensors, dense for the rest; no
// first moment. Updates are clipped per tensor to RMS <= tau_c, and under
// the relative schedule the learning rate is max(eps2, RMS(w)) * q_t.
class AdafactorStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        AdafactorState st;
        st.factored.resize(layout.tensor_count());
        st.dense.resize(layout.tensor_count());
        for (std::size_t i = 0; i < layout.tensor_count(); ++i) {
            const auto [rows, cols] = layout.matrix_dims(i);
            if (layout.entry(i).kind == TensorKind::matrix2d)
                st.factored[i] = zero_factored(rows, cols);
            else
                st.dense[i] = zeros(layout.tensor_size(i));
        }
        return OptimizerState{0, std::move(st)};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<AdafactorState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const double eps1 = spec_.hp.eps1;
        const double tau = spec_.hp.tau_c;
        // Under the relative schedule the multiplier is q_t itself.
        const double eta_t = spec_.schedule.kind == ScheduleKind::relative
                                 ? std::max(spec_.hp.eps2, rms(w.values)) * multiplier
                                 : spec_.hp.eta * multiplier;
        const ParameterLayout& layout = *w.layout;
        std::vector<double> values = w.values;
        for (std::size_t tix = 0; tix < layout.tensor_count(); ++tix) {
            const std::size_t off = layout.offset(tix);
            const std::size_t len = layout.tensor_size(tix);
            const auto g = std::span<const double>(eval.gradient).subspan(off, len);
            std::vector<double> vhat;
            if (layout.entry(tix).kind == TensorKind::matrix2d) {
                const auto [rows, cols] = layout.matrix_dims(tix);
                vhat = factored_update(st.factored[tix], g, rows, cols, t, eps1,
                                       spec_.hp.e);
            } else {
                std::vector<double>& dense = st.dense[tix];
                const double beta = 1.0 - std::pow(static_cast<double>(t), -spec_.hp.e);
                for (std::size_t i = 0; i < len; ++i)
                    dense[i] = beta * dense[i] + (1.0 - beta) * (g[i] * g[i] + eps1);
                vhat = dense;
            }
            std::vector<double> u(len, 0.0);
            for (std::size_t i = 0; i < len; ++i) u[i] = g[i] / std::sqrt(vhat[i]);
            const double scale = 1.0 / std::max(1.0, rms(u) / tau);
            for (std::size_t i = 0; i < len; ++i)
                values[off + i] -= eta_t * scale * u[i];
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, eta_t,
                            grads.eval_count() - before - 1);
    }
};

// AdamW core plus the eight companion techniques: per-row adaptive
// gradient clipping, gradient centralization (matrix2d tensors), positive-
// negative momentum, the combined warm-up/warm-down schedule (supplied via
// the multiplier), stable weight decay merged with norm loss, and a
// lookahead sync every k steps.
class Ranger21Stepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        const std::size_t n = layout.size();
        return OptimizerState{
            0, Ranger21State{zeros(n), zeros(n), zeros(n), zeros(n), zeros(n), false}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<Ranger21State>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const Hyperparameters& hp = spec_.hp;
        const ParameterLayout& layout = *w.layout;
        if (!st.lookahead_bound) {
            st.lookahead = w.values;  // slow weights start at the initial point
            st.lookahead_bound = true;
        }

        std::vector<double> g = eval.gradient;
        for (std::size_t tix = 0; tix < layout.tensor_count(); ++tix) {
            const std::size_t off = layout.offset(tix);
            const std::size_t len = layout.tensor_size(tix);
            auto gt = std::span<double>(g).subspan(off, len);
            auto wt = std::span<const double>(w.values).subspan(off, len);
            const bool is_matrix = layout.entry(tix).kind == TensorKind::matrix2d;
            const auto [rows, cols] = layout.matrix_dims(tix);
            // clipping acts on individual rows of 2-D tensors
            adaptive_grad_clip_rows(gt, wt, is_matrix ? rows : 1,
                                    is_matrix ? cols : static_cast<std::int64_t>(len),
                                    hp.tau_c, hp.eps_c);
            if (is_matrix) gradient_centralize(gt);
        }

        // positive-negative momentum: m_t leaps from m_{t-2}
        const double beta1_sq = hp.beta1 * hp.beta1;
        const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(t));
        const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(t));
        const double pnm_norm =
            std::sqrt((1.0 + hp.beta0) * (1.0 + hp.beta0) + hp.beta0 * hp.beta0);
        const double lr = hp.eta * multiplier;
        const std::size_t n = w.values.size();
        std::vector<double> m_t(n, 0.0);
        std::vector<double> y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            m_t[i] = beta1_sq * st.m_prev2[i] + (1.0 - beta1_sq) * g[i];
            const double mhat = ((1.0 + hp.beta0) * m_t[i] - hp.beta0 * st.m_prev[i]) / bc1;
            st.v[i] = hp.beta2 * st.v[i] + (1.0 - hp.beta2) * g[i] * g[i];
            st.v_max[i] = std::max(st.v_max[i], st.v[i]);
            const double vhat = st.v_max[i] / bc2;
            y[i] = mhat / (pnm_norm * (std::sqrt(vhat) + hp.eps));
        }
        st.m_prev2 = st.m_prev;
        st.m_prev = m_t;

        std::vector<double> values = w.values;
        for (std::size_t tix = 0; tix < layout.tensor_count(); ++tix) {
            const std::size_t off = layout.offset(tix);
            const std::size_t len = layout.tensor_size(tix);
            // stable weight decay + norm loss, per tensor
            double v_mean = 0.0;
            double w_sq = 0.0;
            for (std::size_t i = off; i < off + len; ++i) {
                v_mean += st.v_max[i] / bc2;
                w_sq += w.values[i] * w.values[i];
            }
            v_mean /= static_cast<double>(len);
            const double w_norm = std::sqrt(w_sq);
            double decay_factor = 0.0;
            if (hp.lambda > 0.0 && v_mean > 0.0 && w_norm > 0.0)
                decay_factor = lr / std::sqrt(v_mean) * hp.lambda * (1.0 - 1.0 / w_norm);
            for (std::size_t i = off; i < off + len; ++i)
                values[i] -= lr * y[i] + decay_factor * w.values[i];
        }

        if (t % hp.k == 0) {
            for (std::size_t i = 0; i < n; ++i) {
                st.lookahead[i] = hp.beta_la * st.lookahead[i] + (1.0 - hp.beta_la) * values[i];
                values[i] = st.lookahead[i];
            }
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Nesterov momentum estimation from the gradient difference; the stored
// previous gradient equals the current one on the first step so the
// difference terms vanish there.
class AdanStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        const std::size_t n = layout.size();
        return OptimizerState{0, AdanState{zeros(n), zeros(n), zeros(n), zeros(n), false}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<AdanState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const Hyperparameters& hp = spec_.hp;
        if (!st.has_prev) {
            st.g_prev = eval.gradient;
            st.has_prev = true;
        }
        const double lr = hp.eta * multiplier;
        const double decay = 1.0 / (1.0 + hp.lambda * lr);
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double g = eval.gradient[i];
            const double diff = g - st.g_prev[i];
            st.m[i] = (1.0 - hp.beta1) * st.m[i] + hp.beta1 * g;
            st.v[i] = (1.0 - hp.beta2) * st.v[i] + hp.beta2 * diff;
            const double nesterov = g + (1.0 - hp.beta2) * diff;
            st.n[i] = (1.0 - hp.beta3) * st.n[i] + hp.beta3 * nesterov * nesterov;
            const double step = lr / (std::sqrt(st.n[i]) + hp.eps) *
                                (st.m[i] + (1.0 - hp.beta2) * st.v[i]);
            values[i] = decay * (values[i] - step);
        }
        st.g_prev = eval.gradient;
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Sign of an interpolated momentum drives the update; the stored buffer
// is refreshed with beta2 from the same previous value.
class LionStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, LionState{zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<LionState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const Hyperparameters& hp = spec_.hp;
        const double lr = hp.eta * multiplier;
        const double decay = hp.paper_literal_decay_sign ? -hp.lambda : hp.lambda;
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double g = eval.gradient[i];
            const double interp = hp.beta1 * st.m[i] + (1.0 - hp.beta1) * g;
            st.m[i] = hp.beta2 * st.m[i] + (1.0 - hp.beta2) * g;
            values[i] -= lr * (sign(interp) + decay * values[i]);
        }
        state.step_count += 1;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Pre-conditions the momentum with an EMA of diagonal Hessian estimates,
// refreshed every k steps by Hutchinson probes; the elementwise update is
// clipped to [-1, 1]. Decay is applied as a separate shrink substep.
class SophiaStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        return OptimizerState{0, SophiaState{zeros(layout.size()), zeros(layout.size())}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<SophiaState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const Hyperparameters& hp = spec_.hp;
        ema(st.m, hp.beta1, eval.gradient);
        if ((t - 1) % hp.k == 0) {
            HvpFn hvp = [&](std::span<const double> u) { return grads.hvp(w, u); };
            const std::vector<double> estimate =
                hutchinson_diag(hvp, w.values.size(), hp.probes,
                                mix_seed(hp.probe_seed, static_cast<std::uint64_t>(t)));
            ema(st.h, hp.beta2, estimate);
        }
        const double lr = hp.eta * multiplier;
        std::vector<double> values = w.values;
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] -= lr * hp.lambda * values[i];  // decoupled decay substep
            const double denom = std::max(hp.delta * st.h[i], hp.eps);
            const double ratio = st.m[i] / denom;
            values[i] -= lr * std::max(std::min(ratio, 1.0), -1.0);
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

// Heavy-ball momentum orthogonalized by Newton-Schulz for matrix2d
// tensors; scalars and vectors take the nested AdamW route.
class MuonStepper final : public Stepper {
public:
    using Stepper::Stepper;

    OptimizerState init_state(const ParameterLayout& layout) const override {
        const std::size_t n = layout.size();
        return OptimizerState{0, MuonState{zeros(n), AdamState{zeros(n), zeros(n)}}};
    }

    StepOutcome step(OptimizerState& state, const ParameterSet& w, GradientSource& grads,
                     double multiplier) const override {
        auto& st = std::get<MuonState>(state.data);
        const std::int64_t before = grads.eval_count();
        const GradientEvaluation eval = grads.evaluate(w);
        const std::int64_t t = state.step_count + 1;
        const Hyperparameters& hp = spec_.hp;
        const double lr = hp.eta * multiplier;
        const ParameterLayout& layout = *w.layout;
        std::vector<double> values = w.values;
        for (std::size_t tix = 0; tix < layout.tensor_count(); ++tix) {
            const std::size_t off = layout.offset(tix);
            const std::size_t len = layout.tensor_size(tix);
            const auto g = std::span<const double>(eval.gradient).subspan(off, len);
            if (layout.entry(tix).kind == TensorKind::matrix2d) {
                const auto [rows, cols] = layout.matrix_dims(tix);
                auto m = std::span<double>(st.momentum).subspan(off, len);
                for (std::size_t i = 0; i < len; ++i) m[i] = hp.gamma * m[i] + g[i];
                const std::vector<double> ortho =
                    newton_schulz(m, rows, cols, hp.ns_iters);
                for (std::size_t i = 0; i < len; ++i) values[off + i] -= lr * ortho[i];
            } else {
                adamw_tensor_update(std::span<double>(values).subspan(off, len), g,
                                    std::span<double>(st.adamw.m).subspan(off, len),
                                    std::span<double>(st.adamw.v).subspan(off, len), t,
                                    hp.eta, multiplier, hp.beta1, hp.beta2, hp.eps,
                                    hp.lambda, hp.paper_literal_decay_sign);
            }
        }
        state.step_count = t;
        return make_outcome(w, std::move(values), eval, lr,
                            grads.eval_count() - before - 1);
    }
};

}  // namespace

std::unique_ptr<Stepper> make_modern_stepper(const OptimizerSpec& spec) {
    switch (spec.id) {
        case OptimizerId::adafactor: return std::make_unique<AdafactorStepper>(spec);
        case OptimizerId::ranger21: return std::make_unique<Ranger21Stepper>(spec);
        case OptimizerId::adan: return std::make_unique<AdanStepper>(spec);
        case OptimizerId::lion: return std::make_unique<LionStepper>(spec);
        case OptimizerId::sophia: return std::make_unique<SophiaStepper>(spec);
        case OptimizerId::muon: return std::make_unique<MuonStepper>(spec);
        default: return nullptr;
    }
}

}  // namespace descent::detail
