#pragma once

#include <cstdint>
#include <memory>
#include <variant>
#include <vector>

#include "descent/kernels.hpp"
#include "descent/layout.hpp"

namespace descent {

struct OptimizerState;

// Deep-copying box so wrapper states (Lookahead, SAM) can nest an inner
// state while OptimizerState stays value-semantic.
class StateBox {
public:
    StateBox();
    explicit StateBox(OptimizerState inner);
    StateBox(const StateBox& other);
    StateBox& operator=(const StateBox& other);
    StateBox(StateBox&&) noexcept;
    StateBox& operator=(StateBox&&) noexcept;
    ~StateBox();

    OptimizerState& get();
    const OptimizerState& get() const;

private:
    std::unique_ptr<OptimizerState> ptr_;
};

struct SgdState {};

struct MomentumState {
    std::vector<double> velocity;  // shared by Momentum and NAG
};

struct AdagradState {
    std::vector<double> accum;  // running sum of squared gradients
};

struct RmspropState {
    std::vector<double> sq_avg;  // EMA of squared gradients
};

struct AdadeltaState {
    std::vector<double> sq_avg;         // EMA of squared gradients
    std::vector<double> update_sq_avg;  // EMA of squared weight updates
};

// Covers Adam, AdamNC, Nadam, AdamW, Radam, and LAMB; Muon nests one for
// its non-2D parameters.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
};

struct AmsgradState {
    std::vector<double> m;
    std::vector<double> v;
    std::vector<double> v_max;  // elementwise nondecreasing across steps
};

struct AdamaxState {
    std::vector<double> m;
    std::vector<double> u;  // exponentially weighted infinity norm
};

struct AdabeliefState {
    std::vector<double> m;
    std::vector<double> s;  // EMA of squared gradient deviations
};

// One slot per layout tensor: matrix2d tensors hold row/column factors,
// everything else a dense second moment.
struct AdafactorState {
    std::vector<FactoredSecondMoment> factored;
    std::vector<std::vector<double>> dense;
};

struct AdanState {
    std::vector<double> m;
    std::vector<double> v;  // EMA of gradient differences
    std::vector<double> n;
    std::vector<double> g_prev;
    bool has_prev = false;  // g_prev is taken equal to g on the first step
};

struct LionState {
    std::vector<double> m;  // the single momentum buffer
};

struct SophiaState {
    std::vector<double> m;
    std::vector<double> h;  // EMA of diagonal Hessian estimates
};

struct MuonState {
    std::vector<double> momentum;  // heavy-ball buffer for matrix2d tensors
    AdamState adamw;               // everything else routes through AdamW
};

struct Ranger21State {
    std::vector<double> m_prev;   // momentum at t-1
    std::vector<double> m_prev2;  // momentum at t-2
    std::vector<double> v;
    std::vector<double> v_max;
    std::vector<double> lookahead;  // slow weights, bound to w on first step
    bool lookahead_bound = false;
};

struct LookaheadState {
    std::vector<double> slow;  // bound to w on first step
    bool slow_bound = false;
    std::int64_t since_sync = 0;
    StateBox inner;
};

struct SamState {
    StateBox base;  // state of the base optimizer (SAM and ASAM)
};

using StateData =
    std::variant<SgdState, MomentumState, AdagradState, RmspropState, AdadeltaState,
                 AdamState, AmsgradState, AdamaxState, AdabeliefState, AdafactorState,
                 AdanState, LionState, SophiaState, MuonState, Ranger21State,
                 LookaheadState, SamState>;

struct OptimizerState {
    std::int64_t step_count = 0;  // increases by exactly 1 per accepted step
    StateData data;
};

}  // namespace descent
