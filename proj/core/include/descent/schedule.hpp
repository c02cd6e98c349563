#pragma once

#include <cstdint>
#include <vector>

#include "descent/layout.hpp"

namespace descent {

enum class ScheduleKind {
    constant,
    cosine_restarts,  // cosine annealing with warm restarts
    ranger21,         // linear warm-up, plateau, linear warm-down
    relative,         // Adafactor relative step size
};

const char* to_string(ScheduleKind kind);

// Pure function of the iteration index; eta_at returns a multiplier in
// [0, 1] applied to the base learning rate.
struct ScheduleSpec {
    ScheduleKind kind = ScheduleKind::constant;

    // cosine_restarts: cycle lengths T_i; the last entry repeats once the
    // sequence is exhausted.
    std::vector<std::int64_t> periods{100};
    double eta_min = 0.0;
    double eta_max = 1.0;

    // ranger21
    std::int64_t t_max = 0;
    std::int64_t t_wup = 0;
    std::int64_t t_wdown = 0;
    double beta2 = 0.999;

    // relative
    double q_cap = 1e-2;

    void validate() const;  // throws ConfigError
};

// eta_min + 0.5*(eta_max - eta_min)*(1 + cos(pi*t_cur/t_i)); 1 at t_cur=0,
// 0 at t_cur=t_i when eta_min=0 and eta_max=1.
double cosine_multiplier(std::int64_t t_cur, std::int64_t t_i, double eta_min,
                         double eta_max);

// min(1, max((1-beta2)/2 * t, t/t_wup), (t_max-t)/t_wdown), clamped to 0
// past t_max.
double ranger21_multiplier(std::int64_t t, std::int64_t t_max, std::int64_t t_wup,
                           std::int64_t t_wdown, double beta2);

// min(q_cap, 1/sqrt(t)) -- the relative step size q_t.
double relative_step(std::int64_t t, double q_cap);

// Warm-up/warm-down defaults: 22% and 28% of t_max, rounded up.
ScheduleSpec ranger21_schedule(std::int64_t t_max, double beta2 = 0.999);

// Multiplier for step t >= 1.
double eta_at(const ScheduleSpec& spec, std::int64_t t);

// max(eps2, RMS(w)) * min(q_cap, 1/sqrt(t)) -- the full Adafactor learning
// rate; RMS is taken over the whole parameter vector.
double adafactor_lr(std::int64_t t, const ParameterSet& w, double eps2, double q_cap);

}  // namespace descent
