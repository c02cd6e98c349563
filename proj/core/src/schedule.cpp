#include "descent/schedule.hpp"

#include <algorithm>
#include <cmath>

#include "descent/errors.hpp"
#include "descent/vec.hpp"

namespace descent {

const char* to_string(ScheduleKind kind) {
    switch (kind) {
        case ScheduleKind::constant: return "constant";
        case ScheduleKind::cosine_restarts: return "cosine";
        case ScheduleKind::ranger21: return "ranger21";
        case ScheduleKind::relative: return "relative";
    }
    return "?";
}

void ScheduleSpec::validate() const {
    switch (kind) {
        case ScheduleKind::constant:
            break;
        case ScheduleKind::cosine_restarts:
            if (periods.empty()) throw ConfigError("schedule: cosine needs cycle lengths");
            for (std::int64_t t : periods)
                if (t < 1) throw ConfigError("schedule: cycle length must be >= 1");
            if (!(0.0 <= eta_min && eta_min <= eta_max))
                throw ConfigError("schedule: need 0 <= eta_min <= eta_max");
            break;
        case ScheduleKind::ranger21:
            if (t_max < 1) throw ConfigError("schedule: ranger21 needs t_max >= 1");
            if (t_wup < 1 || t_wup > t_max)
                throw ConfigError("schedule: need 1 <= t_wup <= t_max");
            if (t_wdown < 1 || t_wdown > t_max)
                throw ConfigError("schedule: need 1 <= t_wdown <= t_max");
            if (!(beta2 >= 0.0 && beta2 < 1.0))
                throw ConfigError("schedule: need beta2 in [0, 1)");
            break;
        case ScheduleKind::relative:
            if (!(q_cap > 0.0)) throw ConfigError("schedule: need q_cap > 0");
            break;
    }
}

double cosine_multiplier(std::int64_t t_cur, std::int64_t t_i, double eta_min,
                         double eta_max) {
    const double frac = static_cast<double>(t_cur) / static_cast<double>(t_i);
    return eta_min + 0.5 * (eta_max - eta_min) * (1.0 + std::cos(M_PI * frac));
}

double ranger21_multiplier(std::int64_t t, std::int64_t t_max, std::int64_t t_wup,
                           std::int64_t t_wdown, double beta2) {
    const double warmup = std::max(0.5 * (1.0 - beta2) * static_cast<double>(t),
                                   static_cast<double>(t) / static_cast<double>(t_wup));
    const double warmdown =
        static_cast<double>(t_max - t) / static_cast<double>(t_wdown);
    const double mult = std::min({1.0, warmup, warmdown});
    return std::max(0.0, mult);  // past t_max the multiplier clamps at 0
}

double relative_step(std::int64_t t, double q_cap) {
    return std::min(q_cap, 1.0 / std::sqrt(static_cast<double>(t)));
}

ScheduleSpec ranger21_schedule(std::int64_t t_max, double beta2) {
    ScheduleSpec spec;
    spec.kind = ScheduleKind::ranger21;
    spec.t_max = t_max;
    spec.t_wup = static_cast<std::int64_t>(std::ceil(0.22 * static_cast<double>(t_max)));
    spec.t_wdown = static_cast<std::int64_t>(std::ceil(0.28 * static_cast<double>(t_max)));
    spec.t_wup = std::max<std::int64_t>(1, std::min(spec.t_wup, t_max));
    spec.t_wdown = std::max<std::int64_t>(1, std::min(spec.t_wdown, t_max));
    spec.beta2 = beta2;
    return spec;
}

double eta_at(const ScheduleSpec& spec, std::int64_t t) {
    if (t < 1) throw ConfigError("schedule: iteration index must be >= 1");
    switch (spec.kind) {
        case ScheduleKind::constant:
            return 1.0;
        case ScheduleKind::cosine_restarts: {
            // Walk the cycle lengths; a completed cycle resets t_cur to 0
            // and the last length repeats forever.
            std::int64_t t_cur = t - 1;
            std::size_t cycle = 0;
            std::int64_t t_i = spec.periods[0];
            while (t_cur >= t_i) {
                t_cur -= t_i;
                if (cycle + 1 < spec.periods.size()) ++cycle;
                t_i = spec.periods[cycle];
            }
            return cosine_multiplier(t_cur, t_i, spec.eta_min, spec.eta_max);
        }
        case ScheduleKind::ranger21:
            return ranger21_multiplier(t, spec.t_max, spec.t_wup, spec.t_wdown,
                                       spec.beta2);
        case ScheduleKind::relative:
            return relative_step(t, spec.q_cap);
    }
    return 1.0;
}

double adafactor_lr(std::int64_t t, const ParameterSet& w, double eps2, double q_cap) {
    if (t < 1) throw ConfigError("schedule: iteration index must be >= 1");
    return std::max(eps2, rms(w.values)) * relative_step(t, q_cap);
}

}  // namespace descent
