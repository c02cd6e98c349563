#include <array>
#include <cctype>
#include <string>

#include "descent/errors.hpp"
#include "descent/optimizer.hpp"

namespace descent {

const char* to_string(OptimizerId id) {
    switch (id) {
        case OptimizerId::sgd: return "sgd";
        case OptimizerId::momentum: return "momentum";
        case OptimizerId::nag: return "nag";
        case OptimizerId::adagrad: return "adagrad";
        case OptimizerId::rmsprop: return "rmsprop";
        case OptimizerId::adadelta: return "adadelta";
        case OptimizerId::adam: return "adam";
        case OptimizerId::adamnc: return "adamnc";
        case OptimizerId::adamax: return "adamax";
        case OptimizerId::nadam: return "nadam";
        case OptimizerId::adamw: return "adamw";
        case OptimizerId::adafactor: return "adafactor";
        case OptimizerId::amsgrad: return "amsgrad";
        case OptimizerId::radam: return "radam";
        case OptimizerId::lamb: return "lamb";
        case OptimizerId::lookahead: return "lookahead";
        case OptimizerId::adabelief: return "adabelief";
        case OptimizerId::sam: return "sam";
        case OptimizerId::asam: return "asam";
        case OptimizerId::ranger21: return "ranger21";
        case OptimizerId::adan: return "adan";
        case OptimizerId::lion: return "lion";
        case OptimizerId::sophia: return "sophia";
        case OptimizerId::muon: return "muon";
    }
    return "?";
}

std::optional<OptimizerId> optimizer_from_string(std::string_view name) {
    std::string lower(name);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (const OptimizerInfo& info : optimizer_table()) {
        if (lower == to_string(info.id)) return info.id;
    }
    return std::nullopt;
}

bool is_wrapper(OptimizerId id) {
    return id == OptimizerId::lookahead || id == OptimizerId::sam ||
           id == OptimizerId::asam;
}

std::span<const OptimizerInfo> optimizer_table() {
    static const std::array<OptimizerInfo, 24> table{{
        {OptimizerId::sgd, "SGD", 1951},
        {OptimizerId::momentum, "Momentum", 1964},
        {OptimizerId::nag, "NAG", 1983},
        {OptimizerId::adagrad, "Adagrad", 2011},
        {OptimizerId::rmsprop, "RMSprop", 2012},
        {OptimizerId::adadelta, "Adadelta", 2012},
        {OptimizerId::adam, "Adam", 2014},
        {OptimizerId::adamax, "Adamax", 2015},
        {OptimizerId::nadam, "Nadam", 2016},
        {OptimizerId::adamw, "AdamW", 2017},
        {OptimizerId::adafactor, "Adafactor", 2018},
        {OptimizerId::amsgrad, "AMSgrad", 2018},
        {OptimizerId::adamnc, "AdamNC", 2018},
        {OptimizerId::radam, "Radam", 2019},
        {OptimizerId::lamb, "LAMB", 2019},
        {OptimizerId::lookahead, "Lookahead", 2019},
        {OptimizerId::adabelief, "Adabelief", 2020},
        {OptimizerId::sam, "SAM", 2020},
        {OptimizerId::asam, "ASAM", 2021},
        {OptimizerId::ranger21, "Ranger21", 2021},
        {OptimizerId::adan, "Adan", 2022},
        {OptimizerId::lion, "Lion", 2023},
        {OptimizerId::sophia, "Sophia", 2023},
        {OptimizerId::muon, "Muon", 2024},
    }};
    return table;
}

Hyperparameters default_hyperparameters(OptimizerId id) {
    Hyperparameters hp;
    switch (id) {
        case OptimizerId::sgd:
            hp.eta = 0.1;
            break;
        case OptimizerId::momentum:
        case OptimizerId::nag:
            hp.eta = 0.01;
            hp.gamma = 0.9;
            break;
        case OptimizerId::adagrad:
            hp.eta = 0.01;
            break;
        case OptimizerId::rmsprop:
            hp.eta = 1e-3;
            hp.beta2 = 0.9;  // the single decay rate
            break;
        case OptimizerId::adadelta:
            hp.beta2 = 0.9;
            hp.eps = 1e-6;
            break;
        case OptimizerId::adam:
        case OptimizerId::amsgrad:
        case OptimizerId::radam:
        case OptimizerId::adabelief:
        case OptimizerId::adamnc:
            hp.eta = 1e-3;
            hp.beta1 = 0.9;
            hp.beta2 = 0.999;
            hp.eps = 1e-8;
            break;
        case OptimizerId::adamax:
            hp.eta = 2e-3;
            hp.beta1 = 0.9;
            hp.beta2 = 0.999;
            break;
        case OptimizerId::nadam:
            hp.eta = 1e-3;
            hp.beta1 = 0.975;
            hp.beta2 = 0.999;
            hp.eps = 1e-8;
            break;
        case OptimizerId::adamw:
            hp.eta = 1e-3;
            hp.lambda = 1e-2;
            break;
        case OptimizerId::adafactor:
            hp.eps1 = 1e-30;
            hp.eps2 = 1e-3;
            hp.tau_c = 1.0;
            hp.e = 0.8;
            break;
        case OptimizerId::lamb:
            hp.eta = 1e-3;
            hp.gamma_l = 0.0;
            hp.gamma_u = 10.0;
            hp.lambda = 0.0;
            break;
        case OptimizerId::lookahead:
            hp.eta = 0.1;  // inner SGD
            hp.alpha = 0.5;
            hp.k = 5;
            break;
        case OptimizerId::sam:
        case OptimizerId::asam:
            hp.eta = 0.1;  // base SGD
            hp.sigma = 0.05;
            hp.lambda = 0.0;
            break;
        case OptimizerId::ranger21:
            hp.eta = 1e-3;
            hp.k = 5;
            hp.lambda = 1e-4;
            hp.tau_c = 1e-2;
            hp.eps = 1e-8;
            hp.eps_c = 1e-3;
            hp.beta0 = 0.9;
            hp.beta1 = 0.9;
            hp.beta2 = 0.999;
            hp.beta_la = 0.5;
            break;
        case OptimizerId::adan:
            hp.eta = 1e-3;
            hp.beta1 = 0.02;
            hp.beta2 = 0.08;
            hp.beta3 = 0.01;
            hp.lambda = 0.02;
            hp.eps = 1e-8;
            break;
        case OptimizerId::lion:
            hp.eta = 1e-4;
            hp.beta1 = 0.9;
            hp.beta2 = 0.99;
            hp.lambda = 0.0;
            break;
        case OptimizerId::sophia:
            hp.eta = 1e-3;
            hp.beta1 = 0.96;
            hp.beta2 = 0.99;
            hp.eps = 1e-12;
            hp.delta = 0.01;
            hp.lambda = 0.02;
            hp.k = 10;
            hp.probes = 1;
            break;
        case OptimizerId::muon:
            hp.eta = 1e-3;
            hp.gamma = 0.95;
            hp.beta1 = 0.9;
            hp.beta2 = 0.999;
            hp.eps = 1e-8;
            hp.lambda = 0.0;
            hp.ns_iters = 5;
            break;
    }
    return hp;
}

ScheduleKind default_schedule_kind(OptimizerId id) {
    switch (id) {
        case OptimizerId::adafactor: return ScheduleKind::relative;
        case OptimizerId::ranger21: return ScheduleKind::ranger21;
        default: return ScheduleKind::constant;
    }
}

OptimizerSpec default_spec(OptimizerId id) {
    OptimizerSpec spec;
    spec.id = id;
    spec.hp = default_hyperparameters(id);
    spec.schedule.kind = default_schedule_kind(id);
    if (spec.schedule.kind == ScheduleKind::ranger21) {
        spec.schedule = ranger21_schedule(1000, spec.hp.beta2);
    }
    spec.inner = OptimizerId::sgd;
    return spec;
}

void Hyperparameters::validate() const {
    auto in_unit = [](double x) { return x >= 0.0 && x < 1.0; };
    if (!(eta > 0.0)) throw ConfigError("hyperparameters: eta must be > 0");
    if (!in_unit(gamma)) throw ConfigError("hyperparameters: gamma must be in [0, 1)");
    if (!in_unit(beta0) || !in_unit(beta1) || !in_unit(beta2) || !in_unit(beta3))
        throw ConfigError("hyperparameters: decay rates must be in [0, 1)");
    if (!in_unit(beta_la)) throw ConfigError("hyperparameters: beta_la must be in [0, 1)");
    if (!(eps > 0.0) || !(eps1 > 0.0) || !(eps2 > 0.0) || !(eps_c > 0.0))
        throw ConfigError("hyperparameters: smoothing terms must be > 0");
    if (lambda < 0.0) throw ConfigError("hyperparameters: lambda must be >= 0");
    if (sigma < 0.0) throw ConfigError("hyperparameters: sigma must be >= 0");
    if (!(delta > 0.0)) throw ConfigError("hyperparameters: delta must be > 0");
    if (!(tau_c > 0.0)) throw ConfigError("hyperparameters: tau_c must be > 0");
    if (gamma_l < 0.0 || gamma_l > gamma_u)
        throw ConfigError("hyperparameters: need 0 <= gamma_l <= gamma_u");
    if (alpha < 0.0 || alpha > 1.0)
        throw ConfigError("hyperparameters: alpha must be in [0, 1]");
    if (!(e > 0.0)) throw ConfigError("hyperparameters: e must be > 0");
    if (k < 1) throw ConfigError("hyperparameters: k must be >= 1");
    if (p < 1) throw ConfigError("hyperparameters: p must be >= 1");
    if (ns_iters < 1) throw ConfigError("hyperparameters: ns_iters must be >= 1");
    if (probes < 1) throw ConfigError("hyperparameters: probes must be >= 1");
}

void OptimizerSpec::validate() const {
    hp.validate();
    schedule.validate();
    if (is_wrapper(id) && is_wrapper(inner))
        throw ConfigError(std::string("optimizer: '") + to_string(id) +
                          "' requires a non-wrapper inner optimizer, got '" +
                          to_string(inner) + "'");
}

}  // namespace descent
