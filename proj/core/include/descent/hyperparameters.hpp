#pragma once

#include <cstdint>

namespace descent {

// Every knob used by the update rules. Each optimizer reads the subset it
// needs; registry.cpp holds the per-optimizer defaults.
struct Hyperparameters {
    double eta = 1e-3;     // base learning rate
    double gamma = 0.9;    // heavy-ball momentum factor
    double beta0 = 0.9;    // positive-negative momentum weight (Ranger21)
    double beta1 = 0.9;    // first decay rate
    double beta2 = 0.999;  // second decay rate
    double beta3 = 0.01;   // third decay rate (Adan)
    double eps = 1e-8;     // smoothing term
    double eps1 = 1e-30;   // Adafactor accumulator regularizer
    double eps2 = 1e-3;    // Adafactor relative-step floor
    double eps_c = 1e-3;   // adaptive-clipping smoothing term
    double lambda = 0.0;   // weight decay rate
    double sigma = 0.05;   // SAM/ASAM perturbation radius
    double delta = 0.01;   // Sophia clipping rate
    double tau_c = 1.0;    // clipping threshold
    double gamma_l = 0.0;  // LAMB trust-ratio lower clamp
    double gamma_u = 10.0; // LAMB trust-ratio upper clamp
    double alpha = 0.5;    // Lookahead slow-weights learning rate
    double beta_la = 0.5;  // Ranger21 lookahead decay rate
    double e = 0.8;        // Adafactor decay-schedule exponent
    std::int64_t k = 5;    // sync / Hessian-refresh interval
    std::int64_t p = 64;   // Adamax norm exponent (limit checks only)
    std::int64_t ns_iters = 5;     // Newton-Schulz iteration count (Muon)
    std::int64_t probes = 1;       // Hutchinson probes per Hessian refresh
    std::uint64_t probe_seed = 0;  // seed for the probe generator

    // Keeps the printed "- lambda*w" decay sign instead of the shrinking
    // form; off by default, see README.
    bool paper_literal_decay_sign = false;

    // Throws ConfigError when a value is out of range.
    void validate() const;
};

}  // namespace descent
