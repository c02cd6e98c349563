#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace descent {

class Problem;
struct ParameterSet;

// Approximate orthogonalization of a rows x cols matrix (row-major): scale
// to unit Frobenius norm, then iterate X <- 1.5*X - 0.5*X*X'*X. Singular
// values of full-rank input approach 1; the zero matrix maps to itself.
std::vector<double> newton_schulz(std::span<const double> m, std::int64_t rows,
                                  std::int64_t cols, std::int64_t iters = 5);

// u ⊙ Hu for one probe vector u.
using HvpFn = std::function<std::vector<double>(std::span<const double>)>;
std::vector<double> hutchinson_probe_estimate(const HvpFn& hvp, std::span<const double> u);

// Average of u ⊙ Hu over `samples` Rademacher probes; unbiased for the
// Hessian diagonal and exact when the Hessian is diagonal.
std::vector<double> hutchinson_diag(const HvpFn& hvp, std::size_t dim,
                                    std::int64_t samples, std::uint64_t seed);
std::vector<double> hutchinson_diag(const Problem& problem, const ParameterSet& w,
                                    std::int64_t samples, std::uint64_t seed);

// Elementwise clamp to [-tau, tau].
std::vector<double> clip_symmetric(std::span<const double> z, double tau);

// Per-row rescale: rows whose gradient norm exceeds tau * max(||w_row||,
// eps_c) are scaled down to that bound; never increases a row norm.
// Treats g and w as rows x cols matrices (rows = 1 covers whole tensors).
void adaptive_grad_clip_rows(std::span<double> g, std::span<const double> w,
                             std::int64_t rows, std::int64_t cols, double tau,
                             double eps_c);

// Subtract the tensor mean from every element.
void gradient_centralize(std::span<double> g);

// Row and column factors of a nonnegative matrix; reconstructs the second
// moment estimate as row*col / sum(row).
struct FactoredSecondMoment {
    std::vector<double> row;  // length rows
    std::vector<double> col;  // length cols
};

FactoredSecondMoment zero_factored(std::int64_t rows, std::int64_t cols);

// EMA update of the factors over (G^2 + eps1) row/column sums with decay
// 1 - t^-decay_exp, then returns the reconstructed moment matrix
// (rows x cols, row-major).
std::vector<double> factored_update(FactoredSecondMoment& state, std::span<const double> g,
                                    std::int64_t rows, std::int64_t cols, std::int64_t t,
                                    double eps1, double decay_exp);

// Rademacher +-1 vector drawn from the raw engine bits (portable across
// library implementations).
std::vector<double> rademacher_vector(std::size_t dim, std::uint64_t seed);

// Splitmix-style mix of a seed and a stream index, used to derive
// independent deterministic substreams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace descent
