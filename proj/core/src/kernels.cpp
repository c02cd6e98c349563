#include "descent/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "descent/errors.hpp"
#include "descent/problem.hpp"
#include "descent/vec.hpp"
#include "linalg.hpp"

namespace descent {

std::vector<double> newton_schulz(std::span<const double> m, std::int64_t rows,
                                  std::int64_t cols, std::int64_t iters) {
    if (iters < 1) throw ConfigError("newton_schulz: iters must be >= 1");
    if (!all_finite(m)) throw NumericError("newton_schulz: non-finite input");
    const double fnorm = l2_norm(m);
    if (fnorm == 0.0) return std::vector<double>(m.begin(), m.end());

    std::vector<double> x(m.begin(), m.end());
    for (double& v : x) v /= fnorm;
    for (std::int64_t it = 0; it < iters; ++it) {
        // X <- 1.5 X - 0.5 X (X'X)
        std::vector<double> gram(static_cast<std::size_t>(cols * cols), 0.0);
        for (std::int64_t i = 0; i < cols; ++i) {
            for (std::int64_t j = 0; j < cols; ++j) {
                double acc = 0.0;
                for (std::int64_t k = 0; k < rows; ++k) acc += x[k * cols + i] * x[k * cols + j];
                gram[i * cols + j] = acc;
            }
        }
        std::vector<double> xg = linalg::matmul(x, gram, rows, cols, cols);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.5 * x[i] - 0.5 * xg[i];
    }
    return x;
}

std::vector<double> hutchinson_probe_estimate(const HvpFn& hvp,
                                              std::span<const double> u) {
    std::vector<double> hu = hvp(u);
    for (std::size_t i = 0; i < hu.size(); ++i) hu[i] *= u[i];
    return hu;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined words
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> rademacher_vector(std::size_t dim, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::vector<double> u(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        u[i] = (engine() & 1ULL) ? 1.0 : -1.0;
    }
    return u;
}

std::vector<double> hutchinson_diag(const HvpFn& hvp, std::size_t dim,
                                    std::int64_t samples, std::uint64_t seed) {
    if (samples < 1) throw ConfigError("hutchinson: samples must be >= 1");
    std::vector<double> estimate(dim, 0.0);
    for (std::int64_t s = 0; s < samples; ++s) {
        const std::vector<double> u =
            rademacher_vector(dim, mix_seed(seed, static_cast<std::uint64_t>(s)));
        const std::vector<double> term = hutchinson_probe_estimate(hvp, u);
        for (std::size_t i = 0; i < dim; ++i) estimate[i] += term[i];
    }
    const double inv = 1.0 / static_cast<double>(samples);
    for (double& v : estimate) v *= inv;
    return estimate;
}

std::vector<double> hutchinson_diag(const Problem& problem, const ParameterSet& w,
                                    std::int64_t samples, std::uint64_t seed) {
    HvpFn hvp = [&](std::span<const double> u) {
        if (problem.has_hvp()) return problem.hvp(w, u);
        return fd_hvp(problem, w, u);
    };
    return hutchinson_diag(hvp, w.values.size(), samples, seed);
}

std::vector<double> clip_symmetric(std::span<const double> z, double tau) {
    if (!(tau > 0.0)) throw ConfigError("clip_symmetric: tau must be > 0");
    std::vector<double> out(z.begin(), z.end());
    for (double& v : out) v = std::max(std::min(v, tau), -tau);
    return out;
}

void adaptive_grad_clip_rows(std::span<double> g, std::span<const double> w,
                             std::int64_t rows, std::int64_t cols, double tau,
                             double eps_c) {
    if (!(tau > 0.0) || !(eps_c > 0.0))
        throw ConfigError("adaptive_grad_clip: tau and eps_c must be > 0");
    for (std::int64_t r = 0; r < rows; ++r) {
        auto grow = g.subspan(static_cast<std::size_t>(r * cols),
                              static_cast<std::size_t>(cols));
        auto wrow = w.subspan(static_cast<std::size_t>(r * cols),
                              static_cast<std::size_t>(cols));
        const double gnorm = l2_norm(grow);
        const double wnorm = std::max(l2_norm(wrow), eps_c);
        if (gnorm > tau * wnorm) {
            const double scale = tau * wnorm / gnorm;
            for (double& v : grow) v *= scale;
        }
    }
}

void gradient_centralize(std::span<double> g) {
    if (g.empty()) throw ConfigError("gradient_centralize: empty tensor");
    const double m = mean(g);
    for (double& v : g) v -= m;
}

FactoredSecondMoment zero_factored(std::int64_t rows, std::int64_t cols) {
    return FactoredSecondMoment{std::vector<double>(static_cast<std::size_t>(rows), 0.0),
                                std::vector<double>(static_cast<std::size_t>(cols), 0.0)};
}

std::vector<double> factored_update(FactoredSecondMoment& state, std::span<const double> g,
                                    std::int64_t rows, std::int64_t cols, std::int64_t t,
                                    double eps1, double decay_exp) {
    if (t < 1) throw ConfigError("factored_update: t must be >= 1");
    const double beta = 1.0 - std::pow(static_cast<double>(t), -decay_exp);
    // row/column sums of G^2 + eps1
    for (std::int64_t r = 0; r < rows; ++r) {
        double acc = 0.0;
        for (std::int64_t c = 0; c < cols; ++c) {
            const double gg = g[r * cols + c];
            acc += gg * gg + eps1;
        }
        state.row[r] = beta * state.row[r] + (1.0 - beta) * acc;
    }
    for (std::int64_t c = 0; c < cols; ++c) {
        double acc = 0.0;
        for (std::int64_t r = 0; r < rows; ++r) {
            const double gg = g[r * cols + c];
            acc += gg * gg + eps1;
        }
        state.col[c] = beta * state.col[c] + (1.0 - beta) * acc;
    }
    double row_total = 0.0;
    for (double v : state.row) row_total += v;
    if (!(row_total > 0.0))
        throw NumericError("factored_update: zero row-factor total");
    std::vector<double> vhat(static_cast<std::size_t>(rows * cols), 0.0);
    for (std::int64_t r = 0; r < rows; ++r)
        for (std::int64_t c = 0; c < cols; ++c)
            vhat[r * cols + c] = state.row[r] * state.col[c] / row_total;
    return vhat;
}

}  // namespace descent
