#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "descent/layout.hpp"

namespace descent {

// An objective with exact gradients. Evaluation is deterministic given
// (w, batch, construction seed); batch == nullopt means the full data.
class Problem {
public:
    virtual ~Problem() = default;

    const std::string& name() const { return name_; }
    const LayoutPtr& layout() const { return layout_; }
    std::size_t dimension() const { return layout_->size(); }

    virtual GradientEvaluation evaluate(const ParameterSet& w,
                                        std::optional<std::int64_t> batch = {}) const = 0;

    virtual bool has_hessian_diag() const { return false; }
    virtual std::vector<double> hessian_diag(const ParameterSet& w) const;

    virtual bool has_hvp() const { return false; }
    virtual std::vector<double> hvp(const ParameterSet& w, std::span<const double> dir,
                                    std::optional<std::int64_t> batch = {}) const;

protected:
    Problem(std::string name, LayoutPtr layout);

private:
    std::string name_;
    LayoutPtr layout_;
};

using ProblemPtr = std::shared_ptr<const Problem>;

// L(w) = 0.5 w'Aw - b'w with A symmetric positive definite (checked by a
// Cholesky factorization); exact gradient, Hessian diagonal, and
// Hessian-vector products; minimizer solves Aw = b.
class QuadraticProblem : public Problem {
public:
    // a is n x n row-major.
    QuadraticProblem(std::vector<double> a, std::vector<double> b,
                     LayoutPtr layout = nullptr);

    GradientEvaluation evaluate(const ParameterSet& w,
                                std::optional<std::int64_t> batch = {}) const override;
    bool has_hessian_diag() const override { return true; }
    std::vector<double> hessian_diag(const ParameterSet& w) const override;
    bool has_hvp() const override { return true; }
    std::vector<double> hvp(const ParameterSet& w, std::span<const double> dir,
                            std::optional<std::int64_t> batch = {}) const override;

    const std::vector<double>& minimizer() const { return minimizer_; }
    const std::vector<double>& matrix() const { return a_; }

protected:
    std::vector<double> matvec(std::span<const double> x) const;

private:
    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<double> minimizer_;
    std::size_t n_ = 0;
};

ProblemPtr quadratic_problem(std::vector<double> a, std::vector<double> b,
                             LayoutPtr layout = nullptr);

// Same quadratic, but evaluate() adds zero-mean seeded Gaussian noise of
// scale noise_scale to each gradient coordinate; the noise depends only on
// (seed, batch). noise_scale = 0 reduces to the exact quadratic. Loss and
// hvp stay exact.
ProblemPtr noisy_quadratic_problem(std::vector<double> a, std::vector<double> b,
                                   double noise_scale, std::uint64_t seed,
                                   LayoutPtr layout = nullptr);

// Classic Rosenbrock in n dimensions (n even, >= 2); global minimum at the
// all-ones point with loss 0.
ProblemPtr rosenbrock_problem(std::int64_t n);

// Binary-labelled rows with a common feature dimension.
struct DatasetTable {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    std::int64_t feature_dim = 0;
};

// Comma-separated, one row per sample, final column must be 0 or 1; an
// optional non-numeric header row is skipped. Throws ConfigError naming
// the offending row.
DatasetTable load_csv_dataset(const std::string& path);

// Mean binary cross-entropy of a linear model plus (l2/2)*||w||^2.
// batch_size = 0 evaluates the full dataset; otherwise batches are drawn
// without replacement from a per-epoch permutation seeded by (seed, epoch).
ProblemPtr logistic_problem(DatasetTable data, double l2, std::int64_t batch_size = 0,
                            std::uint64_t seed = 0);

// Central differences, step h*max(1, |w_i|) per coordinate.
std::vector<double> fd_gradient(const Problem& problem, const ParameterSet& w,
                                double h = 1e-5, std::optional<std::int64_t> batch = {});

// (grad(w + r*u) - grad(w - r*u)) / (2r).
std::vector<double> fd_hvp(const Problem& problem, const ParameterSet& w,
                           std::span<const double> u, double r = 1e-5,
                           std::optional<std::int64_t> batch = {});

}  // namespace descent
