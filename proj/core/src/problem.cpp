#include "descent/problem.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "descent/errors.hpp"
#include "descent/kernels.hpp"
#include "descent/vec.hpp"
#include "linalg.hpp"

namespace descent {

Problem::Problem(std::string name, LayoutPtr layout)
    : name_(std::move(name)), layout_(std::move(layout)) {
    if (!layout_) throw ConfigError("problem: null layout");
}

std::vector<double> Problem::hessian_diag(const ParameterSet&) const {
    throw ConfigError("problem '" + name_ + "' has no exact Hessian diagonal");
}

std::vector<double> Problem::hvp(const ParameterSet&, std::span<const double>,
                                 std::optional<std::int64_t>) const {
    throw ConfigError("problem '" + name_ + "' has no exact Hessian-vector product");
}

namespace {

LayoutPtr default_vector_layout(std::size_t n) {
    return single_tensor_layout("w", {static_cast<std::int64_t>(n)}, TensorKind::vector);
}

void check_layout_size(const LayoutPtr& layout, std::size_t n, const char* what) {
    if (layout->size() != n)
        throw ConfigError(std::string(what) + ": layout size does not match dimension");
}

}  // namespace

QuadraticProblem::QuadraticProblem(std::vector<double> a, std::vector<double> b,
                                   LayoutPtr layout)
    : Problem("quadratic", layout ? layout : default_vector_layout(b.size())),
      a_(std::move(a)),
      b_(std::move(b)),
      n_(b_.size()) {
    if (a_.size() != n_ * n_) throw ConfigError("quadratic: A must be n x n");
    check_layout_size(this->layout(), n_, "quadratic");
    std::vector<double> lower;
    if (!linalg::cholesky(a_, static_cast<std::int64_t>(n_), lower))
        throw ConfigError("quadratic: A is not symmetric positive definite");
    minimizer_ = linalg::cholesky_solve(lower, b_, static_cast<std::int64_t>(n_));
}

std::vector<double> QuadraticProblem::matvec(std::span<const double> x) const {
    return linalg::matvec(a_, x, static_cast<std::int64_t>(n_));
}

GradientEvaluation QuadraticProblem::evaluate(const ParameterSet& w,
                                              std::optional<std::int64_t> batch) const {
    std::vector<double> aw = matvec(w.values);
    double loss = 0.5 * dot(w.values, aw) - dot(b_, w.values);
    std::vector<double> grad(n_);
    for (std::size_t i = 0; i < n_; ++i) grad[i] = aw[i] - b_[i];
    return GradientEvaluation{loss, std::move(grad), batch};
}

std::vector<double> QuadraticProblem::hessian_diag(const ParameterSet&) const {
    std::vector<double> diag(n_);
    for (std::size_t i = 0; i < n_; ++i) diag[i] = a_[i * n_ + i];
    return diag;
}

std::vector<double> QuadraticProblem::hvp(const ParameterSet&, std::span<const double> dir,
                                          std::optional<std::int64_t>) const {
    return matvec(dir);
}

ProblemPtr quadratic_problem(std::vector<double> a, std::vector<double> b,
                             LayoutPtr layout) {
    return std::make_shared<QuadraticProblem>(std::move(a), std::move(b), std::move(layout));
}

namespace {

// Quadratic whose gradient is perturbed by seeded Gaussian noise keyed on
// the batch id; the full-batch evaluation (no batch) stays exact.
class NoisyQuadraticProblem final : public QuadraticProblem {
public:
    NoisyQuadraticProblem(std::vector<double> a, std::vector<double> b,
                          double noise_scale, std::uint64_t seed, LayoutPtr layout)
        : QuadraticProblem(std::move(a), std::move(b), std::move(layout)),
          noise_scale_(noise_scale),
          seed_(seed) {
        if (noise_scale_ < 0.0) throw ConfigError("noisy_quadratic: noise_scale >= 0");
    }

    GradientEvaluation evaluate(const ParameterSet& w,
                                std::optional<std::int64_t> batch) const override {
        GradientEvaluation eval = QuadraticProblem::evaluate(w, batch);
        if (noise_scale_ > 0.0 && batch.has_value()) {
            std::mt19937_64 engine(mix_seed(seed_, static_cast<std::uint64_t>(*batch)));
            std::normal_distribution<double> normal(0.0, noise_scale_);
            for (double& g : eval.gradient) g += normal(engine);
        }
        return eval;
    }

private:
    double noise_scale_;
    std::uint64_t seed_;
};

}  // namespace

ProblemPtr noisy_quadratic_problem(std::vector<double> a, std::vector<double> b,
                                   double noise_scale, std::uint64_t seed,
                                   LayoutPtr layout) {
    return std::make_shared<NoisyQuadraticProblem>(std::move(a), std::move(b), noise_scale,
                                                   seed, std::move(layout));
}

namespace {

// Uncoupled two-dimensional Rosenbrock terms over consecutive pairs:
// sum of 100(w2 - w1^2)^2 + (1 - w1)^2.
class RosenbrockProblem final : public Problem {
public:
    explicit RosenbrockProblem(std::int64_t n)
        : Problem("rosenbrock", default_vector_layout(static_cast<std::size_t>(n))),
          n_(n) {
        if (n < 2 || n % 2 != 0)
            throw ConfigError("rosenbrock: dimension must be even and >= 2");
    }

    GradientEvaluation evaluate(const ParameterSet& w,
                                std::optional<std::int64_t> batch) const override {
        double loss = 0.0;
        std::vector<double> grad(static_cast<std::size_t>(n_), 0.0);
        for (std::int64_t i = 0; i < n_; i += 2) {
            const double a = w.values[i];
            const double b = w.values[i + 1];
            const double q = b - a * a;
            loss += 100.0 * q * q + (1.0 - a) * (1.0 - a);
            grad[i] = -400.0 * a * q - 2.0 * (1.0 - a);
            grad[i + 1] = 200.0 * q;
        }
        return GradientEvaluation{loss, std::move(grad), batch};
    }

    bool has_hessian_diag() const override { return true; }
    std::vector<double> hessian_diag(const ParameterSet& w) const override {
        std::vector<double> diag(static_cast<std::size_t>(n_), 0.0);
        for (std::int64_t i = 0; i < n_; i += 2) {
            const double a = w.values[i];
            const double b = w.values[i + 1];
            diag[i] = -400.0 * (b - 3.0 * a * a) + 2.0;
            diag[i + 1] = 200.0;
        }
        return diag;
    }

    bool has_hvp() const override { return true; }
    std::vector<double> hvp(const ParameterSet& w, std::span<const double> dir,
                            std::optional<std::int64_t>) const override {
        std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
        for (std::int64_t i = 0; i < n_; i += 2) {
            const double a = w.values[i];
            const double b = w.values[i + 1];
            const double haa = -400.0 * (b - 3.0 * a * a) + 2.0;
            const double hab = -400.0 * a;
            out[i] = haa * dir[i] + hab * dir[i + 1];
            out[i + 1] = hab * dir[i] + 200.0 * dir[i + 1];
        }
        return out;
    }

private:
    std::int64_t n_;
};

}  // namespace

ProblemPtr rosenbrock_problem(std::int64_t n) {
    return std::make_shared<RosenbrockProblem>(n);
}

DatasetTable load_csv_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open '" + path + "'");
    DatasetTable table;
    std::string line;
    std::int64_t row_number = 0;
    while (std::getline(in, line)) {
        ++row_number;
        if (line.empty()) continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                double value = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                fields.push_back(value);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (row_number == 1) continue;  // header row
            throw ConfigError("csv: non-numeric value at row " + std::to_string(row_number));
        }
        if (fields.size() < 2)
            throw ConfigError("csv: row " + std::to_string(row_number) +
                              " needs at least one feature and a label");
        const double label = fields.back();
        fields.pop_back();
        if (label != 0.0 && label != 1.0)
            throw ConfigError("csv: label must be 0 or 1 at row " + std::to_string(row_number));
        if (table.feature_dim == 0) {
            table.feature_dim = static_cast<std::int64_t>(fields.size());
        } else if (static_cast<std::int64_t>(fields.size()) != table.feature_dim) {
            throw ConfigError("csv: inconsistent column count at row " +
                              std::to_string(row_number));
        }
        table.features.push_back(std::move(fields));
        table.labels.push_back(label == 1.0 ? 1 : 0);
    }
    if (table.features.empty()) throw ConfigError("csv: dataset '" + path + "' is empty");
    return table;
}

namespace {

// Mean binary cross-entropy of a linear model in the log-sum-exp form,
// plus an L2 ridge term. Mini-batches come from a per-epoch permutation.
class LogisticProblem final : public Problem {
public:
    LogisticProblem(DatasetTable data, double l2, std::int64_t batch_size,
                    std::uint64_t seed)
        : Problem("logistic",
                  default_vector_layout(static_cast<std::size_t>(data.feature_dim))),
          data_(std::move(data)),
          l2_(l2),
          batch_size_(batch_size),
          seed_(seed) {
        if (l2_ < 0.0) throw ConfigError("logistic: l2 must be >= 0");
        if (batch_size_ < 0) throw ConfigError("logistic: batch_size must be >= 0");
    }

    GradientEvaluation evaluate(const ParameterSet& w,
                                std::optional<std::int64_t> batch) const override {
        std::vector<std::size_t> rows = select_rows(batch);
        const std::size_t d = dimension();
        double loss = 0.0;
        std::vector<double> grad(d, 0.0);
        for (std::size_t r : rows) {
            const std::vector<double>& x = data_.features[r];
            const double y = static_cast<double>(data_.labels[r]);
            const double z = dot(x, w.values);
            // log(1 + e^z) - y z, computed without overflow
            loss += std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double coef = p - y;
            for (std::size_t i = 0; i < d; ++i) grad[i] += coef * x[i];
        }
        const double inv = 1.0 / static_cast<double>(rows.size());
        loss *= inv;
        for (std::size_t i = 0; i < d; ++i)
            grad[i] = grad[i] * inv + l2_ * w.values[i];
        loss += 0.5 * l2_ * dot(w.values, w.values);
        return GradientEvaluation{loss, std::move(grad), batch};
    }

private:
    std::vector<std::size_t> select_rows(std::optional<std::int64_t> batch) const {
        const std::size_t n = data_.features.size();
        std::vector<std::size_t> rows(n);
        std::iota(rows.begin(), rows.end(), std::size_t{0});
        if (!batch.has_value() || batch_size_ == 0 ||
            batch_size_ >= static_cast<std::int64_t>(n)) {
            return rows;
        }
        const std::int64_t per_epoch =
            (static_cast<std::int64_t>(n) + batch_size_ - 1) / batch_size_;
        const std::int64_t index = *batch >= 1 ? *batch - 1 : 0;
        const std::uint64_t epoch = static_cast<std::uint64_t>(index / per_epoch);
        const std::int64_t slot = index % per_epoch;
        std::mt19937_64 engine(mix_seed(seed_, epoch));
        std::shuffle(rows.begin(), rows.end(), engine);
        const std::size_t begin = static_cast<std::size_t>(slot * batch_size_);
        const std::size_t end = std::min(n, begin + static_cast<std::size_t>(batch_size_));
        return std::vector<std::size_t>(rows.begin() + static_cast<std::ptrdiff_t>(begin),
                                        rows.begin() + static_cast<std::ptrdiff_t>(end));
    }

    DatasetTable data_;
    double l2_;
    std::int64_t batch_size_;
    std::uint64_t seed_;
};

}  // namespace

ProblemPtr logistic_problem(DatasetTable data, double l2, std::int64_t batch_size,
                            std::uint64_t seed) {
    return std::make_shared<LogisticProblem>(std::move(data), l2, batch_size, seed);
}

std::vector<double> fd_gradient(const Problem& problem, const ParameterSet& w, double h,
                                std::optional<std::int64_t> batch) {
    if (!(h > 0.0)) throw ConfigError("fd_gradient: h must be > 0");
    const std::size_t n = w.values.size();
    std::vector<double> grad(n, 0.0);
    ParameterSet probe = w;
    for (std::size_t i = 0; i < n; ++i) {
        const double hi = h * std::max(1.0, std::abs(w.values[i]));
        probe.values[i] = w.values[i] + hi;
        const double up = problem.evaluate(probe, batch).loss;
        probe.values[i] = w.values[i] - hi;
        const double down = problem.evaluate(probe, batch).loss;
        probe.values[i] = w.values[i];
        grad[i] = (up - down) / (2.0 * hi);
    }
    return grad;
}

std::vector<double> fd_hvp(const Problem& problem, const ParameterSet& w,
                           std::span<const double> u, double r,
                           std::optional<std::int64_t> batch) {
    if (!(r > 0.0)) throw ConfigError("fd_hvp: r must be > 0");
    const std::size_t n = w.values.size();
    ParameterSet plus = w;
    ParameterSet minus = w;
    for (std::size_t i = 0; i < n; ++i) {
        plus.values[i] += r * u[i];
        minus.values[i] -= r * u[i];
    }
    const std::vector<double> gp = problem.evaluate(plus, batch).gradient;
    const std::vector<double> gm = problem.evaluate(minus, batch).gradient;
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i] = (gp[i] - gm[i]) / (2.0 * r);
    return out;
}

}  // namespace descent
