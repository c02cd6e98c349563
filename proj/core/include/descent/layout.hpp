#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace descent {

// How a tensor participates in structure-aware optimizers: matrix2d rows
// feed per-row clipping and orthogonalized updates, vectors and scalars
// take the dense paths.
enum class TensorKind { matrix2d, vector, scalar };

const char* to_string(TensorKind kind);

struct TensorEntry {
    std::string name;
    std::vector<std::int64_t> shape;
    TensorKind kind = TensorKind::vector;
};

// Ordered, named, shaped view over a flat weight vector. Immutable after
// construction; shared between parameter sets, gradients, and states.
class ParameterLayout {
public:
    explicit ParameterLayout(std::vector<TensorEntry> entries);

    std::size_t tensor_count() const { return entries_.size(); }
    const TensorEntry& entry(std::size_t i) const { return entries_[i]; }
    std::size_t offset(std::size_t i) const { return offsets_[i]; }
    std::size_t tensor_size(std::size_t i) const { return sizes_[i]; }
    std::size_t size() const { return total_; }

    // Rows/cols of tensor i when treated as a matrix; vectors are 1 x n,
    // scalars 1 x 1.
    std::pair<std::int64_t, std::int64_t> matrix_dims(std::size_t i) const;

    std::span<double> tensor_span(std::vector<double>& flat, std::size_t i) const;
    std::span<const double> tensor_span(std::span<const double> flat, std::size_t i) const;

private:
    std::vector<TensorEntry> entries_;
    std::vector<std::size_t> offsets_;
    std::vector<std::size_t> sizes_;
    std::size_t total_ = 0;
};

using LayoutPtr = std::shared_ptr<const ParameterLayout>;

// Single-tensor layout, the common case for the analytic test problems.
LayoutPtr single_tensor_layout(std::string name, std::vector<std::int64_t> shape,
                               TensorKind kind);
LayoutPtr make_layout(std::vector<TensorEntry> entries);

// The weights: a flat 64-bit float vector in layout order.
struct ParameterSet {
    LayoutPtr layout;
    std::vector<double> values;
};

ParameterSet make_params(LayoutPtr layout, std::vector<double> values);
ParameterSet fill_params(LayoutPtr layout, double value);

// Loss and gradient at one evaluation point, aligned to the layout.
struct GradientEvaluation {
    double loss = 0.0;
    std::vector<double> gradient;
    std::optional<std::int64_t> batch_id;
};

using NamedTensors = std::vector<std::pair<std::string, std::vector<double>>>;

// Flat view of a parameter set; the inverse of layout_unflatten.
const std::vector<double>& layout_flatten(const ParameterSet& params);
ParameterSet layout_flatten(LayoutPtr layout, const NamedTensors& tensors);
NamedTensors layout_unflatten(const ParameterSet& params);

}  // namespace descent
