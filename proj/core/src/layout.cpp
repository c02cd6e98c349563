#include "descent/layout.hpp"

#include <algorithm>
#include <unordered_set>

#include "descent/errors.hpp"
#include "descent/vec.hpp"

namespace descent {

const char* to_string(TensorKind kind) {
    switch (kind) {
        case TensorKind::matrix2d: return "matrix2d";
        case TensorKind::vector: return "vector";
        case TensorKind::scalar: return "scalar";
    }
    return "?";
}

ParameterLayout::ParameterLayout(std::vector<TensorEntry> entries)
    : entries_(std::move(entries)) {
    if (entries_.empty()) throw ConfigError("layout: at least one tensor required");
    std::unordered_set<std::string> seen;
    offsets_.reserve(entries_.size());
    sizes_.reserve(entries_.size());
    for (const TensorEntry& entry : entries_) {
        if (entry.name.empty()) throw ConfigError("layout: empty tensor name");
        if (!seen.insert(entry.name).second)
            throw ConfigError("layout: duplicate tensor name '" + entry.name + "'");
        if (entry.shape.empty())
            throw ConfigError("layout: tensor '" + entry.name + "' has empty shape");
        std::size_t count = 1;
        for (std::int64_t dim : entry.shape) {
            if (dim < 1)
                throw ConfigError("layout: tensor '" + entry.name + "' has dim < 1");
            count *= static_cast<std::size_t>(dim);
        }
        if (entry.kind == TensorKind::matrix2d && entry.shape.size() != 2)
            throw ConfigError("layout: matrix2d tensor '" + entry.name +
                              "' must have exactly 2 dims");
        if (entry.kind == TensorKind::scalar && count != 1)
            throw ConfigError("layout: scalar tensor '" + entry.name +
                              "' must have a single element");
        offsets_.push_back(total_);
        sizes_.push_back(count);
        total_ += count;
    }
}

std::pair<std::int64_t, std::int64_t> ParameterLayout::matrix_dims(std::size_t i) const {
    const TensorEntry& entry = entries_[i];
    if (entry.kind == TensorKind::matrix2d)
        return {entry.shape[0], entry.shape[1]};
    return {1, static_cast<std::int64_t>(sizes_[i])};
}

std::span<double> ParameterLayout::tensor_span(std::vector<double>& flat,
                                               std::size_t i) const {
    return std::span<double>(flat).subspan(offsets_[i], sizes_[i]);
}

std::span<const double> ParameterLayout::tensor_span(std::span<const double> flat,
                                                     std::size_t i) const {
    return flat.subspan(offsets_[i], sizes_[i]);
}

LayoutPtr single_tensor_layout(std::string name, std::vector<std::int64_t> shape,
                               TensorKind kind) {
    std::vector<TensorEntry> entries;
    entries.push_back(TensorEntry{std::move(name), std::move(shape), kind});
    return std::make_shared<const ParameterLayout>(std::move(entries));
}

LayoutPtr make_layout(std::vector<TensorEntry> entries) {
    return std::make_shared<const ParameterLayout>(std::move(entries));
}

ParameterSet make_params(LayoutPtr layout, std::vector<double> values) {
    if (!layout) throw ConfigError("params: null layout");
    if (values.size() != layout->size())
        throw ConfigError("params: value count does not match layout size");
    return ParameterSet{std::move(layout), std::move(values)};
}

ParameterSet fill_params(LayoutPtr layout, double value) {
    if (!layout) throw ConfigError("params: null layout");
    std::vector<double> values(layout->size(), value);
    return ParameterSet{std::move(layout), std::move(values)};
}

const std::vector<double>& layout_flatten(const ParameterSet& params) {
    return params.values;
}

ParameterSet layout_flatten(LayoutPtr layout, const NamedTensors& tensors) {
    if (!layout) throw ConfigError("flatten: null layout");
    if (tensors.size() != layout->tensor_count())
        throw ConfigError("flatten: tensor count does not match layout");
    std::vector<double> values(layout->size(), 0.0);
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        const auto& [name, data] = tensors[i];
        if (name != layout->entry(i).name)
            throw ConfigError("flatten: tensor order mismatch at '" + name + "'");
        if (data.size() != layout->tensor_size(i))
            throw ConfigError("flatten: size mismatch for tensor '" + name + "'");
        std::copy(data.begin(), data.end(), values.begin() + static_cast<std::ptrdiff_t>(layout->offset(i)));
    }
    return ParameterSet{std::move(layout), std::move(values)};
}

NamedTensors layout_unflatten(const ParameterSet& params) {
    NamedTensors out;
    const ParameterLayout& layout = *params.layout;
    out.reserve(layout.tensor_count());
    for (std::size_t i = 0; i < layout.tensor_count(); ++i) {
        auto span = layout.tensor_span(std::span<const double>(params.values), i);
        out.emplace_back(layout.entry(i).name,
                         std::vector<double>(span.begin(), span.end()));
    }
    return out;
}

}  // namespace descent
