#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace descent {

// Element-wise helpers shared by the steppers. All loops run in layout
// order so runs are bit-reproducible on one platform.

inline bool all_finite(std::span<const double> xs) {
    for (double x : xs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

inline double l2_norm(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x * x;
    return std::sqrt(acc);
}

inline double linf_norm(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc = std::max(acc, std::abs(x));
    return acc;
}

inline double mean(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

// Root of the mean of squares over the span.
inline double rms(std::span<const double> xs) {
    if (xs.empty()) return 0.0;
    double acc = 0.0;
    for (double x : xs) acc += x * x;
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

inline double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace descent
