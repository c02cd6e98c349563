#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace descent::linalg {

std::vector<double> matmul(std::span<const double> a, std::span<const double> b,
                           std::int64_t n, std::int64_t k, std::int64_t m) {
    std::vector<double> c(static_cast<std::size_t>(n * m), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t l = 0; l < k; ++l) {
            const double ail = a[i * k + l];
            if (ail == 0.0) continue;
            for (std::int64_t j = 0; j < m; ++j) {
                c[i * m + j] += ail * b[l * m + j];
            }
        }
    }
    return c;
}

std::vector<double> matvec(std::span<const double> a, std::span<const double> x,
                           std::int64_t n) {
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::int64_t j = 0; j < n; ++j) acc += a[i * n + j] * x[j];
        y[i] = acc;
    }
    return y;
}

bool cholesky(std::span<const double> a, std::int64_t n, std::vector<double>& lower) {
    lower.assign(static_cast<std::size_t>(n * n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        for (std::int64_t j = 0; j <= i; ++j) {
            double sum = a[i * n + j];
            for (std::int64_t k = 0; k < j; ++k) sum -= lower[i * n + k] * lower[j * n + k];
            if (i == j) {
                if (sum <= 0.0 || !std::isfinite(sum)) return false;
                lower[i * n + j] = std::sqrt(sum);
            } else {
                lower[i * n + j] = sum / lower[j * n + j];
            }
        }
    }
    return true;
}

std::vector<double> cholesky_solve(std::span<const double> lower, std::span<const double> b,
                                   std::int64_t n) {
    // forward substitution L y = b
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = 0; i < n; ++i) {
        double sum = b[i];
        for (std::int64_t j = 0; j < i; ++j) sum -= lower[i * n + j] * y[j];
        y[i] = sum / lower[i * n + i];
    }
    // back substitution L' x = y
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t i = n - 1; i >= 0; --i) {
        double sum = y[i];
        for (std::int64_t j = i + 1; j < n; ++j) sum -= lower[j * n + i] * x[j];
        x[i] = sum / lower[i * n + i];
    }
    return x;
}

std::vector<double> symmetric_eigenvalues(std::span<const double> a, std::int64_t n) {
    std::vector<double> m(a.begin(), a.end());
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::int64_t p = 0; p < n; ++p)
            for (std::int64_t q = p + 1; q < n; ++q) off += m[p * n + q] * m[p * n + q];
        if (off < 1e-28) break;
        for (std::int64_t p = 0; p < n; ++p) {
            for (std::int64_t q = p + 1; q < n; ++q) {
                const double apq = m[p * n + q];
                if (std::abs(apq) < 1e-300) continue;
                const double app = m[p * n + p];
                const double aqq = m[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::int64_t k = 0; k < n; ++k) {
                    const double mkp = m[k * n + p];
                    const double mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for (std::int64_t k = 0; k < n; ++k) {
                    const double mpk = m[p * n + k];
                    const double mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) eig[i] = m[i * n + i];
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

std::vector<double> singular_values(std::span<const double> a, std::int64_t n,
                                    std::int64_t m) {
    // Gram matrix A'A (m x m)
    std::vector<double> gram(static_cast<std::size_t>(m * m), 0.0);
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t j = 0; j < m; ++j) {
            double acc = 0.0;
            for (std::int64_t k = 0; k < n; ++k) acc += a[k * m + i] * a[k * m + j];
            gram[i * m + j] = acc;
        }
    }
    std::vector<double> eig = symmetric_eigenvalues(gram, m);
    for (double& e : eig) e = std::sqrt(std::max(0.0, e));
    return eig;
}

}  // namespace descent::linalg
