#pragma once

// Small dense helpers for the desk-scale matrices used by the problems,
// kernels, and verification oracles. Row-major storage throughout.

#include <cstdint>
#include <span>
#include <vector>

namespace descent::linalg {

// C = A (n x k) * B (k x m)
std::vector<double> matmul(std::span<const double> a, std::span<const double> b,
                           std::int64_t n, std::int64_t k, std::int64_t m);

// y = A (n x n) * x
std::vector<double> matvec(std::span<const double> a, std::span<const double> x,
                           std::int64_t n);

// Lower-triangular Cholesky factor of a symmetric matrix; returns false
// when the matrix is not positive definite.
bool cholesky(std::span<const double> a, std::int64_t n, std::vector<double>& lower);

// Solves A x = b given the Cholesky factor of A.
std::vector<double> cholesky_solve(std::span<const double> lower, std::span<const double> b,
                                   std::int64_t n);

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations; used as a
// brute-force oracle for singular values (via A'A).
std::vector<double> symmetric_eigenvalues(std::span<const double> a, std::int64_t n);

// Singular values of an n x m matrix as sqrt of the eigenvalues of A'A,
// descending order.
std::vector<double> singular_values(std::span<const double> a, std::int64_t n,
                                    std::int64_t m);

}  // namespace descent::linalg
