#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace turnid::testing {

using Matrix = std::vector<std::vector<double>>;

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // vectors[k] pairs with values[k]
};

/// Cyclic Jacobi rotations on a symmetric matrix.
EigenPairs jacobi_eigen(Matrix a, double tol = 1e-15, int max_sweeps = 100);

/// Sample covariance with denominator N - 1.
Matrix covariance(std::span<const std::vector<double>> rows);

/// Orthonormal Haar analysis matrix for length m (a power of two): row 0 is the
/// scaling function, then wavelets from coarsest to finest, left to right.
Matrix haar_matrix(std::size_t m);

std::vector<double> mat_vec(const Matrix& m, std::span<const double> x);

/// P(X <= k) for X ~ Binomial(n, p).
double binomial_cdf(std::size_t k, std::size_t n, double p);

/// Smallest and largest success counts of the central (1 - alpha) interval of Binomial(n, p).
std::pair<std::size_t, std::size_t> binomial_interval(std::size_t n, double p, double alpha);

/// Central finite-difference gradient.
std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double h);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace turnid::testing
