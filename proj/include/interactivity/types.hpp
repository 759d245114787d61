#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace interactivity {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// All randomness in the project flows through seeded mt19937_64 streams;
// no wall-clock entropy anywhere.
using Rng = std::mt19937_64;

inline Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, double scale, Rng& rng) {
  std::normal_distribution<double> dist(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = dist(rng);
  return m;
}

inline Vector gaussian_vector(Eigen::Index n, double scale, Rng& rng) {
  return gaussian_matrix(n, 1, scale, rng).col(0);
}

}  // namespace interactivity
