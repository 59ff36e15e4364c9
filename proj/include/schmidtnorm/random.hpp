#pragma once

// Random states and operators. Every generator takes the engine explicitly;
// there is no global RNG.

#include "schmidtnorm/core.hpp"

#include <random>

namespace schmidtnorm {

using Rng = std::mt19937_64;

/// Engine for the i-th independent stream derived from a user seed.
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline Matrix gaussian_matrix(Index rows, Index cols, Rng& rng) {
  std::normal_distribution<double> normal;
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = Complex(normal(rng), normal(rng));
  return g;
}

/// Haar-random isometry with orthonormal columns (QR of a Gaussian matrix,
/// phases fixed by the diagonal of R).
inline Matrix random_isometry(Index rows, Index cols, Rng& rng) {
  const Matrix g = gaussian_matrix(rows, cols, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < cols; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Matrix random_unitary(Index dim, Rng& rng) { return random_isometry(dim, dim, rng); }

inline PureState random_state(BipartiteDims dims, Rng& rng) {
  return PureState::normalized(gaussian_matrix(dims.total(), 1, rng).col(0), dims);
}

/// Uniform point on the probability simplex of the given size.
inline RealVector random_simplex_point(Index size, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  RealVector p(size);
  for (Index i = 0; i < size; ++i) p(i) = expo(rng);
  return p / p.sum();
}

/// State of Schmidt rank <= k: random local frames with square-rooted
/// simplex weights as coefficients.
inline Vector random_schmidt_rank_vector(BipartiteDims dims, int k, Rng& rng) {
  check_schmidt_index(dims, k);
  const Matrix left = random_isometry(dims.n, k, rng);
  const Matrix right = random_isometry(dims.m, k, rng);
  const RealVector coeff = random_simplex_point(k, rng).cwiseSqrt();
  const Matrix a = left * coeff.cast<Complex>().asDiagonal() * right.transpose();
  Vector v = operator_to_vec(a);
  return v / v.norm();
}

inline PureState random_schmidt_rank_state(BipartiteDims dims, int k, Rng& rng) {
  return PureState(random_schmidt_rank_vector(dims, k, rng), dims);
}

/// GUE-like Hermitian matrix.
inline BipartiteOperator random_hermitian(BipartiteDims dims, Rng& rng) {
  const Matrix g = gaussian_matrix(dims.total(), dims.total(), rng);
  return {Matrix(0.5 * (g + g.adjoint())), dims};
}

/// Hermitian operator with the given spectrum in a Haar-random eigenbasis.
inline BipartiteOperator random_hermitian_with_spectrum(BipartiteDims dims, const RealVector& spectrum, Rng& rng) {
  if (spectrum.size() != dims.total()) throw DimensionError("spectrum length does not match n*m");
  const Matrix u = random_unitary(dims.total(), rng);
  Matrix x = u * spectrum.cast<Complex>().asDiagonal() * u.adjoint();
  x = 0.5 * (x + x.adjoint()).eval();
  return {std::move(x), dims};
}

/// Random positive semidefinite operator (Wishart).
inline BipartiteOperator random_positive(BipartiteDims dims, Rng& rng) {
  const Matrix g = gaussian_matrix(dims.total(), dims.total(), rng);
  Matrix x = g * g.adjoint();
  x = 0.5 * (x + x.adjoint()).eval();
  return {std::move(x), dims};
}

/// Orthogonal projection of the given rank onto a Haar-random subspace.
inline BipartiteOperator random_projection(BipartiteDims dims, Index rank, Rng& rng) {
  if (rank < 0 || rank > dims.total()) throw RangeError("projection rank out of range");
  if (rank == 0) return {Matrix::Zero(dims.total(), dims.total()), dims};
  const Matrix q = random_isometry(dims.total(), rank, rng);
  Matrix p = q * q.adjoint();
  p = 0.5 * (p + p.adjoint()).eval();
  return {std::move(p), dims};
}

}  // namespace schmidtnorm
