#pragma once

// Schmidt decomposition and the vector norms ||v||_{s(k)}.

#include "schmidtnorm/core.hpp"

namespace schmidtnorm {

inline constexpr double kDefaultSchmidtTol = 1e-10;

/// v = sum_i coefficients(i) * left_frame.col(i) (x) right_frame.col(i)
struct SchmidtDecomposition {
  BipartiteDims dims;
  RealVector coefficients;  // descending, length min(n, m)
  Matrix left_frame;        // n x min(n, m), orthonormal columns
  Matrix right_frame;       // m x min(n, m), orthonormal columns
  int rank = 0;             // coefficients > tol * coefficients(0)

  Vector reconstruct() const {
    const Matrix a = left_frame * coefficients.cast<Complex>().asDiagonal() * right_frame.transpose();
    return operator_to_vec(a);
  }
};

namespace detail {

// SVD of A_v = U S V^*, so v = sum_i s_i u_i (x) conj(v_i).
inline SchmidtDecomposition decompose(const Vector& v, BipartiteDims dims, double tol) {
  const Matrix a = vec_to_operator(v, dims);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  SchmidtDecomposition d;
  d.dims = dims;
  d.coefficients = svd.singularValues();
  d.left_frame = svd.matrixU();
  d.right_frame = svd.matrixV().conjugate();
  const double top = d.coefficients.size() ? d.coefficients(0) : 0.0;
  d.rank = static_cast<int>((d.coefficients.array() > tol * top).count());
  return d;
}

}  // namespace detail

inline SchmidtDecomposition schmidt_decompose(const PureState& v, double tol = kDefaultSchmidtTol) {
  return detail::decompose(v.amplitudes(), v.dims(), tol);
}

inline int schmidt_rank(const PureState& v, double tol = kDefaultSchmidtTol) {
  return schmidt_decompose(v, tol).rank;
}

/// Schmidt coefficients of an arbitrary (not necessarily unit) vector.
inline RealVector schmidt_coefficients(const Vector& v, BipartiteDims dims) {
  return singular_values(vec_to_operator(v, dims));
}

/// ||v||_{s(k)}: root of the sum of the k largest squared Schmidt coefficients.
/// Homogeneous, so it is defined for non-unit vectors as well.
inline double vector_k_norm(const Vector& v, BipartiteDims dims, int k) {
  check_schmidt_index(dims, k);
  return std::sqrt(schmidt_coefficients(v, dims).head(k).squaredNorm());
}

inline double vector_k_norm(const PureState& v, int k) { return vector_k_norm(v.amplitudes(), v.dims(), k); }

/// Best Schmidt-rank-k approximation of x (keep the k largest coefficients),
/// renormalized. Returns the zero vector when x has no weight in them.
inline Vector truncate_to_schmidt_rank(const Vector& x, BipartiteDims dims, int k) {
  check_schmidt_index(dims, k);
  const Matrix a = vec_to_operator(x, dims);
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  const Matrix trunc = svd.matrixU().leftCols(k) * svd.singularValues().head(k).cast<Complex>().asDiagonal() *
                       svd.matrixV().leftCols(k).adjoint();
  Vector w = operator_to_vec(trunc);
  const double norm = w.norm();
  if (!(norm > 0.0)) return Vector::Zero(x.size());
  return w / norm;
}

/// The Schmidt-rank-k state closest to v; its overlap with v is ||v||_{s(k)}.
/// Degenerate coefficients are cut after the first k in sorted order.
inline PureState nearest_rank_k_state(const PureState& v, int k) {
  check_schmidt_index(v.dims(), k);
  Vector w = truncate_to_schmidt_rank(v.amplitudes(), v.dims(), k);
  if (w.norm() == 0.0) throw InputError("nearest_rank_k_state: vector has zero k-norm");
  return PureState(std::move(w), v.dims());
}

}  // namespace schmidtnorm
