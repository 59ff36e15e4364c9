#pragma once

// Dense complex linear algebra on bipartite spaces H_n (x) H_m.
//
// Vectors are stored row-major over the product basis |e_i> (x) |f_j>, i.e.
// amplitude index i*m + j. Operators use the same index on rows and columns.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace schmidtnorm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Bad caller input: wrong shapes, out-of-range parameters, invalid operators.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public InputError {
 public:
  explicit DimensionError(const std::string& what) : InputError("dimension mismatch: " + what) {}
};

class RangeError : public InputError {
 public:
  explicit RangeError(const std::string& what) : InputError("out of range: " + what) {}
};

/// Eigensolver or SVD failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BipartiteDims {
  int n = 1;
  int m = 1;

  BipartiteDims() = default;
  BipartiteDims(int n_, int m_) : n(n_), m(m_) {
    if (n < 1 || m < 1) {
      throw RangeError("local dimensions must be positive, got (" + std::to_string(n) + ", " +
                       std::to_string(m) + ")");
    }
  }

  Index total() const { return static_cast<Index>(n) * m; }
  /// Largest possible Schmidt rank.
  int min_dim() const { return std::min(n, m); }

  friend bool operator==(const BipartiteDims&, const BipartiteDims&) = default;
};

inline void check_schmidt_index(const BipartiteDims& dims, int k, const char* name = "k") {
  if (k < 1 || k > dims.min_dim()) {
    throw RangeError(std::string(name) + " = " + std::to_string(k) + " must satisfy 1 <= " + name +
                     " <= min(n, m) = " + std::to_string(dims.min_dim()));
  }
}

inline constexpr double kUnitNormTol = 1e-8;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kDensityTol = 1e-8;

/// Unit vector on H_n (x) H_m.
class PureState {
 public:
  PureState(Vector amplitudes, BipartiteDims dims) : amplitudes_(std::move(amplitudes)), dims_(dims) {
    if (amplitudes_.size() != dims_.total()) {
      throw DimensionError("vector of length " + std::to_string(amplitudes_.size()) +
                           " does not match n*m = " + std::to_string(dims_.total()));
    }
    const double norm = amplitudes_.norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTol)) {
      throw InputError("state is not normalized (norm = " + std::to_string(norm) + ")");
    }
  }

  /// Rescales to unit norm; rejects the zero vector.
  static PureState normalized(Vector amplitudes, BipartiteDims dims) {
    const double norm = amplitudes.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) throw InputError("cannot normalize the zero vector");
    amplitudes /= norm;
    return PureState(std::move(amplitudes), dims);
  }

  const Vector& amplitudes() const { return amplitudes_; }
  BipartiteDims dims() const { return dims_; }

 private:
  Vector amplitudes_;
  BipartiteDims dims_;
};

inline double max_abs(const Matrix& x) { return x.size() == 0 ? 0.0 : x.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& x, double rel_tol = kHermitianTol) {
  if (x.rows() != x.cols()) return false;
  return max_abs(x - x.adjoint()) <= rel_tol * max_abs(x);
}

/// Square operator on H_n (x) H_m with a cached Hermiticity flag.
class BipartiteOperator {
 public:
  BipartiteOperator(Matrix entries, BipartiteDims dims) : entries_(std::move(entries)), dims_(dims) {
    if (entries_.rows() != entries_.cols()) {
      throw DimensionError("operator must be square, got " + std::to_string(entries_.rows()) + "x" +
                           std::to_string(entries_.cols()));
    }
    if (entries_.rows() != dims_.total()) {
      throw DimensionError("operator side " + std::to_string(entries_.rows()) +
                           " does not match n*m = " + std::to_string(dims_.total()));
    }
    hermitian_ = schmidtnorm::is_hermitian(entries_);
  }

  const Matrix& entries() const { return entries_; }
  BipartiteDims dims() const { return dims_; }
  bool is_hermitian() const { return hermitian_; }
  BipartiteOperator adjoint() const { return {entries_.adjoint(), dims_}; }

 private:
  Matrix entries_;
  BipartiteDims dims_;
  bool hermitian_ = false;
};

inline void require_hermitian(const BipartiteOperator& x, const char* where) {
  if (!x.is_hermitian()) throw InputError(std::string(where) + ": operator is not Hermitian");
}

// ---------------------------------------------------------------------------
// Standard objects

inline BipartiteOperator identity_operator(BipartiteDims dims) {
  return {Matrix::Identity(dims.total(), dims.total()), dims};
}

/// (1/sqrt(n)) sum_i |e_i> (x) |e_i>
inline PureState maximally_entangled_state(int n) {
  BipartiteDims dims(n, n);
  Vector v = Vector::Zero(dims.total());
  for (int i = 0; i < n; ++i) v(static_cast<Index>(i) * n + i) = 1.0 / std::sqrt(static_cast<double>(n));
  return PureState(std::move(v), dims);
}

inline BipartiteOperator rank_one_projector(const PureState& v) {
  return {v.amplitudes() * v.amplitudes().adjoint(), v.dims()};
}

/// The rank-one projection E onto the maximally entangled state.
inline BipartiteOperator maximally_entangled_projector(int n) {
  return rank_one_projector(maximally_entangled_state(n));
}

inline BipartiteOperator swap_operator(int n) {
  BipartiteDims dims(n, n);
  Matrix s = Matrix::Zero(dims.total(), dims.total());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) s(j * n + i, i * n + j) = 1.0;
  return {std::move(s), dims};
}

/// Re <v|X|v>
inline double expectation(const BipartiteOperator& x, const Vector& v) {
  return v.dot(x.entries() * v).real();
}

inline BipartiteOperator kron(const BipartiteOperator& a, const BipartiteOperator& b) {
  Matrix k = Eigen::kroneckerProduct(a.entries(), b.entries()).eval();
  // Factor order is (a_1, a_2, b_1, b_2); callers regroup with permute_to_bipartite.
  return {std::move(k), BipartiteDims(a.dims().n * a.dims().m, b.dims().n * b.dims().m)};
}

// ---------------------------------------------------------------------------
// Reshaping

/// A_v with (A_v)_{ij} = <e_i (x) f_j | v>; its singular values are the Schmidt coefficients.
inline Matrix vec_to_operator(const Vector& v, BipartiteDims dims) {
  if (v.size() != dims.total()) {
    throw DimensionError("vector of length " + std::to_string(v.size()) + " does not match n*m = " +
                         std::to_string(dims.total()));
  }
  Matrix a(dims.n, dims.m);
  for (Index i = 0; i < dims.n; ++i)
    for (Index j = 0; j < dims.m; ++j) a(i, j) = v(i * dims.m + j);
  return a;
}

inline Matrix vec_to_operator(const PureState& v) { return vec_to_operator(v.amplitudes(), v.dims()); }

/// Inverse of vec_to_operator.
inline Vector operator_to_vec(const Matrix& a) {
  Vector v(a.size());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) v(i * a.cols() + j) = a(i, j);
  return v;
}

/// Transpose on the second tensor factor.
inline BipartiteOperator partial_transpose(const BipartiteOperator& x) {
  const Index n = x.dims().n;
  const Index m = x.dims().m;
  const Matrix& in = x.entries();
  Matrix out(in.rows(), in.cols());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < m; ++j)
      for (Index k = 0; k < n; ++k)
        for (Index l = 0; l < m; ++l) out(i * m + l, k * m + j) = in(i * m + j, k * m + l);
  return {std::move(out), x.dims()};
}

namespace detail {

inline std::int64_t checked_pow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  for (int i = 0; i < exp; ++i) {
    if (r > (std::int64_t{1} << 40) / std::max<std::int64_t>(base, 1)) {
      throw RangeError("dimension " + std::to_string(base) + "^" + std::to_string(exp) + " is too large");
    }
    r *= base;
  }
  return r;
}

}  // namespace detail

/// Regroups an operator on (H_n (x) H_m)^{(x) r} into H_{n^r} (x) H_{m^r}: tensor
/// factors (a_1, b_1, ..., a_r, b_r) are reordered to (a_1, ..., a_r, b_1, ..., b_r).
inline BipartiteOperator permute_to_bipartite(const Matrix& x, BipartiteDims local, int r) {
  if (r < 1) throw RangeError("r = " + std::to_string(r) + " must be >= 1");
  const std::int64_t big_n = detail::checked_pow(local.n, r);
  const std::int64_t big_m = detail::checked_pow(local.m, r);
  const std::int64_t dim = big_n * big_m;
  if (x.rows() != x.cols() || x.rows() != dim) {
    throw DimensionError("operator side " + std::to_string(x.rows()) + " is not (" +
                         std::to_string(local.n) + "*" + std::to_string(local.m) + ")^" + std::to_string(r));
  }
  std::vector<Index> target(static_cast<std::size_t>(dim));
  for (std::int64_t idx = 0; idx < dim; ++idx) {
    // Peel pairs off the least significant end: pair r is the last (a_r, b_r).
    std::int64_t rest = idx;
    std::int64_t a_index = 0, b_index = 0, a_scale = 1, b_scale = 1;
    for (int p = 0; p < r; ++p) {
      const std::int64_t b = rest % local.m;
      rest /= local.m;
      const std::int64_t a = rest % local.n;
      rest /= local.n;
      a_index += a * a_scale;
      b_index += b * b_scale;
      a_scale *= local.n;
      b_scale *= local.m;
    }
    target[static_cast<std::size_t>(idx)] = static_cast<Index>(a_index * big_m + b_index);
  }
  Matrix out(x.rows(), x.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) out(target[i], target[j]) = x(i, j);
  return {std::move(out), BipartiteDims(static_cast<int>(big_n), static_cast<int>(big_m))};
}

// ---------------------------------------------------------------------------
// Spectra and norms

struct Eigensystem {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns, aligned with values
};

/// Hermitian eigendecomposition with a deterministic ascending order.
inline Eigensystem eigh(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("Hermitian eigensolver did not converge");
  const RealVector& vals = solver.eigenvalues();
  std::vector<Index> order(static_cast<std::size_t>(vals.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return vals(a) < vals(b); });
  Eigensystem out{RealVector(vals.size()), Matrix(h.rows(), h.cols())};
  for (Index i = 0; i < vals.size(); ++i) {
    out.values(i) = vals(order[i]);
    out.vectors.col(i) = solver.eigenvectors().col(order[i]);
  }
  return out;
}

inline Eigensystem eigh(const BipartiteOperator& x) {
  require_hermitian(x, "eigh");
  return eigh(x.entries());
}

inline RealVector singular_values(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");
  return svd.singularValues();  // descending
}

/// Sum of the k largest singular values.
inline double ky_fan_norm(const Matrix& x, int k) {
  const Index limit = std::min(x.rows(), x.cols());
  if (k < 1 || k > limit) {
    throw RangeError("k = " + std::to_string(k) + " must satisfy 1 <= k <= " + std::to_string(limit));
  }
  return singular_values(x).head(k).sum();
}

inline double spectral_scale(const RealVector& eigenvalues) {
  return eigenvalues.size() == 0 ? 0.0 : eigenvalues.cwiseAbs().maxCoeff();
}

/// Largest |eigenvalue| of a Hermitian operator.
inline double operator_norm(const BipartiteOperator& x) { return spectral_scale(eigh(x).values); }

inline bool is_positive_semidefinite(const RealVector& eigenvalues, double tol = kUnitNormTol) {
  if (eigenvalues.size() == 0) return true;
  return eigenvalues.minCoeff() >= -tol * std::max(1.0, spectral_scale(eigenvalues));
}

inline bool is_positive_semidefinite(const BipartiteOperator& x, double tol = kUnitNormTol) {
  return x.is_hermitian() && is_positive_semidefinite(eigh(x).values, tol);
}

inline void require_density(const BipartiteOperator& rho, const char* where) {
  if (!rho.is_hermitian()) throw InputError(std::string(where) + ": density operator is not Hermitian");
  const double tr = rho.entries().trace().real();
  if (std::abs(tr - 1.0) > kDensityTol) {
    throw InputError(std::string(where) + ": density operator has trace " + std::to_string(tr));
  }
  const double lmin = eigh(rho.entries()).values.minCoeff();
  if (lmin < -kDensityTol) {
    throw InputError(std::string(where) + ": density operator has eigenvalue " + std::to_string(lmin));
  }
}

/// (1/2) Tr|rho - sigma|
inline double trace_distance(const BipartiteOperator& rho, const BipartiteOperator& sigma) {
  require_density(rho, "trace_distance");
  require_density(sigma, "trace_distance");
  if (!(rho.dims() == sigma.dims())) throw DimensionError("trace_distance: operands have different dims");
  return 0.5 * eigh(Matrix(rho.entries() - sigma.entries())).values.cwiseAbs().sum();
}

namespace detail {

// Square roots of the nonnegative part, with roundoff-sized eigenvalues set to
// zero first: sqrt would otherwise lift 1e-16 noise to 1e-8.
inline RealVector clamped_roots(const RealVector& values) {
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, spectral_scale(values));
  return values.unaryExpr([floor](double x) { return x > floor ? std::sqrt(x) : 0.0; });
}

inline Matrix psd_sqrt(const Matrix& h) {
  Eigensystem es = eigh(h);
  const RealVector roots = clamped_roots(es.values);
  return es.vectors * roots.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

}  // namespace detail

/// (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2
inline double fidelity(const BipartiteOperator& rho, const BipartiteOperator& sigma) {
  require_density(rho, "fidelity");
  require_density(sigma, "fidelity");
  if (!(rho.dims() == sigma.dims())) throw DimensionError("fidelity: operands have different dims");
  const Matrix root = detail::psd_sqrt(rho.entries());
  Matrix inner = root * sigma.entries() * root;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  const double tr = detail::clamped_roots(eigh(inner).values).sum();
  return tr * tr;
}

/// Eigendata of a Hermitian operator split by sign.
struct SpectralSplit {
  BipartiteDims dims;
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;
  double tol_zero = 0.0;
  Index negative_count = 0;
  Index zero_count = 0;
  Index positive_count = 0;

  Matrix pos_part;    // X^+
  Matrix neg_part;    // X^- (negative semidefinite)
  Matrix proj_zero;   // P_X^0
  Matrix proj_neg;    // P_X^-

  // Eigenvalues are ascending, so the classes occupy contiguous column ranges.
  Index first_zero() const { return negative_count; }
  Index first_positive() const { return negative_count + zero_count; }
};

inline double default_tol_zero(const RealVector& eigenvalues) { return 1e-9 * spectral_scale(eigenvalues); }

inline SpectralSplit hermitian_spectral_split(const BipartiteOperator& x, std::optional<double> tol_zero = {}) {
  require_hermitian(x, "hermitian_spectral_split");
  Eigensystem es = eigh(x.entries());
  SpectralSplit s;
  s.dims = x.dims();
  s.tol_zero = tol_zero.value_or(default_tol_zero(es.values));
  const Index d = es.values.size();
  for (Index i = 0; i < d; ++i) {
    const double l = es.values(i);
    if (l < -s.tol_zero) ++s.negative_count;
    else if (l <= s.tol_zero) ++s.zero_count;
    else ++s.positive_count;
  }
  auto block_sum = [&](Index first, Index count, bool weighted) {
    Matrix acc = Matrix::Zero(d, d);
    if (count == 0) return acc;
    const auto vecs = es.vectors.middleCols(first, count);
    if (weighted) {
      RealVector w = es.values.segment(first, count);
      acc.noalias() = vecs * w.cast<Complex>().asDiagonal() * vecs.adjoint();
    } else {
      acc.noalias() = vecs * vecs.adjoint();
    }
    return acc;
  };
  s.neg_part = block_sum(0, s.negative_count, true);
  s.proj_neg = block_sum(0, s.negative_count, false);
  s.proj_zero = block_sum(s.first_zero(), s.zero_count, false);
  s.pos_part = block_sum(s.first_positive(), s.positive_count, true);
  s.eigenvalues = std::move(es.values);
  s.eigenvectors = std::move(es.vectors);
  return s;
}

/// Largest dimension of a subspace in which every vector has Schmidt rank >= k.
inline std::int64_t max_schmidt_subspace_dim(int n, int m, int k) {
  check_schmidt_index(BipartiteDims(n, m), k);
  return static_cast<std::int64_t>(n - k + 1) * (m - k + 1);
}

}  // namespace schmidtnorm
