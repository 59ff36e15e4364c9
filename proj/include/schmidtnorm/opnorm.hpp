#pragma once

// Bounds on the operator norms
//
//   ||X||_{S(k)} = sup { |<w|X|v>| : SR(v), SR(w) <= k }.
//
// Computing the norm is hard in general, so everything here is either an
// exact special case, a one-sided bound, or a search that yields a lower
// bound together with the Schmidt-rank-k state that attains it.

#include "schmidtnorm/core.hpp"
#include "schmidtnorm/random.hpp"
#include "schmidtnorm/schmidt.hpp"

#include <span>
#include <utility>

namespace schmidtnorm {

struct NormBounds {
  int k = 1;
  double lower = 0.0;
  double upper = 0.0;
  /// Present when `lower` is attained as <v|X|v> by a state of Schmidt rank <= k.
  std::optional<PureState> lower_witness;
  /// Rules that produced the final lower and upper values.
  std::vector<std::string> methods;

  bool contains(double value, double tol = 1e-9) const { return value >= lower - tol && value <= upper + tol; }
};

/// ||w><v| ||_{S(k)} = ||w||_{s(k)} ||v||_{s(k)}
inline double op_norm_rank_one(const PureState& w, const PureState& v, int k) {
  if (!(w.dims() == v.dims())) throw DimensionError("op_norm_rank_one: states live on different spaces");
  return vector_k_norm(w, k) * vector_k_norm(v, k);
}

namespace detail {

// sum_i |lambda_i| ||v_i||_{s(k)}^2 over a given orthonormal eigenbasis.
inline double spectral_upper(const Eigen::VectorXcd& eigenvalues, const Matrix& eigenvectors, BipartiteDims dims,
                             int k) {
  double total = 0.0;
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double mag = std::abs(eigenvalues(i));
    if (mag == 0.0) continue;
    const double vk = vector_k_norm(Vector(eigenvectors.col(i)), dims, k);
    total += mag * vk * vk;
  }
  return total;
}

}  // namespace detail

/// Upper bound sum_i |lambda_i| ||v_i||^2_{s(k)} for normal X.
inline double op_norm_upper_spectral(const BipartiteOperator& x, int k) {
  check_schmidt_index(x.dims(), k);
  if (x.is_hermitian()) {
    const Eigensystem es = eigh(x);
    return detail::spectral_upper(es.values.cast<Complex>(), es.vectors, x.dims(), k);
  }
  Eigen::ComplexSchur<Matrix> schur(x.entries());
  if (schur.info() != Eigen::Success) throw NumericalError("Schur decomposition did not converge");
  const Matrix& t = schur.matrixT();
  const Matrix off = t.triangularView<Eigen::StrictlyUpper>();
  if (max_abs(off) > 1e-10 * std::max(1.0, max_abs(t))) {
    throw InputError("op_norm_upper_spectral: operator is not normal");
  }
  return detail::spectral_upper(t.diagonal(), schur.matrixU(), x.dims(), k);
}

/// (k/r) lambda_{nm - (n-r)(m-r)} with eigenvalues ascending from index 1.
inline double op_norm_lower_eig(const BipartiteOperator& x, int k, int r) {
  require_hermitian(x, "op_norm_lower_eig");
  check_schmidt_index(x.dims(), k);
  check_schmidt_index(x.dims(), r, "r");
  if (r < k) throw RangeError("r = " + std::to_string(r) + " must be >= k = " + std::to_string(k));
  const RealVector values = eigh(x).values;
  const Index n = x.dims().n, m = x.dims().m;
  const Index pos = n * m - (n - r) * (m - r);  // 1-based
  return static_cast<double>(k) / r * values(pos - 1);
}

/// Brackets ||X||_{S(k)} from ||X||_{S(h)}, h <= k: [value_h, (k/h) value_h].
inline std::pair<double, double> op_norm_equiv_transfer(double value_h, int h, int k) {
  if (h < 1 || h > k) {
    throw RangeError("op_norm_equiv_transfer needs 1 <= h <= k, got h = " + std::to_string(h) +
                     ", k = " + std::to_string(k));
  }
  return {value_h, static_cast<double>(k) / h * value_h};
}

/// ||X||_{S(k)} >= (k / min(n, m)) ||X||.
inline double op_norm_equiv_floor(double operator_norm_value, BipartiteDims dims, int k) {
  check_schmidt_index(dims, k);
  return static_cast<double>(k) / dims.min_dim() * operator_norm_value;
}

// ---------------------------------------------------------------------------
// Projections

inline bool is_projection(const RealVector& eigenvalues, double tol = 1e-8) {
  for (Index i = 0; i < eigenvalues.size(); ++i) {
    const double l = eigenvalues(i);
    if (std::abs(l) > tol && std::abs(l - 1.0) > tol) return false;
  }
  return true;
}

/// Rank of an orthogonal projection; rejects anything that is not one.
inline Index projection_rank(const BipartiteOperator& p) {
  if (!p.is_hermitian()) throw InputError("projection is not Hermitian");
  const Matrix& e = p.entries();
  if (max_abs(e * e - e) > 1e-8) throw InputError("projection is not idempotent");
  return static_cast<Index>(std::llround(e.trace().real()));
}

/// Smallest r >= 1 with rank >= (n-r)(m-r) + 1: every subspace of that
/// dimension contains a state of Schmidt rank <= r. Equivalent to the ceiling
/// of (n + m - sqrt((n-m)^2 + 4 rank - 4)) / 2, done in integers.
inline int forced_schmidt_rank(BipartiteDims dims, std::int64_t rank) {
  if (rank < 1) throw RangeError("forced_schmidt_rank needs rank >= 1");
  for (int r = 1; r <= dims.min_dim(); ++r) {
    if (rank >= static_cast<std::int64_t>(dims.n - r) * (dims.m - r) + 1) return r;
  }
  return dims.min_dim();
}

/// min{1, k / forced_schmidt_rank}
inline double projection_ineq1(BipartiteDims dims, std::int64_t rank, int k) {
  check_schmidt_index(dims, k);
  if (rank == 0) return 0.0;
  return std::min(1.0, static_cast<double>(k) / forced_schmidt_rank(dims, rank));
}

/// ((k-1) mn + (m-k) rank) / (mn (m-1)), with m the smaller local dimension.
inline double projection_ineq2(BipartiteDims dims, std::int64_t rank, int k) {
  check_schmidt_index(dims, k);
  if (rank == 0) return 0.0;
  const double m = dims.min_dim();
  const double mn = static_cast<double>(dims.total());
  if (dims.min_dim() == 1) return 1.0;
  return ((k - 1) * mn + (m - k) * static_cast<double>(rank)) / (mn * (m - 1));
}

/// Lifts a lower bound on ||P||_{S(h)} to one on ||P||_{S(k)}, h <= k.
inline double projection_interpolation(BipartiteDims dims, int h, double value_h, int k) {
  check_schmidt_index(dims, h, "h");
  check_schmidt_index(dims, k);
  if (h > k) throw RangeError("projection_interpolation needs h <= k");
  if (dims.min_dim() == 1) return value_h;
  const double t = static_cast<double>(k - h) / (dims.min_dim() - 1);
  return (1.0 - t) * value_h + t;
}

/// Best rank-based lower bound on ||P||_{S(k)}; `known` holds (h, lower bound
/// on ||P||_{S(h)}) pairs that are lifted to k.
inline double projection_lower_bounds(const BipartiteOperator& p, int k,
                                      std::span<const std::pair<int, double>> known = {}) {
  check_schmidt_index(p.dims(), k);
  const Index rank = projection_rank(p);
  double best = std::max(projection_ineq1(p.dims(), rank, k), projection_ineq2(p.dims(), rank, k));
  for (const auto& [h, value] : known) {
    if (h <= k) best = std::max(best, projection_interpolation(p.dims(), h, value, k));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Search

struct HeuristicOptions {
  int restarts = 32;
  int max_iters = 500;
  std::uint64_t seed = 0;
};

namespace detail {

struct Ascent {
  double value = -std::numeric_limits<double>::infinity();
  Vector state;
};

// v <- truncate_k(X v) until the gain drops below 1e-12 of the current value.
inline Ascent truncated_power_ascent(const Matrix& x, BipartiteDims dims, int k, Vector v, int max_iters) {
  Ascent best{v.dot(x * v).real(), v};
  for (int it = 0; it < max_iters; ++it) {
    const Vector y = x * best.state;
    if (!(y.norm() > 0.0)) break;
    Vector next = truncate_to_schmidt_rank(y, dims, k);
    if (!(next.norm() > 0.0)) break;
    const double value = next.dot(x * next).real();
    const double gain = value - best.value;
    if (gain > 0.0) best = {value, std::move(next)};
    if (gain < 1e-12 * std::abs(best.value)) break;
  }
  return best;
}

}  // namespace detail

namespace detail {

// Best truncated power ascent over `first` (if nonzero) and the seeded random
// restarts. The caller vouches that X is positive semidefinite.
inline NormBounds heuristic_search(const BipartiteOperator& x, int k, const Vector& first,
                                   const HeuristicOptions& opts) {
  const BipartiteDims dims = x.dims();
  const Matrix& mat = x.entries();
  Ascent best;
  auto consider = [&](Vector start) {
    if (!(start.norm() > 0.0)) return;
    Ascent a = truncated_power_ascent(mat, dims, k, std::move(start), opts.max_iters);
    if (a.value > best.value) best = std::move(a);
  };
  consider(first);
  for (int i = 0; i < opts.restarts; ++i) {
    Rng rng = make_stream(opts.seed, static_cast<std::uint64_t>(i));
    consider(random_schmidt_rank_vector(dims, k, rng));
  }
  if (best.state.size() == 0) throw NumericalError("heuristic search had no usable starting state");

  NormBounds out;
  out.k = k;
  PureState witness(best.state / best.state.norm(), dims);
  out.lower = expectation(x, witness.amplitudes());
  out.lower_witness = std::move(witness);
  out.methods = {"heuristic"};
  return out;
}

}  // namespace detail

/// Lower bound on ||X||_{S(k)} for positive X by truncated power iteration
/// from the truncated top eigenvector and `restarts` random Schmidt-rank-k
/// states. Restart i draws from stream (seed, i), so the result does not depend
/// on evaluation order.
inline NormBounds op_norm_heuristic(const BipartiteOperator& x, int k, const HeuristicOptions& opts = {}) {
  check_schmidt_index(x.dims(), k);
  if (!x.is_hermitian()) throw InputError("op_norm_heuristic: operator is not Hermitian");
  const Eigensystem es = eigh(x.entries());
  if (!is_positive_semidefinite(es.values)) {
    throw InputError("op_norm_heuristic: operator is not positive semidefinite");
  }
  const Vector first = truncate_to_schmidt_rank(es.vectors.col(es.values.size() - 1), x.dims(), k);
  NormBounds out = detail::heuristic_search(x, k, first, opts);
  out.upper = spectral_scale(es.values);
  out.methods = {"heuristic", "operator_norm"};
  return out;
}

/// Max of Re <v|X|v> over `samples` random states of Schmidt rank <= k.
/// Always a lower bound on ||X||_{S(k)} for positive X.
inline double op_norm_bruteforce(const BipartiteOperator& x, int k, long samples, std::uint64_t seed = 0) {
  check_schmidt_index(x.dims(), k);
  Rng rng = make_stream(seed, 0);
  double best = -std::numeric_limits<double>::infinity();
  for (long s = 0; s < samples; ++s) {
    const Vector v = random_schmidt_rank_vector(x.dims(), k, rng);
    best = std::max(best, expectation(x, v));
  }
  return best;
}

// ---------------------------------------------------------------------------
// Aggregate

struct BoundsOptions {
  HeuristicOptions heuristic;
  bool use_heuristic = true;
};

namespace detail {

struct Candidate {
  double value = 0.0;
  std::string method;
  std::optional<PureState> witness;
};

inline std::string tagged(const std::string& method, const char* key, int value) {
  return method + "(" + key + "=" + std::to_string(value) + ")";
}

}  // namespace detail

/// Tightest certified interval for ||X||_{S(k)} from every applicable rule.
///
/// Bounds are computed for each Schmidt index h and then tied together:
/// lower bounds propagate upward in h, upper bounds propagate downward and
/// upward by the factor k/h.
inline NormBounds op_norm_bounds(const BipartiteOperator& x, int k, const BoundsOptions& opts = {}) {
  require_hermitian(x, "op_norm_bounds");
  const BipartiteDims dims = x.dims();
  check_schmidt_index(dims, k);
  const Eigensystem es = eigh(x.entries());
  const int top = dims.min_dim();
  const double scale = spectral_scale(es.values);
  const double tol_zero = default_tol_zero(es.values);
  const Index d = es.values.size();
  const Index n = dims.n, m = dims.m;

  const bool positive = is_positive_semidefinite(es.values);
  const bool projection = is_projection(es.values);
  const Index rank = projection ? static_cast<Index>(std::llround(es.values.sum())) : 0;
  std::vector<Index> nonzero;
  for (Index i = 0; i < d; ++i)
    if (std::abs(es.values(i)) > tol_zero) nonzero.push_back(i);

  std::vector<detail::Candidate> lower(top + 1), upper(top + 1);
  // A witnessed lower bound is only displaced by a clear improvement, not by roundoff.
  const double keep_witness = 1e-12 * std::max(1.0, scale);
  auto raise = [keep_witness](detail::Candidate& c, double v, std::string method, std::optional<PureState> w = {}) {
    if (v > c.value + (c.witness ? keep_witness : 0.0)) c = {v, std::move(method), std::move(w)};
  };
  auto cut = [](detail::Candidate& c, double v, std::string method) {
    if (v < c.value) c = {v, std::move(method), {}};
  };

  std::vector<std::pair<int, double>> known_projection;
  for (int h = 1; h <= top; ++h) {
    auto& lo = lower[h];
    auto& up = upper[h];
    lo = {0.0, "trivial", {}};
    up = {scale, "operator_norm", {}};

    if (h == top) {
      std::optional<PureState> w;
      if (d > 0 && es.values(d - 1) >= scale) w = PureState(es.vectors.col(d - 1), dims);
      lo = {scale, "full_schmidt_rank", std::move(w)};
      up = {scale, "full_schmidt_rank", {}};
    }
    if (nonzero.size() == 1) {
      const Vector v = es.vectors.col(nonzero.front());
      const double lambda = es.values(nonzero.front());
      const double vk = vector_k_norm(v, dims, h);
      const double exact = std::abs(lambda) * vk * vk;
      std::optional<PureState> w;
      if (lambda > 0.0) w = PureState(truncate_to_schmidt_rank(v, dims, h), dims);
      if (exact >= lo.value - (w ? keep_witness : 0.0)) lo = {exact, "rank_one", std::move(w)};
      if (exact <= up.value) up = {exact, "rank_one", {}};
    }
    cut(up, detail::spectral_upper(es.values.cast<Complex>(), es.vectors, dims, h), "spectral_upper");

    for (int r = h; r <= top; ++r) {
      const Index pos = n * m - (n - r) * (m - r) - 1;
      const double frac = static_cast<double>(h) / r;
      // ||-X|| = ||X||, so the rule applies to both signs.
      raise(lo, frac * es.values(pos), detail::tagged("eigenvalue_lower", "r", r));
      raise(lo, -frac * es.values(d - 1 - pos), detail::tagged("eigenvalue_lower_neg", "r", r));
    }
    raise(lo, op_norm_equiv_floor(scale, dims, h), "equiv_floor");

    if (projection && rank > 0) {
      raise(lo, projection_ineq1(dims, rank, h), "projection_ineq1");
      raise(lo, projection_ineq2(dims, rank, h), "projection_ineq2");
      for (const auto& [g, value] : known_projection)
        raise(lo, projection_interpolation(dims, g, value, h), detail::tagged("projection_interp", "h", g));
    }

    if (opts.use_heuristic && positive && h <= k && h < top && nonzero.size() > 1) {
      NormBounds hb = op_norm_heuristic(x, h, opts.heuristic);
      raise(lo, hb.lower, "heuristic", std::move(hb.lower_witness));
    }
    if (projection) known_projection.emplace_back(h, lo.value);
  }

  // Monotone in h: ||X||_{S(h)} <= ||X||_{S(k)} <= (k/h) ||X||_{S(h)}.
  detail::Candidate best_lower = lower[k];
  for (int h = 1; h < k; ++h) {
    if (lower[h].value > best_lower.value) {
      best_lower = lower[h];
      best_lower.method = detail::tagged("monotone", "h", h) + ":" + lower[h].method;
    }
  }
  detail::Candidate best_upper = upper[k];
  for (int h = 1; h < k; ++h) {
    cut(best_upper, static_cast<double>(k) / h * upper[h].value,
        detail::tagged("equiv_transfer", "h", h) + ":" + upper[h].method);
  }
  for (int h = k + 1; h <= top; ++h) {
    cut(best_upper, upper[h].value, detail::tagged("monotone", "h", h) + ":" + upper[h].method);
  }

  NormBounds out;
  out.k = k;
  out.lower = best_lower.value;
  out.upper = best_upper.value;
  out.lower_witness = std::move(best_lower.witness);
  out.methods = {best_lower.method, best_upper.method};
  return out;
}

}  // namespace schmidtnorm
