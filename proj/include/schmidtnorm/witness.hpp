#pragma once

// k-block positivity of Hermitian operators (equivalently k-positivity of the
// associated map under the Choi isomorphism).
//
// Every test is one-sided: it either proves the property, disproves it, or
// reports Inconclusive. Tests that prove k-block positivity consume only
// upper bounds on the Schmidt operator norms; tests that disprove it consume
// lower bounds or produce an explicit state v with SR(v) <= k and <v|X|v> < 0.

#include "schmidtnorm/core.hpp"
#include "schmidtnorm/opnorm.hpp"
#include "schmidtnorm/schmidt.hpp"

#include <functional>

namespace schmidtnorm {

enum class Status { KBlockPositive, NotKBlockPositive, Inconclusive };

inline std::string to_string(Status s) {
  switch (s) {
    case Status::KBlockPositive: return "KBlockPositive";
    case Status::NotKBlockPositive: return "NotKBlockPositive";
    case Status::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

struct BoundInterval {
  std::string name;
  double lower = 0.0;
  double upper = 0.0;
};

struct Verdict {
  Status status = Status::Inconclusive;
  int k = 1;
  std::string rule = "none";
  std::string detail;
  /// State with SR <= k and <v|X|v> < -kWitnessMargin.
  std::optional<PureState> witness;
  std::optional<double> witness_value;
  std::optional<Index> negative_count;
  std::optional<Index> negative_limit;
  std::vector<BoundInterval> bounds;

  bool decisive() const { return status != Status::Inconclusive; }
};

inline constexpr double kWitnessMargin = 1e-8;
inline constexpr double kStrictMargin = 1e-8;

namespace detail {

inline Verdict verdict(Status status, int k, std::string rule, std::string text = {}) {
  Verdict v;
  v.status = status;
  v.k = k;
  v.rule = std::move(rule);
  v.detail = std::move(text);
  return v;
}

// Accepts v as a certificate only if it re-verifies.
inline std::optional<Verdict> witness_verdict(const BipartiteOperator& x, int k, const Vector& v, std::string rule) {
  if (!(v.norm() > 0.0)) return std::nullopt;
  const Vector unit = v / v.norm();
  const SchmidtDecomposition sd = detail::decompose(unit, x.dims(), kDefaultSchmidtTol);
  if (sd.rank > k) return std::nullopt;
  const double value = expectation(x, unit);
  if (!(value < -kWitnessMargin)) return std::nullopt;
  Verdict out = verdict(Status::NotKBlockPositive, k, std::move(rule), "explicit Schmidt-rank-k witness");
  out.witness = PureState(unit, x.dims());
  out.witness_value = value;
  return out;
}

inline std::int64_t negative_limit(BipartiteDims dims, int k) {
  return static_cast<std::int64_t>(dims.n - k) * (dims.m - k);
}

// Clusters ascending eigenvalues; a new cluster starts where the gap exceeds rel_gap * scale.
inline std::vector<std::pair<Index, Index>> eigenvalue_clusters(const RealVector& values, double rel_gap = 1e-8) {
  std::vector<std::pair<Index, Index>> clusters;  // (first, count)
  const double scale = spectral_scale(values);
  for (Index i = 0; i < values.size(); ++i) {
    if (i == 0 || values(i) - values(i - 1) > rel_gap * scale) clusters.emplace_back(i, 0);
    ++clusters.back().second;
  }
  return clusters;
}

// Product basis state with the most negative diagonal entry of X.
inline Vector most_negative_basis_state(const BipartiteOperator& x) {
  Index best = 0;
  x.entries().diagonal().real().minCoeff(&best);
  Vector v = Vector::Zero(x.dims().total());
  v(best) = 1.0;
  return v;
}

// Upper bound on ||sum_i w_i |v_i><v_i| ||_{S(k)} over orthonormal v_i, w_i >= 0,
// using the spectral bound at every h <= k lifted by k/h.
inline double weighted_spectral_upper(const Matrix& vectors, const RealVector& weights, BipartiteDims dims, int k) {
  double best = std::numeric_limits<double>::infinity();
  for (int h = 1; h <= k; ++h) {
    double total = 0.0;
    for (Index i = 0; i < weights.size(); ++i) {
      const double vk = vector_k_norm(Vector(vectors.col(i)), dims, h);
      total += weights(i) * vk * vk;
    }
    best = std::min(best, static_cast<double>(k) / h * total);
  }
  return weights.size() ? std::min(best, weights.maxCoeff()) : 0.0;
}

inline BipartiteOperator projector_onto(const Matrix& columns, BipartiteDims dims) {
  Matrix p = columns * columns.adjoint();
  p = 0.5 * (p + p.adjoint()).eval();
  return {std::move(p), dims};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Choi matrices and Kraus operators

/// Linear map L(H_n) -> L(H_m).
using LinearMap = std::function<Matrix(const Matrix&)>;

/// (id_n (x) Phi)(E) with E = (1/n) sum_ij |i><j| (x) |i><j|.
inline BipartiteOperator choi_matrix(const LinearMap& phi, int n, int m) {
  const BipartiteDims dims(n, m);
  Matrix x = Matrix::Zero(dims.total(), dims.total());
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      Matrix unit = Matrix::Zero(n, n);
      unit(i, j) = 1.0;
      const Matrix image = phi(unit);
      if (image.rows() != m || image.cols() != m) {
        throw DimensionError("map output is " + std::to_string(image.rows()) + "x" + std::to_string(image.cols()) +
                             ", expected " + std::to_string(m) + "x" + std::to_string(m));
      }
      x.block(i * m, j * m, m, m) = image / static_cast<double>(n);
    }
  }
  return {std::move(x), dims};
}

/// Phi(rho) = sum_i w_i K_i rho K_i^*, each K_i of size m x n; unit weights by default.
inline BipartiteOperator choi_matrix_from_kraus(const std::vector<Matrix>& kraus, std::vector<double> weights = {}) {
  if (kraus.empty()) throw InputError("empty Kraus list");
  if (weights.empty()) weights.assign(kraus.size(), 1.0);
  if (weights.size() != kraus.size()) throw DimensionError("Kraus weights and operators differ in count");
  const Index m = kraus.front().rows(), n = kraus.front().cols();
  for (const auto& k : kraus)
    if (k.rows() != m || k.cols() != n) throw DimensionError("Kraus operators have inconsistent shapes");
  return choi_matrix(
      [&](const Matrix& rho) {
        Matrix out = Matrix::Zero(m, m);
        for (std::size_t i = 0; i < kraus.size(); ++i) out += weights[i] * kraus[i] * rho * kraus[i].adjoint();
        return out;
      },
      static_cast<int>(n), static_cast<int>(m));
}

/// Map given by its m^2 x n^2 transfer matrix acting on row-major vec(rho).
inline BipartiteOperator choi_matrix_from_transfer(const Matrix& transfer, int n, int m) {
  if (transfer.rows() != static_cast<Index>(m) * m || transfer.cols() != static_cast<Index>(n) * n) {
    throw DimensionError("transfer matrix must be m^2 x n^2");
  }
  return choi_matrix(
      [&](const Matrix& rho) {
        const Vector out = transfer * operator_to_vec(rho);
        return vec_to_operator(out, BipartiteDims(m, m));
      },
      n, m);
}

inline LinearMap transpose_map() {
  return [](const Matrix& rho) { return Matrix(rho.transpose()); };
}

inline LinearMap identity_map() {
  return [](const Matrix& rho) { return rho; };
}

struct KrausTerm {
  double weight = 0.0;  // n * (Choi eigenvalue); sign matches the eigenvalue
  Matrix op;            // m x n, unit Hilbert-Schmidt norm
};

/// Phi(rho) = sum weight_i A_i rho A_i^* with {E_i} u {F_i} orthonormal.
struct KrausDecomposition {
  BipartiteDims dims;
  std::vector<KrausTerm> positive_ops;
  std::vector<KrausTerm> negative_ops;
};

/// Each eigenvector v of the Choi matrix gives the Kraus operator A_v^T.
inline KrausDecomposition canonical_kraus(const BipartiteOperator& choi) {
  const SpectralSplit s = hermitian_spectral_split(choi);
  KrausDecomposition kd;
  kd.dims = choi.dims();
  const double n = choi.dims().n;
  for (Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double l = s.eigenvalues(i);
    if (std::abs(l) <= s.tol_zero) continue;
    KrausTerm term{n * l, Matrix(vec_to_operator(Vector(s.eigenvectors.col(i)), choi.dims()).transpose())};
    (l > 0 ? kd.positive_ops : kd.negative_ops).push_back(std::move(term));
  }
  // Largest |weight| first.
  auto by_magnitude = [](const KrausTerm& a, const KrausTerm& b) { return std::abs(a.weight) > std::abs(b.weight); };
  std::stable_sort(kd.positive_ops.begin(), kd.positive_ops.end(), by_magnitude);
  std::stable_sort(kd.negative_ops.begin(), kd.negative_ops.end(), by_magnitude);
  return kd;
}

inline BipartiteOperator choi_from_kraus_decomposition(const KrausDecomposition& kd) {
  const Index d = kd.dims.total();
  Matrix x = Matrix::Zero(d, d);
  for (const auto* group : {&kd.positive_ops, &kd.negative_ops}) {
    for (const auto& t : *group) {
      const Vector v = operator_to_vec(t.op.transpose());
      x += (t.weight / kd.dims.n) * v * v.adjoint();
    }
  }
  return {std::move(x), kd.dims};
}

/// Not k-positive if some negative Kraus operator has rank <= k.
inline Verdict kuah_sudarshan_test(const KrausDecomposition& kd, int k) {
  check_schmidt_index(kd.dims, k);
  std::optional<BipartiteOperator> choi;
  for (const auto& f : kd.negative_ops) {
    const RealVector sv = singular_values(f.op);
    const Index rank = (sv.array() > 1e-10 * sv(0)).count();
    if (rank > k) continue;
    if (!choi) choi = choi_from_kraus_decomposition(kd);
    const Vector v = operator_to_vec(f.op.transpose());
    if (auto w = detail::witness_verdict(*choi, k, v, "kuah_sudarshan")) {
      w->detail = "negative Kraus operator of rank " + std::to_string(rank);
      return *w;
    }
  }
  return detail::verdict(Status::Inconclusive, k, "kuah_sudarshan", "no negative Kraus operator of rank <= k");
}

// ---------------------------------------------------------------------------
// Spectral tests

/// More than (n-k)(m-k) negative eigenvalues rules out k-block positivity.
inline Verdict negative_count_test(const BipartiteOperator& x, int k) {
  require_hermitian(x, "negative_count_test");
  check_schmidt_index(x.dims(), k);
  const RealVector values = eigh(x.entries()).values;
  const double tol = default_tol_zero(values);
  const Index count = (values.array() < -tol).count();
  const std::int64_t limit = detail::negative_limit(x.dims(), k);
  Verdict v = count > limit ? detail::verdict(Status::NotKBlockPositive, k, "negative_count",
                                              "negative eigenspace is too large to avoid Schmidt rank <= k")
                            : detail::verdict(Status::Inconclusive, k, "negative_count");
  v.negative_count = count;
  v.negative_limit = limit;
  return v;
}

/// lambda_min / lambda_max >= 1 - m/k, and its two refinements by the number
/// r of negative eigenvalues, hold for every k-block positive X.
inline Verdict eigenvalue_ratio_test(const BipartiteOperator& x, int k) {
  require_hermitian(x, "eigenvalue_ratio_test");
  const BipartiteDims dims = x.dims();
  check_schmidt_index(dims, k);
  const RealVector values = eigh(x.entries()).values;
  const double tol = default_tol_zero(values);
  const double lmin = values(0), lmax = values(values.size() - 1);
  if (lmax <= tol) {
    if (spectral_scale(values) == 0.0) {
      return detail::verdict(Status::KBlockPositive, k, "zero_operator");
    }
    if (auto w = detail::witness_verdict(x, k, detail::most_negative_basis_state(x), "nonpositive_spectrum")) return *w;
    return detail::verdict(Status::NotKBlockPositive, k, "nonpositive_spectrum", "X <= 0 and X != 0");
  }
  const Index r = (values.array() < -tol).count();
  const double ratio = lmin / lmax;
  const double md = dims.min_dim();
  const double mn = static_cast<double>(dims.total());

  std::vector<std::pair<std::string, double>> floors;
  floors.emplace_back("ratio_basic", 1.0 - md / k);
  if (r > 0) {
    floors.emplace_back("ratio_rank_ineq1", 1.0 - static_cast<double>(forced_schmidt_rank(dims, r)) / k);
    if (dims.min_dim() > 1) {
      floors.emplace_back("ratio_rank_ineq2", 1.0 - mn * (md - 1) / ((k - 1) * mn + (md - k) * r));
    }
  }
  Verdict out = detail::verdict(Status::Inconclusive, k, "eigenvalue_ratio");
  out.negative_count = r;
  for (const auto& [name, floor] : floors) {
    out.bounds.push_back({name, floor, 1.0});
    if (ratio < floor - kStrictMargin) {
      out.status = Status::NotKBlockPositive;
      out.rule = name;
      out.detail = "lambda_min/lambda_max = " + std::to_string(ratio) + " < " + std::to_string(floor);
      return out;
    }
  }
  return out;
}

struct TestOptions {
  HeuristicOptions heuristic;
};

/// The three-condition spectral test, evaluated with one-sided bounds.
inline Verdict spectral_test(const BipartiteOperator& x, int k, const TestOptions& opts = {}) {
  require_hermitian(x, "spectral_test");
  const BipartiteDims dims = x.dims();
  check_schmidt_index(dims, k);
  const SpectralSplit s = hermitian_spectral_split(x);
  const double scale = spectral_scale(s.eigenvalues);

  if (s.negative_count == 0) {
    return detail::verdict(Status::KBlockPositive, k, "positive_semidefinite", "no negative eigenvalues");
  }

  const Matrix neg_vecs = s.eigenvectors.leftCols(s.negative_count);
  const Matrix nonpos_vecs = s.eigenvectors.leftCols(s.negative_count + s.zero_count);
  const RealVector neg_mags = -s.eigenvalues.head(s.negative_count);
  const BipartiteOperator p_neg = detail::projector_onto(neg_vecs, dims);

  Verdict diag = detail::verdict(Status::Inconclusive, k, "spectral");
  diag.negative_count = s.negative_count;

  // Condition (1): ||P^-||_{S(k)} = 1.
  const std::int64_t limit = detail::negative_limit(dims, k);
  if (s.negative_count > limit) {
    Verdict v = detail::verdict(Status::NotKBlockPositive, k, "condition_1_rank",
                                "negative eigenspace dimension exceeds (n-k)(m-k)");
    v.negative_count = s.negative_count;
    v.negative_limit = limit;
    return v;
  }
  BoundsOptions bopts;
  bopts.heuristic = opts.heuristic;
  const NormBounds pneg = op_norm_bounds(p_neg, k, bopts);
  if (pneg.lower_witness && pneg.lower >= 1.0 - 1e-9) {
    if (auto w = detail::witness_verdict(x, k, pneg.lower_witness->amplitudes(), "condition_1_witness")) return *w;
  }

  // Condition (2): upper bounds u >= ||P^0 + P^-||, w >= ||X^-||.
  const double u = std::min(detail::weighted_spectral_upper(nonpos_vecs, RealVector::Ones(nonpos_vecs.cols()), dims, k),
                            1.0);
  const double w = detail::weighted_spectral_upper(neg_vecs, neg_mags, dims, k);
  diag.bounds.push_back({"norm_P0_plus_Pneg", 0.0, u});
  diag.bounds.push_back({"norm_Xneg", 0.0, w});
  if (s.positive_count > 0 && u < 1.0 - kStrictMargin) {
    const double min_pos = s.eigenvalues(s.first_positive());
    const double threshold = w / (1.0 - u);
    if (min_pos >= threshold + kStrictMargin * scale) {
      Verdict v = detail::verdict(Status::KBlockPositive, k, "condition_2",
                                  "min positive eigenvalue " + std::to_string(min_pos) + " >= " +
                                      std::to_string(threshold));
      v.bounds = diag.bounds;
      return v;
    }
  }

  // Condition (3): nonsingular, equal negative eigenvalues, lower bounds on ||P^-||.
  const double p_upper = std::min(pneg.upper, detail::weighted_spectral_upper(neg_vecs, RealVector::Ones(neg_vecs.cols()),
                                                                              dims, k));
  const double p_lower = pneg.lower;
  diag.bounds.push_back({"norm_Pneg", p_lower, p_upper});
  const double lmin = s.eigenvalues(0);
  const double lneg_max = s.eigenvalues(s.negative_count - 1);
  const bool equal_negatives = (lneg_max - lmin) <= 1e-8 * std::abs(lmin);
  if (s.zero_count == 0 && s.positive_count > 0 && equal_negatives && p_upper < 1.0 - kStrictMargin &&
      p_lower < 1.0) {
    const double w_lower = std::abs(lmin) * p_lower;
    const double threshold = w_lower / (1.0 - p_lower);
    const double max_pos = s.eigenvalues(s.eigenvalues.size() - 1);
    if (max_pos < threshold - kStrictMargin * scale) {
      if (pneg.lower_witness) {
        if (auto v = detail::witness_verdict(x, k, pneg.lower_witness->amplitudes(), "condition_3")) {
          v->bounds = diag.bounds;
          return *v;
        }
      }
      Verdict v = detail::verdict(Status::NotKBlockPositive, k, "condition_3",
                                  "max positive eigenvalue " + std::to_string(max_pos) + " < " +
                                      std::to_string(threshold));
      v.bounds = diag.bounds;
      return v;
    }
  }
  // A heuristic state for P^- may still be a direct witness.
  if (pneg.lower_witness) {
    if (auto v = detail::witness_verdict(x, k, pneg.lower_witness->amplitudes(), "negative_projection_witness")) {
      v->bounds = diag.bounds;
      return *v;
    }
  }
  return diag;
}

/// Exact characterization for two distinct eigenvalues lambda_1 > lambda_2:
/// k-block positive iff ||P^-||_{S(k)} <= lambda_1 / (lambda_1 - lambda_2).
inline Verdict two_eigenvalue_test(const BipartiteOperator& x, int k, const TestOptions& opts = {}) {
  require_hermitian(x, "two_eigenvalue_test");
  const BipartiteDims dims = x.dims();
  check_schmidt_index(dims, k);
  const Eigensystem es = eigh(x.entries());
  const auto clusters = detail::eigenvalue_clusters(es.values);
  if (clusters.size() != 2) {
    throw InputError("two_eigenvalue_test: operator has " + std::to_string(clusters.size()) +
                     " distinct eigenvalues, expected 2");
  }
  const auto [lo_first, lo_count] = clusters[0];
  const auto [hi_first, hi_count] = clusters[1];
  const double l2 = es.values.segment(lo_first, lo_count).mean();
  const double l1 = es.values.segment(hi_first, hi_count).mean();
  const double tol = default_tol_zero(es.values);

  if (l2 >= -tol) return detail::verdict(Status::KBlockPositive, k, "two_eigenvalue_trivial", "X >= 0");
  if (l1 <= tol) {
    if (auto w = detail::witness_verdict(x, k, detail::most_negative_basis_state(x), "two_eigenvalue_trivial")) return *w;
    return detail::verdict(Status::NotKBlockPositive, k, "two_eigenvalue_trivial", "X <= 0 and X != 0");
  }

  const double threshold = l1 / (l1 - l2);
  const Matrix neg_vecs = es.vectors.middleCols(lo_first, lo_count);
  double p_lower = 0.0, p_upper = 1.0;
  std::optional<Vector> candidate;
  std::string how;
  if (lo_count > detail::negative_limit(dims, k)) {
    p_lower = p_upper = 1.0;
    how = "rank_forced";
  } else if (lo_count == 1) {
    const Vector v = neg_vecs.col(0);
    const double vk = vector_k_norm(v, dims, k);
    p_lower = p_upper = vk * vk;
    candidate = truncate_to_schmidt_rank(v, dims, k);
    how = "rank_one";
  } else {
    BoundsOptions bopts;
    bopts.heuristic = opts.heuristic;
    const NormBounds nb = op_norm_bounds(detail::projector_onto(neg_vecs, dims), k, bopts);
    p_lower = nb.lower;
    p_upper = nb.upper;
    if (nb.lower_witness) candidate = nb.lower_witness->amplitudes();
    how = "bounds";
  }

  Verdict out = detail::verdict(Status::Inconclusive, k, "two_eigenvalue");
  out.bounds.push_back({"norm_Pneg", p_lower, p_upper});
  out.bounds.push_back({"threshold", threshold, threshold});
  if (p_lower > threshold + kStrictMargin) {
    if (candidate) {
      if (auto w = detail::witness_verdict(x, k, *candidate, "two_eigenvalue")) {
        w->bounds = out.bounds;
        w->detail = "||P^-||_{S(k)} > lambda_1/(lambda_1-lambda_2) (" + how + ")";
        return *w;
      }
    }
    out.status = Status::NotKBlockPositive;
    out.detail = "||P^-||_{S(k)} > lambda_1/(lambda_1-lambda_2) (" + how + ")";
    return out;
  }
  if (p_upper <= threshold - kStrictMargin) {
    out.status = Status::KBlockPositive;
    out.detail = "||P^-||_{S(k)} <= lambda_1/(lambda_1-lambda_2) (" + how + ")";
    return out;
  }
  out.detail = "norm interval straddles the threshold (" + how + ")";
  return out;
}

/// Searches for SR(v) <= k with <v|X|v> < 0 by maximizing <v|(cI - X)|v>, c = ||X||.
inline std::optional<PureState> find_negative_witness(const BipartiteOperator& x, int k,
                                                      const HeuristicOptions& opts = {}) {
  require_hermitian(x, "find_negative_witness");
  check_schmidt_index(x.dims(), k);
  const double c = operator_norm(x);
  if (c == 0.0) return std::nullopt;
  Matrix shifted = c * Matrix::Identity(x.dims().total(), x.dims().total()) - x.entries();
  shifted = 0.5 * (shifted + shifted.adjoint()).eval();
  const NormBounds nb = op_norm_heuristic(BipartiteOperator(std::move(shifted), x.dims()), k, opts);
  if (!nb.lower_witness) return std::nullopt;
  const Vector& v = nb.lower_witness->amplitudes();
  if (expectation(x, v) < -kWitnessMargin) return *nb.lower_witness;
  return std::nullopt;
}

/// Runs the tests in a fixed order and returns the first decisive verdict.
inline Verdict certify(const BipartiteOperator& x, int k, const TestOptions& opts = {}) {
  require_hermitian(x, "certify");
  check_schmidt_index(x.dims(), k);
  const RealVector values = eigh(x.entries()).values;
  const double tol = default_tol_zero(values);
  if (values(0) >= -tol) {
    return detail::verdict(Status::KBlockPositive, k, "positive_semidefinite", "no negative eigenvalues");
  }

  std::vector<BoundInterval> merged;
  auto remember = [&](const Verdict& v) { merged.insert(merged.end(), v.bounds.begin(), v.bounds.end()); };

  Verdict count = negative_count_test(x, k);
  if (count.decisive()) return count;

  if (detail::eigenvalue_clusters(values).size() == 2) {
    Verdict two = two_eigenvalue_test(x, k, opts);
    if (two.decisive()) return two;
    remember(two);
  }

  Verdict spectral = spectral_test(x, k, opts);
  if (spectral.decisive()) return spectral;
  remember(spectral);

  Verdict ratio = eigenvalue_ratio_test(x, k);
  if (ratio.decisive()) return ratio;
  remember(ratio);

  if (auto w = find_negative_witness(x, k, opts.heuristic)) {
    if (auto v = detail::witness_verdict(x, k, w->amplitudes(), "witness_search")) return *v;
  }

  Verdict out = detail::verdict(Status::Inconclusive, k, "none", "no test was decisive");
  out.negative_count = count.negative_count;
  out.negative_limit = count.negative_limit;
  out.bounds = std::move(merged);
  return out;
}

}  // namespace schmidtnorm
