#pragma once

// Werner states rho_alpha = (I - alpha n E^Gamma) / (n^2 - alpha n) on H_n (x) H_n,
// and the projections P_r^- onto the -1 eigenspace of (X^Gamma)^{(x) r} for
// X = I - 2 E^Gamma (the alpha = 2/n member, rescaled).

#include "schmidtnorm/core.hpp"
#include "schmidtnorm/opnorm.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace schmidtnorm {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

struct WernerParams {
  int n = 2;
  double alpha = 0.0;

  WernerParams(int n_, double alpha_) : n(n_), alpha(alpha_) {
    if (n < 2) throw RangeError("Werner local dimension n = " + std::to_string(n) + " must be >= 2");
    if (!(alpha >= -1.0 && alpha <= 1.0)) {
      throw RangeError("Werner parameter alpha = " + std::to_string(alpha) + " must lie in [-1, 1]");
    }
  }
};

inline constexpr std::int64_t kDefaultSizeCap = 4096;

/// I - alpha n E, the partial transpose of rho_alpha scaled by n^2 - alpha n.
/// No range check on alpha.
inline BipartiteOperator scaled_werner_pt(int n, double alpha) {
  const BipartiteOperator e = maximally_entangled_projector(n);
  Matrix x = Matrix::Identity(e.entries().rows(), e.entries().cols()) - alpha * n * e.entries();
  return {std::move(x), e.dims()};
}

inline BipartiteOperator werner_state(const WernerParams& p) {
  const BipartiteOperator swap = swap_operator(p.n);  // E^Gamma = swap / n
  const double norm = static_cast<double>(p.n) * p.n - p.alpha * p.n;
  Matrix rho = (Matrix::Identity(swap.entries().rows(), swap.entries().cols()) - p.alpha * swap.entries()) / norm;
  return {std::move(rho), swap.dims()};
}

inline BipartiteOperator werner_state_pt(const WernerParams& p) {
  const BipartiteOperator x = scaled_werner_pt(p.n, p.alpha);
  return {x.entries() / (static_cast<double>(p.n) * p.n - p.alpha * p.n), x.dims()};
}

/// rho_alpha^Gamma is k-block positive iff alpha <= 1/k.
inline bool werner_pt_kpos(const WernerParams& p, int k) {
  if (k < 1 || k > p.n) {
    throw RangeError("k = " + std::to_string(k) + " must satisfy 1 <= k <= n = " + std::to_string(p.n));
  }
  return p.alpha <= 1.0 / k;
}

/// rho_alpha is PPT iff alpha <= 1/n.
inline bool werner_is_ppt(const WernerParams& p) { return werner_pt_kpos(p, p.n); }

/// rank(P_r^-) = (n^{2r} - (n^2 - 2)^r) / 2
inline BigInt neg_projector_rank(int n, int r) {
  if (n < 2) throw RangeError("n must be >= 2");
  if (r < 1) throw RangeError("r must be >= 1");
  const BigInt total = boost::multiprecision::pow(BigInt(n), 2 * r);
  const BigInt other = boost::multiprecision::pow(BigInt(n) * n - 2, r);
  return (total - other) / 2;
}

struct NegProjectorFamily {
  int n = 2;
  int r = 1;
  BigInt rank;
  /// On H_{n^r} (x) H_{n^r}; only materialized below the size cap.
  std::optional<BipartiteOperator> projector;
};

namespace detail {

inline std::int64_t side_of_power(int n, int r) { return checked_pow(n, 2 * r); }

inline void check_size_cap(int n, int r, std::int64_t size_cap) {
  if (r < 1) throw RangeError("r must be >= 1");
  const std::int64_t side = side_of_power(n, r);
  if (side > size_cap) {
    throw RangeError("matrix side n^(2r) = " + std::to_string(side) + " exceeds size cap " +
                     std::to_string(size_cap));
  }
}

}  // namespace detail

/// P_r^- = P_1^- (x) P_{r-1}^+ + P_1^+ (x) P_{r-1}^- with P_1^- = E, regrouped
/// onto H_{n^r} (x) H_{n^r}.
inline NegProjectorFamily build_neg_projector(int n, int r, std::int64_t size_cap = kDefaultSizeCap) {
  if (n < 2) throw RangeError("n must be >= 2");
  detail::check_size_cap(n, r, size_cap);
  const Matrix p1_neg = maximally_entangled_projector(n).entries();
  const Matrix p1_pos = Matrix::Identity(p1_neg.rows(), p1_neg.cols()) - p1_neg;
  Matrix neg = p1_neg, pos = p1_pos;
  for (int s = 2; s <= r; ++s) {
    Matrix next_neg = Eigen::kroneckerProduct(p1_neg, pos).eval();
    next_neg += Eigen::kroneckerProduct(p1_pos, neg).eval();
    Matrix next_pos = Eigen::kroneckerProduct(p1_neg, neg).eval();
    next_pos += Eigen::kroneckerProduct(p1_pos, pos).eval();
    neg = std::move(next_neg);
    pos = std::move(next_pos);
  }
  NegProjectorFamily fam;
  fam.n = n;
  fam.r = r;
  fam.rank = neg_projector_rank(n, r);
  fam.projector = permute_to_bipartite(neg, BipartiteDims(n, n), r);
  return fam;
}

/// (rho_alpha^Gamma)^{(x) r} on H_{n^r} (x) H_{n^r}.
inline BipartiteOperator tensor_power_pt(const WernerParams& p, int r, std::int64_t size_cap = kDefaultSizeCap) {
  detail::check_size_cap(p.n, r, size_cap);
  const Matrix base = werner_state_pt(p).entries();
  Matrix acc = base;
  for (int s = 2; s <= r; ++s) acc = Eigen::kroneckerProduct(acc, base).eval();
  return permute_to_bipartite(acc, BipartiteDims(p.n, p.n), r);
}

// ---------------------------------------------------------------------------
// Lower bound on ||P_r^-||_{S(2)}

/// (n^{2r} + (n^r - 2)(n^{2r} - (n^2-2)^r)/2) / (n^{2r} (n^r - 1)) in exact arithmetic.
inline BigRational werner_norm_lower_bound_exact(int n, int r) {
  if (n < 2 || r < 1) throw RangeError("werner_norm_lower_bound needs n >= 2, r >= 1");
  const BigInt nr = boost::multiprecision::pow(BigInt(n), r);
  const BigInt n2r = nr * nr;
  const BigInt rank = neg_projector_rank(n, r);
  return BigRational(n2r + (nr - 2) * rank, n2r * (nr - 1));
}

/// Floating evaluation of the rearranged form
///   (N-2)/(2(N-1)) - ((N-2) q - 2) / (2 (N-1)),   N = n^r, q = ((n^2-2)/n^2)^r,
/// which avoids forming n^{2r}.
inline double werner_norm_lower_bound_float(int n, int r) {
  if (n < 2 || r < 1) throw RangeError("werner_norm_lower_bound needs n >= 2, r >= 1");
  const long double big_n = std::pow(static_cast<long double>(n), r);
  const long double q = std::pow((static_cast<long double>(n) * n - 2.0L) / (static_cast<long double>(n) * n), r);
  const long double head = (big_n - 2.0L) / (2.0L * (big_n - 1.0L));
  const long double tail = ((big_n - 2.0L) * q - 2.0L) / (2.0L * (big_n - 1.0L));
  return static_cast<double>(head - tail);
}

/// Exact rationals while n^{2r} fits in 128 bits, the rearranged floating form beyond.
inline double werner_norm_lower_bound(int n, int r) {
  if (n < 2 || r < 1) throw RangeError("werner_norm_lower_bound needs n >= 2, r >= 1");
  const BigInt n2r = boost::multiprecision::pow(BigInt(n), 2 * r);
  if (boost::multiprecision::msb(n2r) < 127) {
    return static_cast<double>(werner_norm_lower_bound_exact(n, r));
  }
  return werner_norm_lower_bound_float(n, r);
}

/// min{1, 2 / s} with s the smallest Schmidt rank forced into range(P_r^-),
/// computed in big integers so it works for any r.
inline double werner_ineq1_bound(int n, int r) {
  if (n < 2 || r < 1) throw RangeError("werner_ineq1_bound needs n >= 2, r >= 1");
  const BigInt big_n = boost::multiprecision::pow(BigInt(n), r);
  const BigInt rank = neg_projector_rank(n, r);
  if (big_n < 2) return 1.0;
  // Smallest s in [1, N] with rank >= (N - s)^2 + 1; (N - s)^2 decreases in s.
  BigInt lo = 1, hi = big_n;
  while (lo < hi) {
    const BigInt mid = (lo + hi) / 2;
    const BigInt gap = big_n - mid;
    if (rank >= gap * gap + 1) hi = mid;
    else lo = mid + 1;
  }
  if (lo <= 2) return 1.0;
  return 2.0 / static_cast<double>(lo);
}

struct LimitRow {
  int r = 1;
  BigInt rank;
  double bound_ineq2 = 0.0;
  double bound_ineq1 = 0.0;
  std::optional<double> heuristic;
  std::optional<PureState> witness;
  double threshold = 0.5;
  /// Set for n >= 4 only: some certified lower bound exceeds 1/2 + 1e-9.
  std::optional<bool> exceeds_threshold;
};

struct LimitReportOptions {
  std::int64_t size_cap = kDefaultSizeCap;
  HeuristicOptions heuristic;
};

/// Certified lower bounds on ||P_r^-||_{S(2)} for r = 1..r_max. A bound above
/// 1/2 would show rho_{2/n} is distillable.
inline std::vector<LimitRow> werner_limit_report(int n, int r_max, const LimitReportOptions& opts = {}) {
  if (n < 2) throw RangeError("n must be >= 2");
  if (r_max < 1) throw RangeError("r_max must be >= 1");
  std::vector<LimitRow> rows;
  for (int r = 1; r <= r_max; ++r) {
    LimitRow row;
    row.r = r;
    row.rank = neg_projector_rank(n, r);
    row.bound_ineq2 = werner_norm_lower_bound(n, r);
    row.bound_ineq1 = werner_ineq1_bound(n, r);
    const BigInt side = boost::multiprecision::pow(BigInt(n), 2 * r);
    if (side <= opts.size_cap) {
      const NegProjectorFamily fam = build_neg_projector(n, r, opts.size_cap);
      const BipartiteOperator& p = *fam.projector;
      // P is a projection by construction, so the dense positivity check is
      // skipped. Start from P applied to the maximally entangled state.
      const int side_local = static_cast<int>(p.dims().n);
      const Vector first =
          truncate_to_schmidt_rank(p.entries() * maximally_entangled_state(side_local).amplitudes(), p.dims(), 2);
      const NormBounds nb = detail::heuristic_search(p, 2, first, opts.heuristic);
      row.heuristic = nb.lower;
      row.witness = nb.lower_witness;
    }
    if (n >= 4) {
      double best = std::max(row.bound_ineq1, row.bound_ineq2);
      if (row.heuristic) best = std::max(best, *row.heuristic);
      row.exceeds_threshold = best > row.threshold + 1e-9;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace schmidtnorm
