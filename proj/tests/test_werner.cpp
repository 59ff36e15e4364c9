#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace schmidtnorm;

TEST(WernerParamsTest, RangeChecks) {
  EXPECT_THROW(WernerParams(1, 0.0), RangeError);
  EXPECT_THROW(WernerParams(3, 1.5), RangeError);
  EXPECT_THROW(WernerParams(3, -1.01), RangeError);
  EXPECT_NO_THROW(WernerParams(3, -1.0));
}

TEST(WernerState, ZeroParameterIsMaximallyMixed) {
  for (int n : {2, 3}) {
    const BipartiteOperator rho = werner_state(WernerParams(n, 0.0));
    EXPECT_LT((rho.entries() - Matrix::Identity(n * n, n * n) / static_cast<double>(n * n)).norm(), 1e-15);
  }
}

TEST(WernerState, IsDensityOperator) {
  for (int n : {2, 3, 4})
    for (double alpha : {-1.0, 0.3, 1.0}) {
      const BipartiteOperator rho = werner_state(WernerParams(n, alpha));
      EXPECT_NEAR(rho.entries().trace().real(), 1.0, 1e-10);
      EXPECT_GE(eigh(rho).values(0), -1e-10);
      EXPECT_NO_THROW(require_density(rho, "test"));
    }
}

TEST(WernerState, PartialTransposeMatchesScaledForm) {
  for (int n : {2, 3})
    for (double alpha : {-0.7, 0.2, 0.8}) {
      const WernerParams p(n, alpha);
      EXPECT_LT((partial_transpose(werner_state(p)).entries() - werner_state_pt(p).entries()).norm(), 1e-14);
      const double scale = n * n - alpha * n;
      EXPECT_LT((werner_state_pt(p).entries() * scale - scaled_werner_pt(n, alpha).entries()).norm(), 1e-13);
    }
}

TEST(WernerPtKpos, Examples) {
  EXPECT_TRUE(werner_pt_kpos(WernerParams(3, 0.4), 2));
  EXPECT_FALSE(werner_pt_kpos(WernerParams(3, 0.6), 2));
  for (double alpha : {-1.0, 0.0, 0.5, 1.0}) EXPECT_TRUE(werner_pt_kpos(WernerParams(4, alpha), 1));
  EXPECT_THROW(werner_pt_kpos(WernerParams(3, 0.1), 4), RangeError);
  EXPECT_THROW(werner_pt_kpos(WernerParams(3, 0.1), 0), RangeError);
}

TEST(WernerPtKpos, AgreesWithTwoEigenvalueTest) {
  for (int n : {2, 3, 4})
    for (int k = 1; k <= n; ++k)
      for (double alpha : {-0.5, 1.0 / k - 0.01, 1.0 / k + 0.01, 0.95}) {
        if (alpha > 1.0) continue;
        const WernerParams p(n, alpha);
        const Verdict v = two_eigenvalue_test(werner_state_pt(p), k);
        ASSERT_TRUE(v.decisive()) << n << " " << k << " " << alpha;
        EXPECT_EQ(v.status == Status::KBlockPositive, werner_pt_kpos(p, k)) << n << " " << k << " " << alpha;
      }
}

TEST(WernerPpt, MatchesEigenvalueSign) {
  for (int n : {2, 3, 4})
    for (double delta : {-0.01, 0.01}) {
      const WernerParams p(n, 1.0 / n + delta);
      const bool positive = eigh(werner_state_pt(p)).values(0) >= 0.0;
      EXPECT_EQ(werner_is_ppt(p), positive);
      EXPECT_EQ(werner_is_ppt(p), werner_pt_kpos(p, n));
    }
}

TEST(NegRank, Examples) {
  EXPECT_EQ(neg_projector_rank(2, 1), 1);
  EXPECT_EQ(neg_projector_rank(4, 2), 30);
  for (int n = 2; n <= 9; ++n) EXPECT_EQ(neg_projector_rank(n, 1), 1);
  EXPECT_THROW(neg_projector_rank(1, 1), RangeError);
  EXPECT_THROW(neg_projector_rank(2, 0), RangeError);
}

TEST(NegRank, ClosedFormMatchesRecurrence) {
  for (int n = 2; n <= 5; ++n)
    for (int r = 1; r <= 6; ++r) EXPECT_EQ(neg_projector_rank(n, r), oracle::neg_rank_recurrence(n, r)) << n << " " << r;
  // Big-integer path well beyond 64 bits.
  EXPECT_EQ(neg_projector_rank(7, 40), oracle::neg_rank_recurrence(7, 40));
}

TEST(NegProjector, SmallCases) {
  const NegProjectorFamily one = build_neg_projector(2, 1);
  ASSERT_TRUE(one.projector.has_value());
  EXPECT_LT((one.projector->entries() - maximally_entangled_projector(2).entries()).norm(), 1e-15);
  EXPECT_EQ(one.rank, 1);

  const NegProjectorFamily two = build_neg_projector(2, 2);
  EXPECT_EQ(two.projector->dims(), BipartiteDims(4, 4));
  EXPECT_EQ(two.rank, 6);
  EXPECT_EQ(oracle::eigen_rank(two.projector->entries()), 6);
}

TEST(NegProjector, MaterializedInvariants) {
  for (int r = 1; r <= 3; ++r) {
    const NegProjectorFamily fam = build_neg_projector(2, r);
    const Matrix& p = fam.projector->entries();
    EXPECT_TRUE(fam.projector->is_hermitian());
    EXPECT_LT(max_abs(p * p - p), 1e-12);
    EXPECT_NEAR(p.trace().real(), static_cast<double>(fam.rank), 1e-6);
    EXPECT_EQ(oracle::eigen_rank(p), static_cast<Index>(fam.rank));
  }
}

TEST(NegProjector, IsNegativeEigenspaceOfTensorPower) {
  for (const auto& [n, r] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    const BipartiteOperator x = tensor_power_pt(WernerParams(n, 2.0 / n), r);
    const SpectralSplit s = hermitian_spectral_split(x);
    const NegProjectorFamily fam = build_neg_projector(n, r);
    EXPECT_LT(max_abs(s.proj_neg - fam.projector->entries()), 1e-9);
  }
}

TEST(NegProjector, SizeCap) {
  EXPECT_THROW(build_neg_projector(4, 4), RangeError);
  EXPECT_THROW(build_neg_projector(2, 3, 32), RangeError);
  EXPECT_NO_THROW(build_neg_projector(2, 3, 64));
}

TEST(TensorPower, SingleCopyAndSpectrum) {
  const WernerParams p(3, 0.3);
  EXPECT_LT((tensor_power_pt(p, 1).entries() - werner_state_pt(p).entries()).norm(), 1e-15);

  for (int n : {2, 3}) {
    const WernerParams q(n, 2.0 / n);
    const double scale = n * n - 2.0;  // n^2 - alpha n at alpha = 2/n
    const int r = 2;
    const RealVector ev = eigh(tensor_power_pt(q, r)).values * std::pow(scale, r);
    const auto clusters = detail::eigenvalue_clusters(ev);
    ASSERT_EQ(clusters.size(), 2u);
    EXPECT_NEAR(ev(0), -1.0, 1e-9);
    EXPECT_NEAR(ev(ev.size() - 1), 1.0, 1e-9);
  }
}

TEST(TensorPower, RegroupingKeepsSpectrum) {
  const WernerParams p(2, 0.7);
  const Matrix base = werner_state_pt(p).entries();
  const Matrix plain = Eigen::kroneckerProduct(base, base).eval();
  const RealVector a = eigh(plain).values;
  const RealVector b = eigh(tensor_power_pt(p, 2)).values;
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(tensor_power_pt(p, 2).entries(), oracle::regroup_loops(plain, 2, 2));
}

TEST(TensorPower, TwoCopyCertification) {
  // Two copies of the PT Werner state at alpha = 2/n: only decidable consequences are checked.
  const BipartiteOperator x = tensor_power_pt(WernerParams(2, 1.0), 2);
  const Verdict v = certify(x, 2);
  EXPECT_NE(v.status, Status::KBlockPositive);  // alpha = 1 > 1/2: one copy already has a witness
}

TEST(LowerBound, FirstPowerValue) {
  EXPECT_NEAR(werner_norm_lower_bound(4, 1), 0.375, 1e-15);
  EXPECT_EQ(werner_norm_lower_bound_exact(4, 1), BigRational(3, 8));
}

TEST(LowerBound, MatchesProjectionIneq2) {
  for (int n = 2; n <= 5; ++n)
    for (int r = 1; r <= 4; ++r) {
      const std::int64_t big_n = detail::checked_pow(n, r);
      const auto rank = static_cast<std::int64_t>(neg_projector_rank(n, r));
      const BipartiteDims dims(static_cast<int>(big_n), static_cast<int>(big_n));
      EXPECT_NEAR(werner_norm_lower_bound(n, r), projection_ineq2(dims, rank, 2), 1e-12) << n << " " << r;
    }
}

TEST(LowerBound, FloatAndExactPathsAgree) {
  for (int n = 2; n <= 6; ++n)
    for (int r = 1; r <= 12; ++r) {
      const double exact = static_cast<double>(werner_norm_lower_bound_exact(n, r));
      EXPECT_NEAR(werner_norm_lower_bound_float(n, r), exact, 1e-12) << n << " " << r;
    }
}

TEST(LowerBound, SequenceForFourDimensions) {
  std::vector<double> b;
  for (int r = 1; r <= 8; ++r) b.push_back(werner_norm_lower_bound(4, r));
  // The bound drops from 3/8 at r = 1 to about 0.176 at r = 2 and only then rises.
  EXPECT_LT(b[1], b[0]);
  for (int r = 2; r < 8; ++r) EXPECT_GT(b[r], b[r - 1]) << "r=" << r + 1;
  for (double v : b) EXPECT_LT(v, 0.5);
}

TEST(LowerBound, BelowOneHalfAndTendsToIt) {
  for (int n = 4; n <= 6; ++n) {
    for (int r = 1; r <= 200; ++r) EXPECT_LT(werner_norm_lower_bound(n, r), 0.5) << n << " " << r;
  }
  int r = 1;
  while (std::pow(14.0 / 16.0, r) >= 1e-3) ++r;
  EXPECT_NEAR(werner_norm_lower_bound(4, r), 0.5, 1e-3);
  EXPECT_NEAR(werner_norm_lower_bound(4, 400), 0.5, 1e-12);
}

TEST(Ineq1Bound, MatchesGenericHelper) {
  for (int n = 2; n <= 4; ++n)
    for (int r = 1; r <= 3; ++r) {
      const std::int64_t big_n = detail::checked_pow(n, r);
      const auto rank = static_cast<std::int64_t>(neg_projector_rank(n, r));
      EXPECT_NEAR(werner_ineq1_bound(n, r), projection_ineq1(BipartiteDims(static_cast<int>(big_n), static_cast<int>(big_n)), rank, 2), 1e-15);
    }
  EXPECT_NEAR(werner_ineq1_bound(4, 1), 0.5, 1e-15);
}

TEST(LimitReport, FourDimensionsFirstRows) {
  LimitReportOptions opts;
  const auto rows = werner_limit_report(4, 2, opts);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_NEAR(rows[0].bound_ineq2, 0.375, 1e-15);
  ASSERT_TRUE(rows[0].heuristic.has_value());
  EXPECT_NEAR(*rows[0].heuristic, 0.5, 1e-6);
  EXPECT_LE(rows[0].bound_ineq2, *rows[0].heuristic);
  for (const auto& row : rows) {
    EXPECT_EQ(row.threshold, 0.5);
    ASSERT_TRUE(row.exceeds_threshold.has_value());
    EXPECT_FALSE(*row.exceeds_threshold);
    ASSERT_TRUE(row.witness.has_value());
    EXPECT_LE(schmidt_rank(*row.witness), 2);
  }
}

TEST(LimitReport, HeuristicDominatesClosedForm) {
  for (int n = 2; n <= 4; ++n) {
    const auto rows = werner_limit_report(n, 2);
    for (const auto& row : rows) {
      ASSERT_TRUE(row.heuristic.has_value());
      EXPECT_GE(*row.heuristic, row.bound_ineq2 - 1e-6) << n << " " << row.r;
      EXPECT_LE(*row.heuristic, 1.0 + 1e-9);
      EXPECT_EQ(row.exceeds_threshold.has_value(), n >= 4);
    }
  }
}

TEST(LimitReport, BeyondCapOnlyClosedForm) {
  LimitReportOptions opts;
  opts.size_cap = 16;
  const auto rows = werner_limit_report(4, 5, opts);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_TRUE(rows[0].heuristic.has_value());
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_FALSE(rows[i].heuristic.has_value());
  EXPECT_EQ(rows[4].rank, neg_projector_rank(4, 5));
}

TEST(LimitReport, Deterministic) {
  LimitReportOptions opts;
  opts.heuristic.seed = 5;
  const auto a = werner_limit_report(3, 2, opts);
  const auto b = werner_limit_report(3, 2, opts);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].heuristic, b[i].heuristic);
}
