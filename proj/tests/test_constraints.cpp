#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "smartpatch/constraints.hpp"
#include "smartpatch/shared_projection.hpp"

using namespace smartpatch;

namespace {

ScalarGrid single(std::size_t i, std::size_t j, double v = 1.0) {
  ScalarGrid g;
  g(i, j) = v;
  return g;
}

// Small integer grid used for frozen rational values below.
ScalarGrid sample_grid_g() {
  ScalarGrid g;
  const double v[16] = {3, -1, 4, 1, -5, 9, -2, 6, 5, -3, 5, 8, -9, 7, 9, -3};
  for (std::size_t k = 0; k < 16; ++k) g.values()[k] = v[k];
  return g;
}

ScalarGrid random_compliant(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  std::array<double, 4> c{};
  std::array<double, 7> f{};
  for (double& x : c) x = d(rng);
  for (double& x : f) x = d(rng);
  return bs_solve(c, f);
}

}  // namespace

TEST(DiagonalMatrix, ZeroGrid) {
  EXPECT_EQ(diagonal_matrix(ScalarGrid{}, DiagonalKind::Main), Mat4{});
  EXPECT_EQ(diagonal_matrix(ScalarGrid{}, DiagonalKind::Anti), Mat4{});
}

TEST(DiagonalMatrix, SingleInnerEntry) {
  EXPECT_EQ(diagonal_matrix(single(1, 1), DiagonalKind::Main)(0, 0), 9.0);
}

TEST(DiagonalMatrix, ConstantGrid) {
  const Poly p = collapse_diagonal(ScalarGrid::constant(2.5), DiagonalKind::Main);
  EXPECT_EQ(diagonal_matrix(ScalarGrid::constant(2.5), DiagonalKind::Main)(3, 3), 2.5);
  for (std::size_t k = 1; k <= 6; ++k) EXPECT_NEAR(p.coefficient(k), 0.0, 1e-13);
  EXPECT_NEAR(p.coefficient(0), 2.5, 1e-13);
}

TEST(CollapseDiagonal, ZeroGrid) {
  for (DiagonalKind d : {DiagonalKind::Main, DiagonalKind::Anti}) {
    const Poly p = collapse_diagonal(ScalarGrid{}, d);
    EXPECT_EQ(p.coeffs(), std::vector<double>(7, 0.0));
  }
}

TEST(CollapseDiagonal, FrozenCoefficients) {
  const ScalarGrid g = sample_grid_g();
  EXPECT_EQ(collapse_diagonal(g, DiagonalKind::Main).coeffs(),
            (std::vector<double>{212, -816, 1116, -725, 243, -36, 3}));
  EXPECT_EQ(collapse_diagonal(g, DiagonalKind::Anti).coeffs(),
            (std::vector<double>{-212, 576, -660, 394, -132, 24, 1}));
}

TEST(CollapseDiagonal, MatchesBernsteinExpansion) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const ScalarGrid g = oracle::random_grid(rng);
    for (bool anti : {false, true}) {
      const auto expect = oracle::diagonal_coefficients(g, anti);
      const Poly p = collapse_diagonal(g, anti ? DiagonalKind::Anti : DiagonalKind::Main);
      for (std::size_t k = 0; k <= 6; ++k) EXPECT_NEAR(p.coefficient(k), expect[k], 1e-10 * g.scale());
    }
  }
}

TEST(CollapseDiagonal, MatchesSurfaceSampling) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> t(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarGrid g = oracle::random_grid(rng);
    const Poly main = collapse_diagonal(g, DiagonalKind::Main);
    const Poly anti = collapse_diagonal(g, DiagonalKind::Anti);
    for (int k = 0; k < 50; ++k) {
      const double s = t(rng);
      EXPECT_NEAR(main(s), oracle::de_casteljau_grid(g, s, s), 1e-10 * g.scale());
      EXPECT_NEAR(anti(s), oracle::de_casteljau_grid(g, s, 1.0 - s), 1e-10 * g.scale());
    }
  }
}

TEST(CollapseDiagonal, BilinearIsQuadratic) {
  const ScalarGrid g = oracle::bilinear_grid(1.0, -2.0, 3.5, 0.25);
  for (DiagonalKind d : {DiagonalKind::Main, DiagonalKind::Anti}) {
    const Poly p = collapse_diagonal(g, d);
    for (std::size_t k = 3; k <= 6; ++k) EXPECT_NEAR(p.coefficient(k), 0.0, 1e-12);
    EXPECT_LE(p.effective_degree(1e-12), 2u);
  }
}

TEST(PolyType, EffectiveDegree) {
  const Poly p({0.0, 1e-15, 0.0, 2.0, 1.0});
  EXPECT_EQ(p.nominal_degree(), 4u);
  EXPECT_EQ(p.effective_degree(1e-12), 1u);
  EXPECT_EQ(p.coefficient(1), 2.0);
  EXPECT_NEAR(p(2.0), 5.0 + 8e-15, 1e-15);
}

TEST(Omega, ReadingRuleRows) {
  const MatRC om = build_omega(DiagonalKind::Main);
  // r42 is row-major entry 13
  for (std::size_t c = 0; c < 16; ++c) {
    const double expect = c == 0 ? 3.0 : c == 1 ? -6.0 : c == 2 ? 3.0 : 0.0;
    EXPECT_EQ(om(13, c), expect) << c;
    EXPECT_EQ(om(15, c), c == 0 ? 1.0 : 0.0) << c;
  }
}

TEST(Omega, AgreesWithDiagonalMatrixExactly) {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> d(-20, 20);
  for (DiagonalKind kind : {DiagonalKind::Main, DiagonalKind::Anti}) {
    const RationalMat om = build_omega_exact(kind);
    for (int trial = 0; trial < 100; ++trial) {
      ScalarGrid g;
      RationalMat xi(16, 1);
      for (std::size_t k = 0; k < 16; ++k) {
        const int v = d(rng);
        g.values()[k] = v;
        xi(k, 0) = v;
      }
      const RationalMat rho = mat_mul(om, xi);
      const Mat4 r = diagonal_matrix(g, kind);
      // integer inputs keep the double path exact
      for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(rho(k, 0), Rational(static_cast<long long>(r(k / 4, k % 4))));
    }
  }
}

TEST(Lambda, MatchesReferenceTable) {
  const ConstraintSystem& cs = constraint_system();
  EXPECT_EQ(cs.lambda, reference_lambda());
  EXPECT_EQ(cs.rank, 5u);
  const std::vector<double> row0{1, -3, 3, -1, -3, 9, -9, 3, 3, -9, 9, -3, -1, 3, -3, 1};
  for (std::size_t c = 0; c < 16; ++c) {
    EXPECT_EQ(cs.lambda(0, c), row0[c]);
    EXPECT_EQ(cs.lambda(3, c), -row0[c]);
  }
}

TEST(Lambda, Partition) {
  const ConstraintSystem& cs = constraint_system();
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(cs.lambda1(r, k), cs.lambda(r, kCornerIndices[k]));
    for (std::size_t k = 0; k < 12; ++k) EXPECT_EQ(cs.lambda2(r, k), cs.lambda(r, kInteriorIndices[k]));
  }
  EXPECT_EQ(cs.reduced_pivots, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(cs.free_cols, (std::vector<std::size_t>{5, 6, 7, 8, 9, 10, 11}));
}

TEST(Lambda, RowsAreLeadingCoefficients) {
  std::mt19937_64 rng(14);
  const ConstraintSystem& cs = constraint_system();
  for (int trial = 0; trial < 20; ++trial) {
    const ScalarGrid g = oracle::random_grid(rng);
    const auto main = oracle::diagonal_coefficients(g, false);
    const auto anti = oracle::diagonal_coefficients(g, true);
    for (std::size_t r = 0; r < 6; ++r) {
      double s = 0;
      for (std::size_t c = 0; c < 16; ++c) s += cs.lambda(r, c) * g.values()[c];
      const double expect = r < 3 ? main[6 - r] : anti[6 - (r - 3)];
      EXPECT_NEAR(s, expect, 1e-10 * g.scale());
    }
  }
}

TEST(InnerIdentity, ResolvedSign) {
  const InnerIdentity& id = constraint_system().inner_identity;
  EXPECT_EQ(id.inner_sign, 1);
  EXPECT_EQ(id.corner_coefficient, Rational(1, 9));
  EXPECT_TRUE(id.plus_variant_in_row_space);
  EXPECT_FALSE(id.minus_variant_in_row_space);
}

TEST(InnerIdentity, BilinearAndZero) {
  EXPECT_EQ(bs_inner_identity(ScalarGrid{}), 0.0);
  EXPECT_NEAR(bs_inner_identity(oracle::bilinear_grid(9, -18, 27, 3)), 0.0, 1e-12);
}

TEST(Residuals, Bilinear) {
  const ConstraintReport r = bs_residuals(oracle::bilinear_grid(1, 2, -3, 4), 1e-12);
  EXPECT_TRUE(r.compliant);
  EXPECT_EQ(r.tolerance_used, 1e-12);
}

TEST(Residuals, SingleInnerEntry) {
  const ConstraintReport r = bs_residuals(single(1, 1));
  EXPECT_FALSE(r.compliant);
  EXPECT_EQ(r.per_diagonal[0].kind, DiagonalKind::Main);
  EXPECT_EQ(r.per_diagonal[0].leading[0], 9.0);
  EXPECT_EQ(r.compliant, r.max_residual <= r.tolerance_used);
}

TEST(Solve, Homogeneous) { EXPECT_EQ(bs_solve({0, 0, 0, 0}, {}), ScalarGrid{}); }

TEST(Solve, FrozenCornerResponse) {
  const ScalarGrid g = bs_solve({1, 0, 0, 0}, {});
  const double expect[16] = {1, 2.0 / 3, 1.0 / 3, 0, 1.0 / 3, 2.0 / 9, 1.0 / 9, 0, 0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(g.values()[k], expect[k], 1e-15) << k;
}

TEST(Solve, ConstantFromBilinearFreeValues) {
  const ScalarGrid bl = ScalarGrid::constant(4.0);
  std::array<double, 7> f{};
  const auto& free = constraint_system().free_cols;
  for (std::size_t k = 0; k < 7; ++k) f[k] = bl.values()[kInteriorIndices[free[k]]];
  const ScalarGrid g = bs_solve({4, 4, 4, 4}, f);
  EXPECT_LE(max_abs_diff(g.as_matrix(), bl.as_matrix()), 1e-12);
  EXPECT_TRUE(bs_residuals(g).compliant);
}

TEST(SolveProperty, CompliantWithIdentity) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 300; ++trial) {
    const ScalarGrid g = random_compliant(rng);
    EXPECT_TRUE(bs_residuals(g).compliant);
    EXPECT_LE(std::abs(bs_inner_identity(g)), 1e-12 * g.scale());
  }
}

TEST(Project, FrozenProjection) {
  const ScalarGrid p = bs_project(sample_grid_g());
  const double expect[12] = {153.0 / 152,  -563.0 / 456, -295.0 / 152, 1643.0 / 684,
                             2473.0 / 684, 1789.0 / 456, -1067.0 / 456, 3949.0 / 684,
                             5387.0 / 684, 561.0 / 152,  1285.0 / 456,  873.0 / 152};
  for (std::size_t k = 0; k < 12; ++k) EXPECT_NEAR(p.values()[kInteriorIndices[k]], expect[k], 1e-14) << k;
  for (std::size_t c : kCornerIndices) EXPECT_EQ(p.values()[c], sample_grid_g().values()[c]);
}

TEST(Project, FixedPoints) {
  const ScalarGrid bl = oracle::bilinear_grid(1, -4, 2, 7);
  EXPECT_LE(max_abs_diff(bs_project(bl).as_matrix(), bl.as_matrix()), 1e-12);
  std::mt19937_64 rng(16);
  const ScalarGrid g = random_compliant(rng);
  EXPECT_LE(max_abs_diff(bs_project(g).as_matrix(), g.as_matrix()), 1e-12 * g.scale());
}

TEST(Project, BeatsRandomCompetitors) {
  ScalarGrid g = oracle::bilinear_grid(2, -1, 3, 5);
  g(1, 1) += 1.0;
  const ScalarGrid p = bs_project(g);
  EXPECT_TRUE(bs_residuals(p).compliant);
  auto dist2 = [&](const ScalarGrid& h) {
    double s = 0;
    for (std::size_t k : kInteriorIndices) s += (h.values()[k] - g.values()[k]) * (h.values()[k] - g.values()[k]);
    return s;
  };
  const double best = dist2(p);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  const auto& free = constraint_system().free_cols;
  for (int trial = 0; trial < 1000; ++trial) {
    std::array<double, 7> f{};
    for (std::size_t k = 0; k < 7; ++k) f[k] = p.values()[kInteriorIndices[free[k]]] + d(rng) * (trial % 10 + 1) / 10.0;
    const ScalarGrid c = bs_solve({g(0, 0), g(0, 3), g(3, 0), g(3, 3)}, f);
    EXPECT_GE(dist2(c), best - 1e-12);
  }
}

TEST(ProjectProperty, IdempotentCornersExactIdentity) {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 200; ++trial) {
    const ScalarGrid g = oracle::random_grid(rng);
    const ScalarGrid p = bs_project(g);
    const ScalarGrid pp = bs_project(p);
    EXPECT_TRUE(bs_residuals(p).compliant);
    EXPECT_LE(max_abs_diff(pp.as_matrix(), p.as_matrix()), 1e-12 * g.scale());
    for (std::size_t c : kCornerIndices) EXPECT_EQ(p.values()[c], g.values()[c]);
    EXPECT_LE(std::abs(bs_inner_identity(p)), 1e-12 * p.scale());
  }
}

TEST(Hermite, Phi) {
  auto corners = [](double a, double b, double c, double d) {
    HermiteGrid h;
    h.h(1, 1) = a;
    h.h(1, 2) = b;
    h.h(2, 1) = c;
    h.h(2, 2) = d;
    return h;
  };
  EXPECT_EQ(hs_phi(corners(1, 0, 0, 0)), 1.0);
  EXPECT_EQ(hs_phi(corners(1, 1, 1, 1)), 0.0);
  EXPECT_EQ(hs_phi(corners(1, 0, 0, 1)), 2.0);
}

TEST(Hermite, Twists) {
  const HsTwists a = hs_twists(1, 0.5, 0.5);
  EXPECT_EQ(a.x33, 1.0);
  EXPECT_EQ(a.x34, 1.0);
  EXPECT_EQ(a.x43, 1.0);
  EXPECT_EQ(a.x44, 1.0);
  const HsTwists z = hs_twists(0, 3.0, -7.0);
  EXPECT_EQ(z.x33 + z.x34 + z.x43 + z.x44, 0.0);
  const HsTwists b = hs_twists(1, 0, 1);
  EXPECT_EQ(b.x33, 2.0);
  EXPECT_EQ(b.x44, 0.0);
  EXPECT_EQ(b.x43, 2.0);
  EXPECT_EQ(b.x34, 0.0);
}

TEST(Hermite, AlphaBeta) {
  HermiteGrid h;
  h.h(1, 1) = 1.0;  // phi = 1
  // a = h14 - h24 + h41 - h42 = -1, b = h13 - h23 + h41 - h42 = -1
  h.h(1, 4) = -1.0;
  h.h(1, 3) = -1.0;
  const auto ab = hs_alpha_beta(h);
  ASSERT_TRUE(ab.has_value());
  EXPECT_EQ(ab->alpha, 0.0);
  EXPECT_EQ(ab->beta, 0.0);
  EXPECT_FALSE(hs_alpha_beta(HermiteGrid{}).has_value());
}

TEST(Hermite, ValidateZero) {
  const HsReport r = hs_validate(HermiteGrid{});
  EXPECT_TRUE(r.compliant);
  EXPECT_TRUE(r.degenerate_phi);
  EXPECT_FALSE(r.alpha.has_value());
  EXPECT_EQ(r.tangent_residual, 0.0);
}

TEST(Hermite, ValidateHandBuilt) {
  HermiteGrid h;
  h.h(1, 1) = 1.0;
  h.h(3, 3) = h.h(4, 4) = h.h(3, 4) = h.h(4, 3) = 1.0;
  h.h(3, 1) = -4.0;  // tangent sum -4 = -4 phi
  const HsReport r = hs_validate(h);
  EXPECT_EQ(r.phi, 1.0);
  EXPECT_TRUE(r.compliant);
  EXPECT_TRUE(r.alpha.has_value());
}

TEST(HermiteProperty, FilledTwistsAreBezierCompliant) {
  std::mt19937_64 rng(19);
  int built = 0;
  for (int trial = 0; trial < 300; ++trial) {
    HermiteGrid h(oracle::random_grid(rng));
    // make the tangent sum hit -4 phi by adjusting h31
    const double phi = hs_phi(h);
    const double t = h.h(3, 1) - h.h(3, 2) + h.h(4, 1) - h.h(4, 2) + h.h(1, 4) - h.h(2, 4) - h.h(2, 3) + h.h(1, 3);
    h.h(3, 1) += -4.0 * phi - t;
    if (!hs_fill_twists(h)) continue;
    ++built;
    const HsReport r = hs_validate(h);
    EXPECT_TRUE(r.compliant);
    EXPECT_TRUE(r.bs_equivalent);
    EXPECT_TRUE(bs_residuals(hermite_to_bezier(h)).compliant);
  }
  EXPECT_GT(built, 290);
}

TEST(HermiteProperty, BezierCompliantImpliesHermiteConditions) {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 200; ++trial) {
    const ScalarGrid g = random_compliant(rng);
    const HsReport r = hs_validate(bezier_to_hermite(g), 1e-9);
    EXPECT_TRUE(r.compliant);
    if (!r.degenerate_phi) EXPECT_TRUE(r.bs_equivalent);
  }
}

TEST(HermiteProperty, ThreeConditionsAloneAreNotEnough) {
  // Twist sums and tangent sum hold but the split does not.
  HermiteGrid h;
  h.h(1, 1) = 1.0;
  h.h(3, 1) = -4.0;
  h.h(3, 3) = 2.0;
  h.h(4, 4) = 0.0;
  h.h(3, 4) = 1.0;
  h.h(4, 3) = 1.0;
  const HsReport r = hs_validate(h);
  EXPECT_TRUE(r.compliant);
  EXPECT_FALSE(r.bs_equivalent);
  EXPECT_FALSE(bs_residuals(hermite_to_bezier(h)).compliant);
}

TEST(SharedProjection, KeepsSharedEdgesIdentical) {
  std::mt19937_64 rng(21);
  BezierPatch a = oracle::random_patch(rng);
  BezierPatch b = oracle::random_patch(rng);
  for (std::size_t j = 0; j < 4; ++j) {
    b.x(0, j) = a.x(3, j);
    b.y(0, j) = a.y(3, j);
    b.z(0, j) = a.z(3, j);
  }
  const std::array<BezierPatch, 2> set{a, b};
  const SharedProjection sp = bs_project_shared(set);
  EXPECT_TRUE(sp.consistent);
  EXPECT_EQ(sp.control_point_groups, 28u);
  EXPECT_EQ(sp.fixed_groups, 6u);
  for (const BezierPatch& p : sp.patches) {
    EXPECT_TRUE(bs_residuals(p.x).compliant);
    EXPECT_TRUE(bs_residuals(p.y).compliant);
    EXPECT_TRUE(bs_residuals(p.z).compliant);
  }
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(sp.patches[0].control_point(3, j), sp.patches[1].control_point(0, j));
  for (std::size_t i : {0u, 3u})
    for (std::size_t j : {0u, 3u}) EXPECT_EQ(sp.patches[0].control_point(i, j), a.control_point(i, j));
}

TEST(SharedProjection, SinglePatchMatchesGridProjection) {
  std::mt19937_64 rng(22);
  const BezierPatch a = oracle::random_patch(rng);
  const SharedProjection sp = bs_project_shared(std::span<const BezierPatch>(&a, 1));
  EXPECT_LE(max_abs_diff(sp.patches[0].x.as_matrix(), bs_project(a.x).as_matrix()), 1e-10 * a.scale());
  EXPECT_LE(max_abs_diff(sp.patches[0].z.as_matrix(), bs_project(a.z).as_matrix()), 1e-10 * a.scale());
}

TEST(SharedProjection, Empty) {
  const SharedProjection sp = bs_project_shared({});
  EXPECT_TRUE(sp.patches.empty());
  EXPECT_TRUE(sp.consistent);
}
