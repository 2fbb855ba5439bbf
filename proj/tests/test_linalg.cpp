#include <gtest/gtest.h>

#include "support.hpp"

using namespace dsmtest;

namespace {

cmat mat(std::initializer_list<std::initializer_list<cplx>> rows) {
  const Index r = Index(rows.size());
  const Index c = Index(rows.begin()->size());
  cmat A(r, c);
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (const cplx v : row) A(i, j++) = v;
    ++i;
  }
  return A;
}

const cplx I{0.0, 1.0};

}  // namespace

TEST(Pinv, ScalarZeroAndUnitVector) {
  EXPECT_NEAR(std::abs(pinv(mat({{2.0}}))(0, 0) - 0.5), 0.0, 1e-15);

  const cmat Z = pinv(cmat::Zero(2, 3));
  EXPECT_EQ(Z.rows(), 3);
  EXPECT_EQ(Z.cols(), 2);
  EXPECT_EQ(fro(Z), 0.0);

  const cmat e1 = mat({{1.0}, {0.0}});
  EXPECT_LT(fro(pinv(e1) - mat({{1.0, 0.0}})), 1e-15);
  EXPECT_LT(fro(vec_pinv(e1.col(0)) - mat({{1.0, 0.0}})), 1e-15);
}

TEST(Pinv, PenroseIdentitiesOnRandomMatrices) {
  Rng rng(11);
  for (int t = 0; t < 100; ++t) {
    const Index r = 1 + t % 8, c = 1 + (t / 8) % 8;
    cmat A = rng.cmatrix(r, c);
    if (t % 3 == 0 && std::min(r, c) > 1) A = rng.cmatrix(r, 1) * rng.cmatrix(1, c);
    EXPECT_LE(penrose_residual(A, pinv(A)), 1e-10) << "case " << t;
  }
}

TEST(NullProjector, Examples) {
  const cmat P = null_projector(mat({{1.0}, {0.0}}));
  EXPECT_LT(fro(P - mat({{0.0, 0.0}, {0.0, 1.0}})), 1e-15);
  EXPECT_LT(fro(null_projector(cmat::Zero(2, 1)) - cmat::Identity(2, 2)), 1e-15);

  Rng rng(3);
  const cvec x = rng.cvector(4);
  const cmat Px = null_projector(x);
  EXPECT_LT(fro(Px * Px - Px), 1e-12);
  EXPECT_LT(fro(Px - Px.adjoint()), 1e-12);
  EXPECT_LT((Px * x).norm(), 1e-12 * x.norm());
}

TEST(HermSkewParts, Examples) {
  const HermSkew a = herm_skew_parts(mat({{I}}));
  EXPECT_EQ(fro(a.H), 0.0);
  EXPECT_LT(fro(a.S - mat({{I}})), 1e-15);

  const HermSkew b = herm_skew_parts(mat({{1.0, 2.0}, {0.0, 1.0}}));
  EXPECT_LT(fro(b.H - mat({{1.0, 1.0}, {1.0, 1.0}})), 1e-15);
  EXPECT_LT(fro(b.S - mat({{0.0, 1.0}, {-1.0, 0.0}})), 1e-15);

  Rng rng(5);
  const cmat A = rng.cmatrix(3, 3);
  const HermSkew c = herm_skew_parts(A);
  EXPECT_NEAR(A.squaredNorm(), c.H.squaredNorm() + c.S.squaredNorm(), 1e-12 * A.squaredNorm());
  EXPECT_LT(fro(c.H + c.S - A), 1e-14);
  EXPECT_THROW(herm_skew_parts(cmat::Zero(2, 3)), DimensionError);
}

TEST(IsPsd, Classification) {
  EXPECT_EQ(is_psd(mat({{1.0, 0.0}, {0.0, 0.0}})), Definiteness::PositiveSemidefinite);
  EXPECT_EQ(is_psd(mat({{1.0, 0.0}, {0.0, -1.0}})), Definiteness::Indefinite);
  EXPECT_EQ(is_psd(cmat::Identity(3, 3)), Definiteness::PositiveDefinite);
  Rng rng(8);
  const cmat B = rng.cmatrix(4, 2);
  EXPECT_NE(is_psd(B * B.adjoint()), Definiteness::Indefinite);
  EXPECT_THROW(is_psd(mat({{1.0, 1.0}, {0.0, 1.0}})), StructuralError);
}

TEST(BlockPsdCheck, Examples) {
  const auto ok = block_psd_check(mat({{1.0}}), mat({{0.0}}), mat({{1.0}}));
  EXPECT_TRUE(ok.leading_psd && ok.kernel_ok && ok.schur_psd);
  const auto bad = block_psd_check(mat({{0.0}}), mat({{1.0}}), mat({{1.0}}));
  EXPECT_FALSE(bad.kernel_ok);
  EXPECT_FALSE(bad.overall());
  EXPECT_EQ(is_psd(mat({{0.0, 1.0}, {1.0, 1.0}})), Definiteness::Indefinite);
  EXPECT_THROW(block_psd_check(mat({{1.0}}), cmat::Zero(2, 2), mat({{1.0}})), DimensionError);
}

TEST(BlockPsdCheck, AgreesWithEigenvalueTestForEverySplit) {
  Rng rng(21);
  for (int t = 0; t < 100; ++t) {
    const Index n = 4 + t % 5;
    cmat R;
    switch (t % 3) {
      case 0: {  // rank-deficient Gram
        const cmat G = rng.cmatrix(n, 1 + t % (n - 1));
        R = G * G.adjoint();
        break;
      }
      case 1: {
        const cmat G = rng.cmatrix(n, n);
        R = G * G.adjoint();
        break;
      }
      default: {
        const cmat A = rng.cmatrix(n, n);
        R = A + A.adjoint();
      }
    }
    R = (R + R.adjoint()).eval() / 2.0;
    const bool eig = psd_ok(R, {});
    for (Index s = 1; s < n; ++s) {
      const auto v = block_psd_check(R.topLeftCorner(s, s), R.bottomLeftCorner(n - s, s),
                                     R.bottomRightCorner(n - s, n - s));
      EXPECT_EQ(v.overall(), eig) << "case " << t << " split " << s;
    }
  }
}

TEST(SvdSplit, Examples) {
  const SvdSplit a = svd_split(mat({{1.0}, {0.0}}));
  EXPECT_EQ(a.rank, 1);
  EXPECT_NEAR(a.sigma1(0), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(a.U1(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(a.U2(1, 0)), 1.0, 1e-15);

  const SvdSplit b = svd_split(cmat::Identity(2, 2));
  EXPECT_EQ(b.rank, 2);
  EXPECT_EQ(b.U2.cols(), 0);

  Rng rng(4);
  const cmat X = rng.cvector(4) * rng.cvector(3).adjoint();
  const SvdSplit c = svd_split(X);
  EXPECT_EQ(c.rank, 1);
  cmat U(4, 4);
  U << c.U1, c.U2;
  EXPECT_LT(fro(U.adjoint() * U - cmat::Identity(4, 4)), 1e-12);
  EXPECT_LT(fro(c.U1 * c.sigma1.asDiagonal() * c.V1.adjoint() - X), 1e-12 * fro(X));
}

TEST(SvdSplit, CompletionChoiceDoesNotChangeTheGramTerm) {
  // U2 J U2* with J = ½ C B† C*, C = U2*(...)U1 is invariant under U2 -> U2 Q.
  Rng rng(9);
  const Index n = 5;
  const cmat X = rng.cmatrix(n, 2);
  const cmat A = rng.cmatrix(n, n);
  const SvdSplit sp = svd_split(X);
  const cmat Bm = sp.U1.adjoint() * (A + A.adjoint()) * sp.U1;
  const auto term = [&](const cmat& U2) {
    const cmat C = U2.adjoint() * A * sp.U1;
    return cmat(U2 * (0.5 * C * pinv(Bm) * C.adjoint()) * U2.adjoint());
  };
  const cmat Q = Eigen::HouseholderQR<cmat>(rng.cmatrix(n - 2, n - 2)).householderQ();
  EXPECT_LT(fro(term(sp.U2) - term(sp.U2 * Q)), 1e-12 * fro(term(sp.U2)));
}

TEST(Colinear, DetectsMultiples) {
  Rng rng(2);
  const cvec b = rng.cvector(3);
  const Colinearity c = colinear(cplx(2.0, -1.0) * b, b, 1e-12);
  EXPECT_TRUE(c.holds);
  EXPECT_LT(std::abs(c.alpha - cplx(2.0, -1.0)), 1e-12);
  EXPECT_FALSE(colinear(rng.cvector(3), b, 1e-10).holds);
  EXPECT_TRUE(colinear(cvec::Zero(3), b, 1e-10).holds);
}

TEST(SharedRangeIdentity, HoldsWhenColumnSpacesAgree) {
  Rng rng(31);
  for (int t = 0; t < 50; ++t) {
    const Index n = 3 + t % 4, m = 1 + t % 2;
    const cmat X = rng.cmatrix(n, m);
    const SvdSplit sp = svd_split(X);
    const cmat Q = Eigen::HouseholderQR<cmat>(rng.cmatrix(m, m)).householderQ();
    rvec d(m);
    for (Index i = 0; i < m; ++i) d(i) = 0.5 + std::abs(rng.normal());
    const cmat Z = sp.U1 * d.cast<cplx>().asDiagonal() * Q.adjoint();
    const cmat Y = rng.cmatrix(n, m);
    const cmat W = pinv(X.adjoint()) * Y.adjoint() * Z + sp.U2 * rng.cmatrix(n - m, m);
    ASSERT_LT(fro(X.adjoint() * W - Y.adjoint() * Z), 1e-10 * fro(Y) * fro(Z));
    const cmat YXp = Y * pinv(X);
    const cmat WZp = W * pinv(Z);
    for (const double s : {1.0, -1.0}) {
      const cmat lhs = sp.U1.adjoint() * (YXp + s * YXp.adjoint()) * sp.U1;
      const cmat rhs = sp.U1.adjoint() * (YXp + s * WZp) * sp.U1;
      EXPECT_LE(fro(lhs - rhs), 1e-10 * std::max(1.0, fro(lhs))) << "case " << t;
    }
  }
}

TEST(TraceSign, HoldsForNormalStableMatrices) {
  Rng rng(17);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 4;
    const cmat Q = Eigen::HouseholderQR<cmat>(rng.cmatrix(n, n)).householderQ();
    cvec ev(n);
    for (Index i = 0; i < n; ++i) ev(i) = cplx(-std::abs(rng.normal()), rng.normal());
    const cmat A = Q * ev.asDiagonal() * Q.adjoint();
    const cmat G = rng.cmatrix(n, n);
    EXPECT_LE((A * G * G.adjoint()).trace().real(), 1e-10 * fro(A) * G.squaredNorm());
  }
}

TEST(TraceSign, FailsForThisNonNormalMatrix) {
  // Spectrum {0} lies in the closed left half-plane, yet Re tr(AB) = 2 > 0.
  const cmat A = mat({{0.0, 2.0}, {0.0, 0.0}});
  const cmat B = cmat::Ones(2, 2);
  EXPECT_LE(spectral_abscissa(A), 0.0);
  EXPECT_NE(is_psd(B), Definiteness::Indefinite);
  EXPECT_NEAR((A * B).trace().real(), 2.0, 1e-15);
}

TEST(NormMonotonicity, PsdDominance) {
  Rng rng(23);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + t % 5;
    const cmat Gb = rng.cmatrix(n, n), G = rng.cmatrix(n, 1 + t % n);
    const cmat B = Gb * Gb.adjoint();
    const cmat A = B + G * G.adjoint();
    EXPECT_GE(fro(A), fro(B) * (1 - 1e-15));
  }
}
