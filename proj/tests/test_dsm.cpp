#include <gtest/gtest.h>

#include "support.hpp"

using namespace dsmtest;

namespace {

const cplx I{0.0, 1.0};

cvec v(std::initializer_list<cplx> xs) {
  cvec out(Index(xs.size()));
  Index i = 0;
  for (const cplx c : xs) out(i++) = c;
  return out;
}

cvec e(Index n, Index k) {
  cvec out = cvec::Zero(n);
  out(k) = 1.0;
  return out;
}

DsmProblem problem(const cvec& x, const cvec& y, const cvec& z, const cvec& w) {
  return DsmProblem::from_full(x, y, z, w);
}

DsmProblem hermitian_example() { return problem(v({1, 1}), v({2}), v({1}), v({1, 1})); }

const StructureFamily kDsm[] = {StructureFamily::Hermitian, StructureFamily::SkewHermitian,
                                StructureFamily::Symmetric, StructureFamily::SkewSymmetric,
                                StructureFamily::PSD,       StructureFamily::NSD};

cmat random_k(StructureFamily f, Index n, Rng& rng) {
  const cmat A = rng.cmatrix(n, n);
  switch (f) {
    case StructureFamily::Hermitian: return A + A.adjoint();
    case StructureFamily::SkewHermitian: return A - A.adjoint();
    case StructureFamily::Symmetric: return A + A.transpose();
    case StructureFamily::SkewSymmetric: return A - A.transpose();
    default: return A * A.adjoint();
  }
}

double solution_norm(const DsmSolution& s) { return fro(s.H()); }

// A 1x1 complex skew-symmetric matrix is zero, which leaves w1 = 0.
Index min_n(StructureFamily f) { return f == StructureFamily::SkewSymmetric ? 2 : 1; }

}  // namespace

TEST(DsmSolve, HermitianExample) {
  const DsmSolution s = dsm_solve(StructureFamily::Hermitian, hermitian_example());
  ASSERT_TRUE(s.feasible);
  EXPECT_NEAR(std::abs(s.H1(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.H2(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_TRUE(s.exact);
  EXPECT_EQ(s.sufficiency_note, "x1 = alpha z");
  EXPECT_NEAR(s.norm_upper, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(s.norm_lower, std::sqrt(2.0), 1e-15);
}

TEST(DsmSolve, SkewHermitianExample) {
  const DsmProblem p = problem(v({1, 1}), v({1.0 + I}), v({1}), v({I, 1.0 - 2.0 * I}));
  const DsmSolution s = dsm_solve(StructureFamily::SkewHermitian, p);
  ASSERT_TRUE(s.feasible);
  EXPECT_LT(std::abs(s.H1(0, 0) + I), 1e-15);
  EXPECT_LT(std::abs(s.H2(0, 0) - (1.0 + 2.0 * I)), 1e-15);
  EXPECT_TRUE(s.exact);
  EXPECT_NEAR(s.norm_upper, std::sqrt(6.0), 1e-14);
  const ResidualReport r = verify_solution(s.H(), p, StructureFamily::SkewHermitian);
  EXPECT_TRUE(r.pass);
}

TEST(DsmSolve, PsdExample) {
  const DsmSolution s = dsm_solve(StructureFamily::PSD, hermitian_example());
  ASSERT_TRUE(s.feasible);
  EXPECT_NEAR(std::abs(s.H1(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(s.H2(0, 0) - 1.0), 0.0, 1e-15);
  EXPECT_TRUE(s.exact);
  EXPECT_NEAR(s.norm_upper, std::sqrt(2.0), 1e-15);
  const OracleResult o = oracle_min_structured(hermitian_example(), StructureFamily::PSD);
  EXPECT_LE(rel(o.norm, std::sqrt(2.0)), 1e-7);
}

TEST(DsmSolve, InfeasibleData) {
  EXPECT_EQ(dsm_solve(StructureFamily::Hermitian, problem(v({1, 1}), v({1.0 - I}), v({1}), v({I, 1})))
                .reason,
            "z*w1 not real");
  EXPECT_EQ(dsm_solve(StructureFamily::Hermitian, problem(v({1, 1}), v({3}), v({1}), v({1, 1}))).reason,
            "x*w != y*z");
  EXPECT_EQ(dsm_solve(StructureFamily::PSD, problem(v({1, 1}), v({2}), v({1}), v({-1, 3}))).reason,
            "z*w1 not positive");
  EXPECT_EQ(dsm_solve(StructureFamily::NSD, hermitian_example()).reason, "z*w1 not negative");
}

TEST(DsmSolve, DegenerateInputs) {
  EXPECT_THROW(dsm_solve(StructureFamily::Hermitian, problem(v({1, 0}), v({1}), v({1}), v({1, 0}))),
               DegenerateInput);
  EXPECT_THROW(dsm_solve(StructureFamily::Hermitian, problem(v({1, 1}), v({2}), v({0}), v({1, 1}))),
               DegenerateInput);
  EXPECT_THROW(dsm_solve(StructureFamily::Dissipative, hermitian_example()), std::invalid_argument);
}

TEST(DsmSolve, InterpolationAndMembership) {
  Rng rng(101);
  for (const auto f : kDsm) {
    for (int t = 0; t < 200; ++t) {
      const Index n = std::max(min_n(f), Index(1 + t % 6)), m = 1 + (t / 6) % 3;
      const DsmProblem p = random_dsm(f, n, m, rng);
      const DsmSolution s = dsm_solve(f, p);
      ASSERT_TRUE(s.feasible) << to_string(f) << " case " << t << ": " << s.reason;
      const ResidualReport r = verify_solution(s.H(), p, f);
      EXPECT_TRUE(r.pass) << to_string(f) << " case " << t << " interp " << r.interp_x << " "
                          << r.interp_z << " defect " << r.structure_defect;
      EXPECT_LE(s.norm_lower, s.norm_upper * (1 + 1e-12));
      EXPECT_NEAR(s.norm_upper, solution_norm(s), 1e-12 * s.norm_upper);
    }
  }
}

TEST(DsmSolve, ExactLinearFamiliesMatchLeastNormOracle) {
  Rng rng(103);
  for (const auto f : {StructureFamily::Hermitian, StructureFamily::SkewHermitian,
                       StructureFamily::Symmetric, StructureFamily::SkewSymmetric}) {
    for (int t = 0; t < 10; ++t) {
      const Index n = std::max(min_n(f), Index(1 + t % 4)), m = 1 + t % 2;
      const DsmProblem p = aligned_dsm(f, n, m, rng);
      const DsmSolution s = dsm_solve(f, p);
      ASSERT_TRUE(s.feasible && s.exact) << to_string(f) << " case " << t;
      const OracleResult o =
          oracle_least_norm(n, n + m, {{p.x(), p.y, false}, {p.z, p.w(), true}}, f, n);
      EXPECT_LE(rel(s.norm_upper, o.norm), 1e-8) << to_string(f) << " case " << t;
    }
  }
}

TEST(DsmSolve, LinearFamilyBracketsContainTheOracle) {
  Rng rng(107);
  for (const auto f : {StructureFamily::Hermitian, StructureFamily::Symmetric}) {
    for (int t = 0; t < 10; ++t) {
      const Index n = 2 + t % 3, m = 1 + t % 2;
      const DsmProblem p = random_dsm(f, n, m, rng);
      const DsmSolution s = dsm_solve(f, p);
      ASSERT_TRUE(s.feasible);
      const OracleResult o =
          oracle_least_norm(n, n + m, {{p.x(), p.y, false}, {p.z, p.w(), true}}, f, n);
      EXPECT_GE(o.norm, s.norm_lower * (1 - 1e-8)) << to_string(f) << " case " << t;
      EXPECT_LE(o.norm, s.norm_upper * (1 + 1e-8)) << to_string(f) << " case " << t;
    }
  }
}

TEST(DsmSolve, PsdBracketContainsTheOracle) {
  Rng rng(109);
  for (int t = 0; t < 6; ++t) {
    const DsmProblem p = t % 2 ? random_dsm(StructureFamily::PSD, 2, 1, rng)
                               : aligned_dsm(StructureFamily::PSD, 2, 1, rng);
    const DsmSolution s = dsm_solve(StructureFamily::PSD, p);
    ASSERT_TRUE(s.feasible);
    const OracleResult o = oracle_min_structured(p, StructureFamily::PSD);
    ASSERT_TRUE(o.certified_feasible);
    EXPECT_GE(o.norm, s.norm_lower * (1 - 1e-6)) << "case " << t;
    EXPECT_LE(o.norm, s.norm_upper * (1 + 1e-6)) << "case " << t;
    if (s.exact) { EXPECT_LE(rel(o.norm, s.norm_upper), 1e-6) << "case " << t; }
  }
}

TEST(DsmSolve, NsdByReflection) {
  Rng rng(113);
  const DsmProblem p = random_dsm(StructureFamily::NSD, 3, 2, rng);
  const DsmSolution s = dsm_solve(StructureFamily::NSD, p);
  ASSERT_TRUE(s.feasible);
  EXPECT_LE(max_eig_hermitian(s.H1), 1e-10 * fro(s.H1));
  EXPECT_TRUE(verify_solution(s.H(), p, StructureFamily::NSD).pass);
}

TEST(DsmCharacterize, ZeroParametersGiveTheSolution) {
  Rng rng(127);
  for (const auto f : kDsm) {
    const DsmProblem p = random_dsm(f, 3, 2, rng);
    const DsmSolution s = dsm_solve(f, p);
    const cmat D = dsm_characterize(f, p, cmat::Zero(3, 3), cmat::Zero(3, 2));
    EXPECT_LT(fro(D - s.H()), 1e-14 * s.norm_upper) << to_string(f);
  }
  const DsmSolution h = dsm_solve(StructureFamily::Hermitian, hermitian_example());
  const cmat D = dsm_characterize(StructureFamily::Hermitian, hermitian_example(),
                                  cmat::Identity(1, 1), cmat::Zero(1, 1));
  EXPECT_LT(fro(D - h.H()), 1e-15);
}

TEST(DsmCharacterize, RandomParametersAreSolutions) {
  Rng rng(131);
  for (const auto f : kDsm) {
    for (int t = 0; t < 50; ++t) {
      const DsmProblem p = random_dsm(f, 4, 2, rng);
      const DsmSolution s = dsm_solve(f, p);
      const cmat D = dsm_characterize(f, p, random_k(f, 4, rng), rng.cmatrix(4, 2));
      const ResidualReport r = verify_solution(D, p, f);
      EXPECT_TRUE(r.pass) << to_string(f) << " case " << t;
      EXPECT_GE(fro(D), s.norm_lower * (1 - 1e-12)) << to_string(f) << " case " << t;
    }
  }
}

TEST(DsmCharacterize, ExactSolutionIsNeverBeaten) {
  Rng rng(137);
  for (const auto f : kDsm) {
    const DsmProblem p = aligned_dsm(f, 4, 2, rng);
    const DsmSolution s = dsm_solve(f, p);
    ASSERT_TRUE(s.exact) << to_string(f);
    for (int t = 0; t < 50; ++t) {
      const cmat D = dsm_characterize(f, p, random_k(f, 4, rng), rng.cmatrix(4, 2));
      EXPECT_GE(fro(D), s.norm_upper * (1 - 1e-12)) << to_string(f) << " sample " << t;
    }
  }
}

TEST(DsmCharacterize, RecoversAHermitianMember) {
  Rng rng(139);
  for (int t = 0; t < 20; ++t) {
    const Index n = 1 + t % 4, m = 1 + t % 2;
    const DsmProblem p = random_dsm(StructureFamily::Hermitian, n, m, rng);
    const DsmSolution s = dsm_solve(StructureFamily::Hermitian, p);
    const cmat D = dsm_characterize(StructureFamily::Hermitian, p,
                                    random_k(StructureFamily::Hermitian, n, rng), rng.cmatrix(n, m));
    const cmat K0 = D.leftCols(n) - s.H1;
    const cmat K = (K0 + K0.adjoint()) / 2.0;  // drop rounding
    const cmat R = D.rightCols(m) - s.H2 + K * p.x1 * vec_pinv(p.x2);
    const cmat again = dsm_characterize(StructureFamily::Hermitian, p, K, R);
    EXPECT_LT(fro(again - D), 1e-10 * fro(D)) << "case " << t;
  }
}

TEST(DsmCharacterize, RejectsBadParameters) {
  Rng rng(149);
  const DsmProblem p = random_dsm(StructureFamily::PSD, 3, 1, rng);
  EXPECT_THROW(dsm_characterize(StructureFamily::PSD, p, -cmat::Identity(3, 3), cmat::Zero(3, 1)),
               ConstraintViolation);
  EXPECT_THROW(dsm_characterize(StructureFamily::Hermitian, p, rng.cmatrix(3, 3), cmat::Zero(3, 1)),
               ConstraintViolation);
  EXPECT_THROW(dsm_characterize(StructureFamily::Hermitian, p, cmat::Zero(2, 2), cmat::Zero(3, 1)),
               DimensionError);
}

TEST(Type1, WorkedExample) {
  Type1Problem q{e(2, 0), e(2, 0), e(2, 0), e(2, 0)};
  const Type1Solution s = dsdm_type1(q);
  ASSERT_TRUE(s.feasible);
  EXPECT_TRUE(s.exact);
  EXPECT_LT(fro(s.minimizer - e(2, 0) * e(2, 0).adjoint()), 1e-15);
  EXPECT_NEAR(s.min_norm, 1.0, 1e-15);
  EXPECT_LT(fro(s.J), 1e-15);

  const Type1Solution sv = dsdm_type1_vec(e(2, 0), e(2, 0), e(2, 0), e(2, 0));
  EXPECT_LT(fro(sv.minimizer - s.minimizer), 1e-15);
  EXPECT_NEAR(sv.min_norm, 1.0, 1e-15);
  // The closed-form scalar expression disagrees with the minimizer's norm here.
  EXPECT_NEAR(sv.display_norm_sq, 0.0, 1e-15);
}

TEST(Type1, InfeasibleAndNotColinear) {
  EXPECT_EQ(dsdm_type1({e(2, 0), -e(2, 0), e(2, 0), -e(2, 0)}).reason, "X*Y + Y*X not psd");
  EXPECT_EQ(dsdm_type1_vec(e(2, 0), -e(2, 0), e(2, 0), -e(2, 0)).reason, "Re(x*y) negative");
  EXPECT_THROW(dsdm_type1_vec(e(2, 0), e(2, 0), e(2, 1), e(2, 0)), NotColinear);
}

TEST(Type1, ConstructedInstancesNeverExceedTheGenerator) {
  Rng rng(151);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + t % 4, k = 1 + t % std::min<Index>(n, 3);
    const cmat G = random_member(StructureFamily::Dissipative, n, rng);
    const cmat X = rng.cmatrix(n, k);
    const Type1Problem q{X, G * X, X, G.adjoint() * X};
    const Type1Solution s = dsdm_type1(q);
    ASSERT_TRUE(s.feasible) << "case " << t;
    EXPECT_TRUE(s.exact) << "case " << t;
    EXPECT_LE(s.min_norm, fro(G) * (1 + 1e-10)) << "case " << t;
    EXPECT_LE(rel(s.formula_norm, s.min_norm), 1e-8) << "case " << t;
    EXPECT_TRUE(verify_solution(s.minimizer, q).pass) << "case " << t;
  }
}

TEST(Type1, AgreesWithOracle) {
  Rng rng(157);
  for (int t = 0; t < 4; ++t) {
    const Index n = 2 + t % 2;
    const cmat G = random_member(StructureFamily::Dissipative, n, rng);
    const cmat X = rng.cmatrix(n, 1);
    const Type1Problem q{X, G * X, X, G.adjoint() * X};
    const Type1Solution s = dsdm_type1(q);
    const OracleResult o = oracle_min_structured(q);
    ASSERT_TRUE(o.certified_feasible);
    EXPECT_LE(rel(o.norm, s.min_norm), 1e-6) << "case " << t;
  }
}

TEST(Type1, VectorAndMatrixSolversAgree) {
  Rng rng(163);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + t % 5;
    const cmat G = random_member(StructureFamily::Dissipative, n, rng);
    const cvec x = rng.cvector(n);
    const cvec z = rng.cnormal() * x;
    const cvec y = G * x, w = G.adjoint() * z;
    const Type1Solution a = dsdm_type1_vec(x, y, z, w);
    const Type1Solution b = dsdm_type1({x, y, z, w});
    ASSERT_TRUE(a.feasible && b.feasible);
    EXPECT_LT(fro(a.minimizer - b.minimizer), 1e-10 * std::max(1.0, a.min_norm)) << "case " << t;
    EXPECT_LE(rel(a.min_norm, b.min_norm), 1e-10) << "case " << t;
  }
}

TEST(Type1, AntiDissipativeByReflection) {
  Rng rng(167);
  const cmat G = random_member(StructureFamily::AntiDissipative, 3, rng);
  const cmat X = rng.cmatrix(3, 2);
  const Type1Problem q{X, G * X, X, G.adjoint() * X};
  const Type1Solution s = dsdm_type1(q, {}, Orientation::AntiDissipative);
  ASSERT_TRUE(s.feasible);
  EXPECT_TRUE(verify_solution(s.minimizer, q, Orientation::AntiDissipative).pass);
}

TEST(Type2, WorkedExample) {
  const DsmProblem p = problem(v({0, 1}), v({2}), v({1}), v({1, 2}));
  const DsmSolution s = dsdm_type2(p);
  ASSERT_TRUE(s.feasible);
  EXPECT_TRUE(s.exact);
  EXPECT_LT(std::abs(s.H1(0, 0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(s.H2(0, 0) - 2.0), 1e-15);
  EXPECT_NEAR(s.norm_upper, std::sqrt(5.0), 1e-15);
  EXPECT_TRUE(verify_solution(s.H(), p, StructureFamily::Dissipative).pass);

  const DsmProblem bad = problem(v({0, 1}), v({2}), v({1}), v({-1, 2}));
  EXPECT_EQ(dsdm_type2(bad).reason, "Re(z*w1) negative");
}

TEST(Type2, InterpolationAndMembership) {
  Rng rng(173);
  for (const auto o : {Orientation::Dissipative, Orientation::AntiDissipative}) {
    const auto f = o == Orientation::Dissipative ? StructureFamily::Dissipative
                                                 : StructureFamily::AntiDissipative;
    for (int t = 0; t < 200; ++t) {
      const Index n = 1 + t % 6, m = 1 + (t / 6) % 3;
      const DsmProblem p = random_dsm(f, n, m, rng);
      const DsmSolution s = dsdm_type2(p, {}, o);
      ASSERT_TRUE(s.feasible) << "case " << t;
      EXPECT_TRUE(verify_solution(s.H(), p, f).pass) << to_string(f) << " case " << t;
      EXPECT_LE(s.norm_lower, s.norm_upper * (1 + 1e-12));
    }
  }
}

TEST(Type2, ExactCaseBeatsCharacterizationSamplesAndMatchesOracle) {
  Rng rng(179);
  const DsmProblem p = type2_aligned(3, 2, rng, true);
  const DsmSolution s = dsdm_type2(p);
  ASSERT_TRUE(s.exact);
  for (int t = 0; t < 50; ++t) {
    const cmat Z = rng.cmatrix(3, 3);
    const cmat A = rng.cmatrix(3, 3);
    const cvec q = 2.0 * p.w1 + Z.adjoint() * p.z;
    const cmat g = rng.cmatrix(3, 1);
    const cmat K = q * q.adjoint() / (4.0 * inner(p.z, p.w1).real()) + g * g.adjoint();
    const cmat D = dsm_characterize_type2(p, Z, K, A - A.adjoint(), rng.cmatrix(3, 2));
    EXPECT_TRUE(verify_solution(D, p, StructureFamily::Dissipative).pass) << "sample " << t;
    EXPECT_GE(fro(D), s.norm_upper * (1 - 1e-12)) << "sample " << t;
  }
  const OracleResult o = oracle_min_structured(p, StructureFamily::Dissipative);
  ASSERT_TRUE(o.certified_feasible);
  EXPECT_LE(rel(o.norm, s.norm_upper), 1e-6);
}

TEST(Type2, WithoutParallelW1TheBracketHoldsTheOracle) {
  Rng rng(181);
  for (int t = 0; t < 4; ++t) {
    const DsmProblem p = type2_aligned(2, 1, rng, false);
    const DsmSolution s = dsdm_type2(p);
    ASSERT_TRUE(s.feasible);
    EXPECT_FALSE(s.exact);
    const OracleResult o = oracle_min_structured(p, StructureFamily::Dissipative);
    ASSERT_TRUE(o.certified_feasible);
    EXPECT_GE(o.norm, s.norm_lower * (1 - 1e-6)) << "case " << t;
    EXPECT_LE(o.norm, s.norm_upper * (1 + 1e-6)) << "case " << t;
  }
}

TEST(Type2, CharacterizationAtTheQuotedParameters) {
  Rng rng(191);
  const DsmProblem p = random_dsm(StructureFamily::Dissipative, 3, 2, rng);
  const DsmSolution s = dsdm_type2(p);
  const cmat Z = -2.0 * (p.w1 * vec_pinv(p.z)).adjoint();
  const cmat O = cmat::Zero(3, 3);
  const cmat D = dsm_characterize_type2(p, Z, O, O, cmat::Zero(3, 2));
  EXPECT_LT(fro(D - s.H()), 1e-12 * s.norm_upper);

  EXPECT_THROW(dsm_characterize_type2(p, rng.cmatrix(3, 3), O, O, cmat::Zero(3, 2)),
               ConstraintViolation);
}

TEST(JordanLie, IdentityScalarProductIsHermitian) {
  Rng rng(193);
  const DsmProblem p = random_dsm(StructureFamily::Hermitian, 3, 2, rng);
  const ScalarProduct sp{cmat::Identity(3, 3), ScalarProduct::Form::Sesquilinear,
                         ScalarProduct::Algebra::Jordan};
  EXPECT_EQ(reduced_family(sp), StructureFamily::Hermitian);
  const DsmSolution a = jordan_lie_reduce(sp, p);
  const DsmSolution b = dsm_solve(StructureFamily::Hermitian, p);
  EXPECT_LT(fro(a.H() - b.H()), 1e-15 * b.norm_upper);
}

TEST(JordanLie, AdjointIdentities) {
  Rng rng(197);
  struct Case {
    cmat M;
    ScalarProduct::Form form;
    ScalarProduct::Algebra algebra;
    double sign;
  };
  cmat swap = cmat::Zero(2, 2);
  swap(0, 1) = swap(1, 0) = 1.0;
  cmat d = cmat::Identity(2, 2);
  d(1, 1) = -1.0;
  const Case cases[] = {
      {swap, ScalarProduct::Form::Bilinear, ScalarProduct::Algebra::Lie, -1.0},
      {d, ScalarProduct::Form::Sesquilinear, ScalarProduct::Algebra::Jordan, 1.0},
      {d, ScalarProduct::Form::Sesquilinear, ScalarProduct::Algebra::Lie, -1.0},
      {swap, ScalarProduct::Form::Bilinear, ScalarProduct::Algebra::Jordan, 1.0},
  };
  for (const auto& c : cases) {
    const ScalarProduct sp{c.M, c.form, c.algebra};
    const StructureFamily f = reduced_family(sp);
    const bool bil = c.form == ScalarProduct::Form::Bilinear;
    for (int t = 0; t < 10; ++t) {
      // Δ1 = M*K with K in the reduced family lies in the algebra.
      cmat D(2, 3);
      D << c.M.adjoint() * random_k(f, 2, rng), rng.cmatrix(2, 1);
      const cvec x = rng.cvector(3), z = rng.cvector(2);
      const DsmProblem p = problem(x, D * x, z, D.adjoint() * z);
      const DsmSolution s = jordan_lie_reduce(sp, p);
      ASSERT_TRUE(s.feasible) << to_string(f) << ": " << s.reason;
      const cmat A = s.H1;
      const cmat star = c.M.adjoint() * (bil ? cmat(A.transpose()) : cmat(A.adjoint())) * c.M;
      EXPECT_LT(fro(star - c.sign * A), 1e-10 * fro(A)) << to_string(f) << " case " << t;
      EXPECT_LT((s.H() * x - p.y).norm(), 1e-10 * fro(D) * x.norm());
      EXPECT_LT((s.H().adjoint() * z - p.w()).norm(), 1e-10 * fro(D) * z.norm());

      DsmProblem r = p;
      r.y = c.M * p.y;
      r.z = c.M * p.z;
      EXPECT_LE(rel(s.norm_upper, dsm_solve(f, r).norm_upper), 1e-12);
      EXPECT_LE(rel(fro(s.H()), s.norm_upper), 1e-12);
    }
  }
}

TEST(JordanLie, RejectsNonUnitary) {
  const ScalarProduct sp{2.0 * cmat::Identity(2, 2), ScalarProduct::Form::Sesquilinear,
                         ScalarProduct::Algebra::Jordan};
  EXPECT_THROW(reduced_family(sp), StructuralError);
}
