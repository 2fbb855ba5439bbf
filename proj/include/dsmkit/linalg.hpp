#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "types.hpp"

namespace dsmkit {

/// a* b for column vectors.
inline cplx inner(const cvec& a, const cvec& b) { return a.dot(b); }

/// Frobenius norm; the only norm used for results.
inline double fro(const cmat& A) { return A.norm(); }

/// x† = x* / ‖x‖² for a nonzero column, the zero row otherwise.
inline cmat vec_pinv(const cvec& x) {
  const double nx2 = x.squaredNorm();
  if (nx2 == 0.0) return cmat::Zero(1, x.size());
  return x.adjoint() / nx2;
}

/// Moore-Penrose pseudoinverse. Singular values at or below
/// rank_tol * sigma_max are treated as zero.
inline cmat pinv(const cmat& A, const ToleranceConfig& cfg = {}) {
  if (A.size() == 0) return cmat::Zero(A.cols(), A.rows());
  Eigen::JacobiSVD<cmat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const rvec& s = svd.singularValues();
  const double cut = cfg.rank_tol * (s.size() ? s(0) : 0.0);
  rvec inv = rvec::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

/// Orthogonal projector onto range(x)^⊥, I − x x†.
inline cmat null_projector(const cmat& x, const ToleranceConfig& cfg = {}) {
  const Index n = x.rows();
  return cmat::Identity(n, n) - x * pinv(x, cfg);
}

struct HermSkew {
  cmat H;  ///< (A + A*)/2
  cmat S;  ///< (A − A*)/2
};

inline HermSkew herm_skew_parts(const cmat& A) {
  if (A.rows() != A.cols()) throw DimensionError("herm_skew_parts: matrix must be square");
  const cmat Ah = A.adjoint();
  return {(A + Ah) / 2.0, (A - Ah) / 2.0};
}

/// Relative departure from Hermitian symmetry, ‖A − A*‖ / max(‖A‖, tiny).
inline double hermitian_defect(const cmat& A) {
  const double nA = fro(A);
  if (nA == 0.0) return 0.0;
  return fro(A - A.adjoint()) / nA;
}

/// Smallest eigenvalue of the Hermitian part of A.
inline double min_eig_hermitian(const cmat& A) {
  if (A.size() == 0) return 0.0;
  const cmat Hs = (A + A.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<cmat> es(Hs, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double max_eig_hermitian(const cmat& A) {
  if (A.size() == 0) return 0.0;
  const cmat Hs = (A + A.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<cmat> es(Hs, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

/// Absolute eigenvalue threshold used for semidefiniteness decisions on A.
inline double psd_threshold(const cmat& A, const ToleranceConfig& cfg) {
  return cfg.psd_tol * std::max(fro(A), std::numeric_limits<double>::min());
}

enum class Definiteness { PositiveDefinite, PositiveSemidefinite, Indefinite };

inline const char* to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive-definite";
    case Definiteness::PositiveSemidefinite: return "positive-semidefinite";
    case Definiteness::Indefinite: return "indefinite";
  }
  return "?";
}

/// Classifies a Hermitian matrix by its smallest eigenvalue against ±psd_tol·‖A‖.
/// Input that is not Hermitian to residual_tol is rejected.
inline Definiteness is_psd(const cmat& A, const ToleranceConfig& cfg = {}) {
  if (A.rows() != A.cols()) throw DimensionError("is_psd: matrix must be square");
  if (hermitian_defect(A) > cfg.residual_tol)
    throw StructuralError("is_psd: matrix is not Hermitian");
  if (A.size() == 0) return Definiteness::PositiveSemidefinite;
  const double lmin = min_eig_hermitian(A);
  const double thr = psd_threshold(A, cfg);
  if (lmin > thr) return Definiteness::PositiveDefinite;
  if (lmin >= -thr) return Definiteness::PositiveSemidefinite;
  return Definiteness::Indefinite;
}

inline bool psd_ok(const cmat& A, const ToleranceConfig& cfg) {
  return is_psd(A, cfg) != Definiteness::Indefinite;
}

struct BlockPsdVerdict {
  bool leading_psd = false;  ///< B ⪰ 0
  bool kernel_ok = false;    ///< ker(B) ⊆ ker(C)
  bool schur_psd = false;    ///< D − C B† C* ⪰ 0
  bool overall() const { return leading_psd && kernel_ok && schur_psd; }
};

/// Block test for R = [[B, C*], [C, D]] ⪰ 0. Thresholds are scaled by ‖R‖ so
/// that the verdict is comparable with is_psd(R).
inline BlockPsdVerdict block_psd_check(const cmat& B, const cmat& C, const cmat& D,
                                       const ToleranceConfig& cfg = {}) {
  if (B.rows() != B.cols() || D.rows() != D.cols() || C.rows() != D.rows() ||
      C.cols() != B.cols())
    throw DimensionError("block_psd_check: incompatible block sizes");
  const double scale = std::sqrt(B.squaredNorm() + D.squaredNorm() + 2.0 * C.squaredNorm());
  const double thr = cfg.psd_tol * std::max(scale, std::numeric_limits<double>::min());

  BlockPsdVerdict v;
  v.leading_psd = B.size() == 0 || min_eig_hermitian(B) >= -thr;
  const cmat Bp = pinv(B, cfg);
  const Index s = B.rows();
  const cmat leak = C * (cmat::Identity(s, s) - Bp * B);
  // For R ⪰ 0 an eigenvalue ε of B dropped by the rank cut still allows
  // |C v| up to sqrt(ε ‖D‖), hence the square root.
  v.kernel_ok = fro(leak) <= 10.0 * std::sqrt(cfg.rank_tol) * std::max(scale, 1e-300);
  const cmat schur = D - C * Bp * C.adjoint();
  v.schur_psd = schur.size() == 0 || min_eig_hermitian(schur) >= -thr;
  return v;
}

/// Range split of X from a full SVD: [U1 U2] unitary, X = U1 Σ1 V1*.
struct SvdSplit {
  cmat U1;
  cmat U2;
  rvec sigma1;
  cmat V1;
  Index rank = 0;
};

inline SvdSplit svd_split(const cmat& X, const ToleranceConfig& cfg = {}) {
  const Index n = X.rows();
  SvdSplit out;
  if (X.size() == 0) {
    out.U1 = cmat::Zero(n, 0);
    out.U2 = cmat::Identity(n, n);
    out.V1 = cmat::Zero(X.cols(), 0);
    return out;
  }
  Eigen::JacobiSVD<cmat> svd(X, Eigen::ComputeFullU | Eigen::ComputeThinV);
  const rvec& s = svd.singularValues();
  const double cut = cfg.rank_tol * s(0);
  Index r = 0;
  while (r < s.size() && s(r) > cut && s(r) > 0.0) ++r;
  out.rank = r;
  out.U1 = svd.matrixU().leftCols(r);
  out.U2 = svd.matrixU().rightCols(n - r);
  out.sigma1 = s.head(r);
  out.V1 = svd.matrixV().leftCols(r);
  return out;
}

/// Best α with a ≈ α b and the relative residual ‖a − αb‖ / ‖a‖.
struct Colinearity {
  cplx alpha{0.0, 0.0};
  double residual = 0.0;
  bool holds = false;
};

inline Colinearity colinear(const cvec& a, const cvec& b, double tol) {
  Colinearity c;
  const double nb2 = b.squaredNorm();
  const double na = a.norm();
  if (nb2 == 0.0) {
    c.residual = na == 0.0 ? 0.0 : 1.0;
    c.holds = na == 0.0;
    return c;
  }
  c.alpha = inner(b, a) / nb2;
  c.residual = na == 0.0 ? 0.0 : (a - c.alpha * b).norm() / na;
  c.holds = c.residual <= tol;
  return c;
}

/// Largest real part over the spectrum of a general square matrix.
inline double spectral_abscissa(const cmat& A) {
  if (A.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::ComplexEigenSolver<cmat> es(A, false);
  return es.eigenvalues().real().maxCoeff();
}

/// Residual of the four Penrose identities, max over the four, relative to ‖A‖‖A†‖ scale.
inline double penrose_residual(const cmat& A, const cmat& Ap) {
  const double a = std::max(fro(A), 1e-300);
  const double p = std::max(fro(Ap), 1e-300);
  const cmat AAp = A * Ap;
  const cmat ApA = Ap * A;
  double r = fro(AAp * A - A) / a;
  r = std::max(r, fro(ApA * Ap - Ap) / p);
  r = std::max(r, fro(AAp - AAp.adjoint()) / std::max(fro(AAp), 1e-300));
  r = std::max(r, fro(ApA - ApA.adjoint()) / std::max(fro(ApA), 1e-300));
  return r;
}

}  // namespace dsmkit
