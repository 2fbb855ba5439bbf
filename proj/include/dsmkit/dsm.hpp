#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "structured_maps.hpp"

namespace dsmkit {

/// Data of Δ = [Δ1 Δ2] with Δx = y and Δ*z = w, x = [x1; x2], w = [w1; w2].
struct DsmProblem {
  cvec x1, x2, y, z, w1, w2;

  Index n() const { return x1.size(); }
  Index m() const { return x2.size(); }

  cvec x() const {
    cvec v(n() + m());
    v << x1, x2;
    return v;
  }
  cvec w() const {
    cvec v(n() + m());
    v << w1, w2;
    return v;
  }

  void validate() const {
    const Index n_ = n();
    if (n_ == 0) throw DimensionError("DsmProblem: n must be positive");
    if (y.size() != n_ || z.size() != n_ || w1.size() != n_)
      throw DimensionError("DsmProblem: x1, y, z, w1 must share dimension n");
    if (w2.size() != m()) throw DimensionError("DsmProblem: x2 and w2 must share dimension m");
    auto finite = [](const cvec& v) { return v.allFinite(); };
    if (!(finite(x1) && finite(x2) && finite(y) && finite(z) && finite(w1) && finite(w2)))
      throw DimensionError("DsmProblem: non-finite entries");
  }

  /// Splits full-length x and w at n = dim(y).
  static DsmProblem from_full(const cvec& x, const cvec& y, const cvec& z, const cvec& w) {
    const Index n = y.size();
    if (x.size() < n || w.size() != x.size() || z.size() != n)
      throw DimensionError("DsmProblem: need dim x = dim w >= dim y = dim z");
    const Index m = x.size() - n;
    return {x.head(n), x.tail(m), y, z, w.head(n), w.tail(m)};
  }
};

enum class Orientation { Dissipative, AntiDissipative };

struct DsmSolution {
  bool feasible = false;
  std::string reason;
  cmat H1, H2;
  double norm_lower = 0.0;
  double norm_upper = 0.0;
  bool exact = false;
  std::string sufficiency_note = "never";
  bool boundary = false;  ///< Type-2 with Re(z*w1) = 0
  // PSD/NSD diagnostics
  cmat M;
  double M_rightmost_real = std::numeric_limits<double>::quiet_NaN();

  cmat H() const {
    cmat out(H1.rows(), H1.cols() + H2.cols());
    out << H1, H2;
    return out;
  }
};

namespace detail {

inline double compat_scale(const DsmProblem& p) {
  return p.x().norm() * p.w().norm() + p.y.norm() * p.z.norm();
}

/// ỹ x2† + (w2 z†)* 𝒫_{x2} with ỹ = y − H1 x1: the common second block.
inline cmat second_block(const DsmProblem& p, const cmat& H1, const ToleranceConfig& cfg) {
  const cvec yt = p.y - H1 * p.x1;
  const cmat P2 = null_projector(p.x2, cfg);
  return yt * vec_pinv(p.x2) + (p.w2 * vec_pinv(p.z)).adjoint() * P2;
}

inline DsmSolution dsm_infeasible(std::string why) {
  DsmSolution s;
  s.reason = std::move(why);
  return s;
}

/// lower² = (least ‖Δ1‖ over the first block's own map)² + ‖w2‖²/‖z‖², since
/// Δ2*z = w2 forces ‖Δ2‖ ≥ ‖w2‖/‖z‖ independently of Δ1.
inline void finish_bracket(DsmSolution& s, const DsmProblem& p, double first_block_min) {
  s.norm_upper = std::sqrt(s.H1.squaredNorm() + s.H2.squaredNorm());
  const double l2 = first_block_min * first_block_min + p.w2.squaredNorm() / p.z.squaredNorm();
  s.norm_lower = s.exact ? s.norm_upper : std::min(std::sqrt(l2), s.norm_upper);
}

inline DsmProblem conj_reflect_psd(const DsmProblem& p) {
  DsmProblem q = p;
  q.x1 = -p.x1;
  q.w1 = -p.w1;
  return q;
}

}  // namespace detail

/// Minimal-norm doubly structured mapping with Δ1 in one of the families
/// Hermitian, SkewHermitian, Symmetric, SkewSymmetric, PSD, NSD.
///
/// When no sufficient condition certifies minimality the result is the bracket
/// [‖H1‖_F, ‖[H1 H2]‖_F].
inline DsmSolution dsm_solve(StructureFamily family, const DsmProblem& p,
                             const ToleranceConfig& cfg = {}) {
  p.validate();
  if (p.z.norm() == 0.0) throw DegenerateInput("z must be nonzero");
  if (p.w1.norm() == 0.0) throw DegenerateInput("w1 must be nonzero");
  if (p.m() == 0 || p.x2.norm() == 0.0) throw DegenerateInput("x2 must be nonzero");

  if (family == StructureFamily::NSD) {
    if (p.w2.norm() == 0.0) throw DegenerateInput("w2 must be nonzero");
    DsmSolution s = dsm_solve(StructureFamily::PSD, detail::conj_reflect_psd(p), cfg);
    if (!s.feasible) {
      if (s.reason == "z*w1 not positive") s.reason = "z*w1 not negative";
      return s;
    }
    s.H1 = -s.H1;
    return s;
  }

  if (std::abs(inner(p.x(), p.w()) - inner(p.y, p.z)) > cfg.residual_tol * detail::compat_scale(p))
    return detail::dsm_infeasible("x*w != y*z");

  DsmSolution s;
  const cvec zc = p.z.conjugate();
  const cvec w1c = p.w1.conjugate();
  MapSolution first;
  Colinearity col;
  switch (family) {
    case StructureFamily::Hermitian:
      first = map_min(StructureFamily::Hermitian, p.z, p.w1, cfg);
      if (!first.feasible) return detail::dsm_infeasible("z*w1 not real");
      col = colinear(p.x1, p.z, cfg.colinearity_tol);
      break;
    case StructureFamily::SkewHermitian:
      first = map_min(StructureFamily::SkewHermitian, p.z, -p.w1, cfg);
      if (!first.feasible) return detail::dsm_infeasible("z*w1 not imaginary");
      col = colinear(p.x1, p.z, cfg.colinearity_tol);
      break;
    case StructureFamily::Symmetric:
      first = map_min(StructureFamily::Symmetric, zc, w1c, cfg);
      col = colinear(p.x1, zc, cfg.colinearity_tol);
      break;
    case StructureFamily::SkewSymmetric:
      first = map_min(StructureFamily::SkewSymmetric, zc, -w1c, cfg);
      if (!first.feasible) return detail::dsm_infeasible("z^T w1 nonzero");
      col = colinear(p.x1, zc, cfg.colinearity_tol);
      break;
    case StructureFamily::PSD:
      if (p.w2.norm() == 0.0) throw DegenerateInput("w2 must be nonzero");
      first = map_min(StructureFamily::PSD, p.z, p.w1, cfg);
      if (!first.feasible) return detail::dsm_infeasible("z*w1 not positive");
      col = colinear(p.x1, p.z, cfg.colinearity_tol);
      break;
    default:
      throw std::invalid_argument(std::string("dsm_solve: unsupported family ") +
                                  to_string(family));
  }

  s.feasible = true;
  s.H1 = first.minimizer;
  s.H2 = detail::second_block(p, s.H1, cfg);
  if (col.holds) {
    s.exact = true;
    s.sufficiency_note = family == StructureFamily::Symmetric ||
                                 family == StructureFamily::SkewSymmetric
                             ? "x1 = alpha conj(z)"
                             : "x1 = alpha z";
  }

  if (family == StructureFamily::PSD) {
    const cplx zw1 = inner(p.z, p.w1);
    s.M = p.y * p.x1.adjoint() - (inner(p.w1, p.x1) / zw1) * p.w1 * p.x1.adjoint();
    s.M_rightmost_real = spectral_abscissa(s.M);
    if (!s.exact) {
      // The cross term −2Re tr(𝓜 𝒫_z K 𝒫_z)/‖x2‖² is nonpositive for all
      // K ⪰ 0 iff the Hermitian part of 𝒫_z ỹ x1* 𝒫_z is ⪯ 0, i.e. the two
      // compressed vectors point in opposite directions.
      const cmat Pz = null_projector(p.z, cfg);
      const cvec a = Pz * p.x1;
      const cvec b = Pz * (p.y - s.H1 * p.x1);
      const double na = a.norm();
      const double nb = b.norm();
      const double tiny_b = cfg.colinearity_tol * (p.y.norm() + fro(s.H1) * p.x1.norm());
      if (nb <= tiny_b || inner(a, b).real() + na * nb <= cfg.colinearity_tol * na * nb) {
        s.exact = true;
        s.sufficiency_note = "compressed trace condition";
      }
    }
  }
  detail::finish_bracket(s, p, fro(s.H1));
  return s;
}

/// H + H̃(K, R) for the characterization of all solutions of dsm_solve's problem.
inline cmat dsm_characterize(StructureFamily family, const DsmProblem& p, const cmat& K,
                             const cmat& R, const ToleranceConfig& cfg = {}) {
  const Index n = p.n();
  const Index m = p.m();
  if (K.rows() != n || K.cols() != n) throw DimensionError("K must be n x n");
  if (R.rows() != n || R.cols() != m) throw DimensionError("R must be n x m");

  if (family == StructureFamily::NSD) {
    cmat D = dsm_characterize(StructureFamily::PSD, detail::conj_reflect_psd(p), K, R, cfg);
    D.leftCols(n) = -D.leftCols(n).eval();
    return D;
  }

  switch (family) {
    case StructureFamily::Hermitian:
      if (detail::adjoint_defect(K, 1.0) > cfg.residual_tol)
        throw ConstraintViolation("K must be Hermitian");
      break;
    case StructureFamily::SkewHermitian:
      if (detail::adjoint_defect(K, -1.0) > cfg.residual_tol)
        throw ConstraintViolation("K must be skew-Hermitian");
      break;
    case StructureFamily::Symmetric:
      if (detail::transpose_defect(K, 1.0) > cfg.residual_tol)
        throw ConstraintViolation("K must be complex symmetric");
      break;
    case StructureFamily::SkewSymmetric:
      if (detail::transpose_defect(K, -1.0) > cfg.residual_tol)
        throw ConstraintViolation("K must be complex skew-symmetric");
      break;
    case StructureFamily::PSD:
      if (detail::adjoint_defect(K, 1.0) > cfg.residual_tol || !psd_ok(K, cfg))
        throw ConstraintViolation("K must be positive semidefinite");
      break;
    default:
      throw std::invalid_argument(std::string("dsm_characterize: unsupported family ") +
                                  to_string(family));
  }

  const DsmSolution s = dsm_solve(family, p, cfg);
  if (!s.feasible) throw ConstraintViolation("no solution: " + s.reason);

  const cmat Pz = null_projector(p.z, cfg);
  const cmat P2 = null_projector(p.x2, cfg);
  cmat Ht1;
  if (family == StructureFamily::Symmetric || family == StructureFamily::SkewSymmetric) {
    const cmat Pzc = null_projector(p.z.conjugate(), cfg);
    Ht1 = Pzc.transpose() * K * Pzc;
  } else {
    Ht1 = Pz * K * Pz;
  }
  const cmat Ht2 = Pz * R * P2 - Ht1 * p.x1 * vec_pinv(p.x2);

  cmat D(n, n + m);
  D << s.H1 + Ht1, s.H2 + Ht2;
  return D;
}

// ---------------------------------------------------------------- Type-1

struct Type1Problem {
  cmat X, Y, Z, W;
};

struct Type1Solution {
  bool feasible = false;
  std::string reason;
  cmat minimizer;
  double min_norm = 0.0;
  cmat J;                    ///< Gram matrix of the minimal completion
  double formula_norm = 0.0; ///< trace expression, cross-check of min_norm
  bool hypotheses_ok = true; ///< shared range and kernel preconditions
  bool exact = false;
  std::vector<std::string> warnings;
  cplx alpha{0.0, 0.0};       ///< vector case: z = αx
  double display_norm_sq = std::numeric_limits<double>::quiet_NaN();  ///< vector case diagnostic
};

namespace detail {

inline Type1Solution type1_infeasible(std::string why) {
  Type1Solution s;
  s.reason = std::move(why);
  return s;
}

inline Type1Solution reflect_type1(Type1Solution s) {
  if (s.feasible) s.minimizer = -s.minimizer;
  return s;
}

}  // namespace detail

/// Minimal-norm square Δ with ΔX = Y, Δ*Z = W and Δ + Δ* ⪰ 0 (or ⪯ 0).
inline Type1Solution dsdm_type1(const Type1Problem& q, const ToleranceConfig& cfg = {},
                                Orientation orient = Orientation::Dissipative) {
  const Index n = q.X.rows();
  const Index k = q.X.cols();
  if (q.Y.rows() != n || q.Z.rows() != n || q.W.rows() != n || q.Y.cols() != k ||
      q.Z.cols() != k || q.W.cols() != k)
    throw DimensionError("dsdm_type1: X, Y, Z, W must share shape n x m");
  if (orient == Orientation::AntiDissipative) {
    Type1Solution s = detail::reflect_type1(dsdm_type1({q.X, -q.Y, q.Z, -q.W}, cfg));
    if (!s.feasible && s.reason == "X*Y + Y*X not psd") s.reason = "X*Y + Y*X not nsd";
    return s;
  }

  const cmat Xp = pinv(q.X, cfg);
  const cmat Zp = pinv(q.Z, cfg);
  const cmat YXp = q.Y * Xp;
  const cmat WZp = q.W * Zp;

  auto rel = [](double r, double s) { return s == 0.0 ? r : r / s; };
  if (rel(fro(YXp * q.X - q.Y), fro(q.Y)) > cfg.residual_tol)
    return detail::type1_infeasible("YX^+X != Y");
  if (rel(fro(WZp * q.Z - q.W), fro(q.W)) > cfg.residual_tol)
    return detail::type1_infeasible("WZ^+Z != W");
  if (fro(q.X.adjoint() * q.W - q.Y.adjoint() * q.Z) >
      cfg.residual_tol * (fro(q.X) * fro(q.W) + fro(q.Y) * fro(q.Z)))
    return detail::type1_infeasible("X*W != Y*Z");
  const cmat G = q.X.adjoint() * q.Y + q.Y.adjoint() * q.X;
  if (min_eig_hermitian(G) < -psd_threshold(G, cfg))
    return detail::type1_infeasible("X*Y + Y*X not psd");

  Type1Solution s;
  s.feasible = true;
  const SvdSplit sp = svd_split(q.X, cfg);
  const cmat XXp = q.X * Xp;
  // Shared range test; projectors are O(1) so an absolute band suffices.
  if (fro(XXp - q.Z * Zp) > 100.0 * cfg.colinearity_tol) {
    s.hypotheses_ok = false;
    s.warnings.push_back("range(X) != range(Z)");
  }
  const cmat A = YXp + YXp.adjoint();
  const cmat B = sp.U1.adjoint() * A * sp.U1;
  const cmat C = sp.U2.adjoint() * (YXp + WZp) * sp.U1;
  const cmat Bp = pinv(B, cfg);
  const Index r = sp.rank;
  if (r > 0 && C.size() > 0) {
    const cmat leak = C * (cmat::Identity(r, r) - Bp * B);
    if (fro(leak) > 10.0 * std::sqrt(cfg.rank_tol) * std::max(fro(B) + fro(C), 1e-300)) {
      s.hypotheses_ok = false;
      s.warnings.push_back("ker(B) not contained in ker(C)");
    }
  }
  s.J = 0.5 * C * Bp * C.adjoint();
  const cmat WZph = WZp.adjoint();
  const cmat PX = cmat::Identity(n, n) - XXp;
  const cmat PZ = null_projector(q.Z, cfg);
  s.minimizer = YXp + WZph - WZph * XXp + PZ * sp.U2 * s.J * sp.U2.adjoint() * PX;
  s.min_norm = fro(s.minimizer);
  const double f2 = YXp.squaredNorm() + WZp.squaredNorm() -
                    (WZp * WZph * XXp).trace().real() + s.J.squaredNorm();
  s.formula_norm = std::sqrt(std::max(f2, 0.0));
  s.exact = s.hypotheses_ok;

  const double scale = fro(s.minimizer) * std::max(fro(q.X), fro(q.Z)) + fro(q.Y) + fro(q.W);
  const bool interp = fro(s.minimizer * q.X - q.Y) <= cfg.residual_tol * scale &&
                      fro(s.minimizer.adjoint() * q.Z - q.W) <= cfg.residual_tol * scale;
  const bool diss = min_eig_hermitian(s.minimizer) >= -psd_threshold(s.minimizer, cfg) * 10.0;
  if (!(interp && diss)) {
    if (s.hypotheses_ok)
      throw VerificationFailure("dsdm_type1: minimizer failed interpolation/dissipativity check");
    s.warnings.push_back("minimizer not verified");
  }
  return s;
}

/// Vector case of dsdm_type1 with z = αx.
inline Type1Solution dsdm_type1_vec(const cvec& x, const cvec& y, const cvec& z, const cvec& w,
                                    const ToleranceConfig& cfg = {},
                                    Orientation orient = Orientation::Dissipative) {
  const Index n = x.size();
  if (y.size() != n || z.size() != n || w.size() != n)
    throw DimensionError("dsdm_type1_vec: x, y, z, w must share dimension");
  if (orient == Orientation::AntiDissipative) {
    Type1Solution s = detail::reflect_type1(dsdm_type1_vec(x, -y, z, -w, cfg));
    if (!s.feasible && s.reason == "Re(x*y) negative") s.reason = "Re(x*y) positive";
    return s;
  }
  if (x.norm() == 0.0 || y.norm() == 0.0 || w.norm() == 0.0)
    throw DegenerateInput("x, y, w must be nonzero");
  const Colinearity col = colinear(z, x, cfg.colinearity_tol);
  if (!col.holds || col.alpha == cplx(0.0, 0.0)) throw NotColinear("z is not a nonzero multiple of x");
  const cplx a = col.alpha;

  const double s_xy = x.norm() * y.norm();
  if (std::abs(inner(x, w) - inner(y, z)) > cfg.residual_tol * (x.norm() * w.norm() + y.norm() * z.norm()))
    return detail::type1_infeasible("x*w != y*z");
  const double re = inner(x, y).real();
  if (std::abs(re) <= cfg.residual_tol * s_xy) throw HypothesisViolated("Re(x*y) != 0");
  if (re < 0.0) return detail::type1_infeasible("Re(x*y) negative");

  Type1Solution s;
  s.feasible = true;
  s.alpha = a;
  const cvec v = y + (std::conj(a) / std::norm(a)) * w;
  s.J = v * v.adjoint() / (4.0 * re);
  const cmat P = null_projector(x, cfg);
  s.minimizer = y * vec_pinv(x) + (w * vec_pinv(z)).adjoint() * P + P * s.J * P;
  s.min_norm = fro(s.minimizer);
  const cmat xxp = x * vec_pinv(x);
  const cmat wzp = w * vec_pinv(z);
  s.formula_norm = std::sqrt(std::max(
      (y * vec_pinv(x)).squaredNorm() + wzp.squaredNorm() -
          (wzp * wzp.adjoint() * xxp).trace().real() + (P * s.J * P).squaredNorm(),
      0.0));
  const double nx2 = x.squaredNorm();
  const double nz2 = z.squaredNorm();
  s.display_norm_sq = y.squaredNorm() / nx2 - w.squaredNorm() / nz2 -
                      std::norm(inner(w, x)) / (nx2 * nz2) + s.J.squaredNorm();
  s.exact = true;
  return s;
}

// ---------------------------------------------------------------- Type-2

namespace detail {

inline void type2_bases(const DsmProblem& p, const ToleranceConfig& cfg, cmat& H1, cmat& H2,
                        cmat& Hh1) {
  const cmat zp = vec_pinv(p.z);
  const cmat Pz = null_projector(p.z, cfg);
  const cmat w1zp = p.w1 * zp;
  H1 = w1zp.adjoint() + Pz * w1zp;
  H2 = second_block(p, H1, cfg);
  Hh1 = H1 - 2.0 * Pz * w1zp;
}

}  // namespace detail

/// Δ = [Δ1 Δ2] with Δ1 + Δ1* ⪰ 0 (or ⪯ 0), Δx = y, Δ*z = w.
inline DsmSolution dsdm_type2(const DsmProblem& p, const ToleranceConfig& cfg = {},
                              Orientation orient = Orientation::Dissipative) {
  p.validate();
  if (orient == Orientation::AntiDissipative) {
    // Δ1 ⪯-dissipative ⇔ −Δ1 dissipative with x1 → −x1, w1 → −w1.
    DsmSolution s = dsdm_type2(detail::conj_reflect_psd(p), cfg);
    if (!s.feasible) {
      if (s.reason == "Re(z*w1) negative") s.reason = "Re(z*w1) positive";
      return s;
    }
    s.H1 = -s.H1;
    return s;
  }
  if (p.z.norm() == 0.0) throw DegenerateInput("z must be nonzero");
  if (p.w1.norm() == 0.0) throw DegenerateInput("w1 must be nonzero");
  if (p.m() == 0 || p.x2.norm() == 0.0) throw DegenerateInput("x2 must be nonzero");
  if (p.w2.norm() == 0.0) throw DegenerateInput("w2 must be nonzero");

  if (std::abs(inner(p.x(), p.w()) - inner(p.y, p.z)) > cfg.residual_tol * detail::compat_scale(p))
    return detail::dsm_infeasible("x*w != y*z");
  const double re = inner(p.z, p.w1).real();
  const double s_zw = p.z.norm() * p.w1.norm();
  if (re < -cfg.residual_tol * s_zw) return detail::dsm_infeasible("Re(z*w1) negative");

  DsmSolution s;
  s.feasible = true;
  s.boundary = std::abs(re) <= cfg.residual_tol * s_zw;
  cmat H1, H2, Hh1;
  detail::type2_bases(p, cfg, H1, H2, Hh1);
  s.H1 = Hh1;
  s.H2 = detail::second_block(p, Hh1, cfg);

  // Every feasible Δ1 solves the single map Δ1*z = w1 with Δ1 dissipative.
  const double m1 = map_min(StructureFamily::Dissipative, p.z, p.w1, cfg).min_norm;
  const Colinearity yb = colinear(p.y, p.z, cfg.colinearity_tol);
  const bool orth = std::abs(inner(p.z, p.x1)) <= cfg.colinearity_tol * p.z.norm() * p.x1.norm();
  if (yb.holds && orth && !s.boundary) {
    // Here ‖Δ‖² ≥ ‖Δ1‖² + ‖𝒫_z Δ1 x1‖²/‖x2‖² + ‖Ĥ2'‖², and Ĥ1 zeroes the middle
    // term, but Ĥ1 is the least-norm Δ1 only when w1 ∥ z.
    const bool w1_par = colinear(p.w1, p.z, cfg.colinearity_tol).holds;
    s.norm_upper = std::sqrt(s.H1.squaredNorm() + s.H2.squaredNorm());
    if (w1_par) {
      s.exact = true;
      s.sufficiency_note = "y = beta z, z orthogonal to x1, w1 = gamma z";
      s.norm_lower = s.norm_upper;
    } else {
      s.sufficiency_note = "y = beta z, z orthogonal to x1 (bracket only, w1 not parallel to z)";
      s.norm_lower = std::min(std::sqrt(m1 * m1 + s.H2.squaredNorm()), s.norm_upper);
    }
    return s;
  }
  detail::finish_bracket(s, p, m1);
  return s;
}

/// H + H̃(Z, K, G, R) for the Type-2 characterization (Re(z*w1) > 0).
inline cmat dsm_characterize_type2(const DsmProblem& p, const cmat& Z, const cmat& K,
                                   const cmat& G, const cmat& R, const ToleranceConfig& cfg = {},
                                   Orientation orient = Orientation::Dissipative) {
  const Index n = p.n();
  const Index m = p.m();
  if (orient == Orientation::AntiDissipative) {
    cmat D = dsm_characterize_type2(detail::conj_reflect_psd(p), Z, K, G, R, cfg);
    D.leftCols(n) = -D.leftCols(n).eval();
    return D;
  }
  for (const cmat* A : {&Z, &K, &G})
    if (A->rows() != n || A->cols() != n) throw DimensionError("Z, K, G must be n x n");
  if (R.rows() != n || R.cols() != m) throw DimensionError("R must be n x m");

  const DsmSolution s = dsdm_type2(p, cfg);
  if (!s.feasible) throw ConstraintViolation("no solution: " + s.reason);
  if (s.boundary) throw ConstraintViolation("characterization needs Re(z*w1) > 0");
  if (detail::adjoint_defect(G, -1.0) > cfg.residual_tol)
    throw ConstraintViolation("G must be skew-Hermitian");
  if (detail::adjoint_defect(K, 1.0) > cfg.residual_tol || !psd_ok(K, cfg))
    throw ConstraintViolation("K must be positive semidefinite");
  const cvec v = 2.0 * p.w1 + Z.adjoint() * p.z;
  const double re = inner(p.z, p.w1).real();
  const cmat T = K - v * v.adjoint() / (4.0 * re);
  const double vs = 2.0 * p.w1.norm() + fro(Z) * p.z.norm();
  if (min_eig_hermitian(T) < -cfg.psd_tol * (fro(K) + vs * vs / (4.0 * re)))
    throw ConstraintViolation("K - (2w1+Z*z)(2w1+Z*z)*/(4Re z*w1) must be positive semidefinite");

  cmat H1, H2, Hh1;
  detail::type2_bases(p, cfg, H1, H2, Hh1);
  const cmat Pz = null_projector(p.z, cfg);
  const cmat P2 = null_projector(p.x2, cfg);
  const cmat zzp = p.z * vec_pinv(p.z);
  const cmat x1x2p = p.x1 * vec_pinv(p.x2);
  const cmat Ht1 = Pz * Z.adjoint() * zzp + Pz * K * Pz - Pz * G * Pz;
  const cmat Ht2 = -Pz * Z.adjoint() * zzp * x1x2p - Pz * K * Pz * x1x2p + Pz * G * Pz * x1x2p +
                   Pz * R * P2;
  cmat D(n, n + m);
  D << H1 + Ht1, H2 + Ht2;
  return D;
}

// ------------------------------------------------------ Jordan/Lie reduction

struct ScalarProduct {
  enum class Form { Bilinear, Sesquilinear };
  enum class Algebra { Jordan, Lie };
  cmat M;
  Form form = Form::Sesquilinear;
  Algebra algebra = Algebra::Jordan;
};

/// Family that MΔ1 belongs to when Δ1 lies in the Jordan (A★ = A) or Lie
/// (A★ = −A) algebra of the scalar product.
inline StructureFamily reduced_family(const ScalarProduct& sp, const ToleranceConfig& cfg = {}) {
  const cmat& M = sp.M;
  if (M.rows() != M.cols()) throw DimensionError("scalar product matrix must be square");
  const Index n = M.rows();
  if (fro(M.adjoint() * M - cmat::Identity(n, n)) > cfg.residual_tol * std::sqrt(double(n)) * 10.0)
    throw StructuralError("scalar product matrix must be unitary");
  const bool bil = sp.form == ScalarProduct::Form::Bilinear;
  const cmat Mt = bil ? cmat(M.transpose()) : cmat(M.adjoint());
  double sigma = 0.0;
  if (fro(Mt - M) <= cfg.residual_tol * fro(M) * 10.0)
    sigma = 1.0;
  else if (fro(Mt + M) <= cfg.residual_tol * fro(M) * 10.0)
    sigma = -1.0;
  else
    throw StructuralError(bil ? "M must be symmetric or skew-symmetric"
                              : "M must be Hermitian or skew-Hermitian");
  const double eps = sp.algebra == ScalarProduct::Algebra::Jordan ? 1.0 : -1.0;
  if (bil) return sigma * eps > 0 ? StructureFamily::Symmetric : StructureFamily::SkewSymmetric;
  return sigma * eps > 0 ? StructureFamily::Hermitian : StructureFamily::SkewHermitian;
}

/// Solves the DSM with Δ1 in the Jordan or Lie algebra of ⟨·,·⟩_M by reducing to
/// data (x, My, Mz, w) and lifting back with M*.
inline DsmSolution jordan_lie_reduce(const ScalarProduct& sp, const DsmProblem& p,
                                     const ToleranceConfig& cfg = {}) {
  p.validate();
  if (sp.M.rows() != p.n()) throw DimensionError("M must be n x n");
  const StructureFamily fam = reduced_family(sp, cfg);
  DsmProblem r = p;
  r.y = sp.M * p.y;
  r.z = sp.M * p.z;
  DsmSolution s = dsm_solve(fam, r, cfg);
  if (!s.feasible) return s;
  const cmat Mh = sp.M.adjoint();
  s.H1 = Mh * s.H1;
  s.H2 = Mh * s.H2;
  return s;
}

}  // namespace dsmkit
