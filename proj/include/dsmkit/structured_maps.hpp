#pragma once

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

#include "linalg.hpp"

namespace dsmkit {

enum class StructureFamily {
  Unstructured,
  Hermitian,
  SkewHermitian,
  Symmetric,
  SkewSymmetric,
  PSD,
  NSD,
  Dissipative,     ///< Δ + Δ* ⪰ 0
  AntiDissipative  ///< Δ + Δ* ⪯ 0
};

inline const char* to_string(StructureFamily f) {
  switch (f) {
    case StructureFamily::Unstructured: return "unstructured";
    case StructureFamily::Hermitian: return "hermitian";
    case StructureFamily::SkewHermitian: return "skew-hermitian";
    case StructureFamily::Symmetric: return "symmetric";
    case StructureFamily::SkewSymmetric: return "skew-symmetric";
    case StructureFamily::PSD: return "psd";
    case StructureFamily::NSD: return "nsd";
    case StructureFamily::Dissipative: return "dissipative";
    case StructureFamily::AntiDissipative: return "anti-dissipative";
  }
  return "?";
}

inline std::optional<StructureFamily> parse_family(std::string_view s) {
  std::string k(s);
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  for (auto f : {StructureFamily::Unstructured, StructureFamily::Hermitian,
                 StructureFamily::SkewHermitian, StructureFamily::Symmetric,
                 StructureFamily::SkewSymmetric, StructureFamily::PSD, StructureFamily::NSD,
                 StructureFamily::Dissipative, StructureFamily::AntiDissipative})
    if (k == to_string(f)) return f;
  if (k == "herm") return StructureFamily::Hermitian;
  if (k == "skewherm" || k == "sherm") return StructureFamily::SkewHermitian;
  if (k == "sym") return StructureFamily::Symmetric;
  if (k == "skewsym" || k == "ssym") return StructureFamily::SkewSymmetric;
  if (k == "diss") return StructureFamily::Dissipative;
  return std::nullopt;
}

/// True for the families whose solution sets are real-linear varieties.
inline bool is_linear_family(StructureFamily f) {
  return f == StructureFamily::Unstructured || f == StructureFamily::Hermitian ||
         f == StructureFamily::SkewHermitian || f == StructureFamily::Symmetric ||
         f == StructureFamily::SkewSymmetric;
}

struct MapSolution {
  bool feasible = false;
  std::string reason;  ///< violated condition when infeasible
  cmat minimizer;
  double min_norm = 0.0;
  bool boundary = false;  ///< dissipative with Re(x*y) = 0; minimality not certified
  std::string free_params;
};

/// Free matrices of a single-map characterization. Which fields are read
/// depends on the family: H for the four linear structures, K for PSD/NSD,
/// Z/K/G for (anti-)dissipative, Z for unstructured.
struct MapFreeParams {
  cmat H;
  cmat Z;
  cmat K;
  cmat G;
};

namespace detail {

inline void require_pair(const cvec& x, const cvec& y) {
  if (x.size() != y.size()) throw DimensionError("x and y must have equal dimension");
  if (x.size() == 0) throw DimensionError("empty vectors");
  if (x.norm() == 0.0) throw DegenerateInput("x must be nonzero");
  if (y.norm() == 0.0) throw DegenerateInput("y must be nonzero");
}

inline double transpose_defect(const cmat& A, double sign) {
  const double nA = fro(A);
  if (nA == 0.0) return 0.0;
  return fro(A - sign * A.transpose()) / nA;
}

inline double adjoint_defect(const cmat& A, double sign) {
  const double nA = fro(A);
  if (nA == 0.0) return 0.0;
  return fro(A - sign * A.adjoint()) / nA;
}

inline MapSolution infeasible(std::string why) {
  MapSolution s;
  s.feasible = false;
  s.reason = std::move(why);
  return s;
}

inline MapSolution reflected(MapSolution s, const char* reason_if_infeasible) {
  if (!s.feasible) {
    s.reason = reason_if_infeasible;
    return s;
  }
  s.minimizer = -s.minimizer;
  return s;
}

/// yx† − (yx†)*𝒫_x: a dissipative solution of Δx = y, minimal only when
/// Re(x*y) = 0 or y ∥ x.
inline cmat dissipative_candidate(const cvec& x, const cvec& y) {
  const cmat yxp = y * vec_pinv(x);
  const cmat P = cmat::Identity(x.size(), x.size()) - x * vec_pinv(x);
  return yxp - yxp.adjoint() * P;
}

/// Least-norm dissipative Δ with Δx = y, Re(x*y) ≥ 0. In an orthonormal
/// basis starting with x̂ = x/‖x‖ write ŷ = y/‖x‖ = a x̂ + b with b ⊥ x̂,
/// ρ = Re a. The optimum is ŷx̂* + (s−1)x̂b* + s²bb*/(4ρ), where s ∈ [0, 1)
/// solves κs³ + s − 1 = 0 with κ = ‖b‖²/(8ρ²).
inline cmat dissipative_minimizer(const cvec& x, const cvec& y, bool boundary) {
  const double nx = x.norm();
  const cvec xh = x / nx;
  const cvec yh = y / nx;
  const cplx a = inner(xh, yh);
  const cvec b = yh - a * xh;
  const double rho = a.real();
  const double nb2 = b.squaredNorm();
  if (boundary || rho <= 0.0 || nb2 == 0.0) return dissipative_candidate(x, y);
  const double kappa = nb2 / (8.0 * rho * rho);
  // f(s) = κs³ + s − 1 is increasing and convex on [0, 1]; Newton from s = 1
  // decreases monotonically to the root.
  double s = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double f = kappa * s * s * s + s - 1.0;
    const double step = f / (3.0 * kappa * s * s + 1.0);
    s -= step;
    if (std::abs(step) <= 1e-16 * std::max(s, 1e-300)) break;
  }
  return yh * xh.adjoint() + (s - 1.0) * xh * b.adjoint() + (s * s / (4.0 * rho)) * b * b.adjoint();
}

}  // namespace detail

/// Minimal Frobenius-norm Δ with Δx = y in the given family.
inline MapSolution map_min(StructureFamily family, const cvec& x, const cvec& y,
                           const ToleranceConfig& cfg = {}) {
  detail::require_pair(x, y);
  const double scale = x.norm() * y.norm();
  const cplx xy = inner(x, y);
  const cmat xp = vec_pinv(x);
  const cmat yxp = y * xp;
  const cmat xxp = x * xp;

  MapSolution s;
  s.feasible = true;
  switch (family) {
    case StructureFamily::Unstructured:
      s.minimizer = yxp;
      s.free_params = "Z in C^{n,n}: yx^+ + Z P_x";
      break;
    case StructureFamily::Hermitian:
      if (std::abs(xy.imag()) > cfg.residual_tol * scale) return detail::infeasible("x*y not real");
      s.minimizer = yxp + yxp.adjoint() - (xp * y)(0, 0) * xxp;
      s.free_params = "H Hermitian n x n: P_x H P_x";
      break;
    case StructureFamily::SkewHermitian:
      if (std::abs(xy.real()) > cfg.residual_tol * scale)
        return detail::infeasible("x*y not imaginary");
      s.minimizer = yxp - yxp.adjoint() - (xp * y)(0, 0) * xxp;
      s.free_params = "S skew-Hermitian n x n: P_x S P_x";
      break;
    case StructureFamily::Symmetric:
      s.minimizer = yxp + yxp.transpose() - xxp.transpose() * yxp;
      s.free_params = "H complex symmetric n x n: P_x^T H P_x";
      break;
    case StructureFamily::SkewSymmetric: {
      const cplx xty = (x.transpose() * y)(0, 0);
      if (std::abs(xty) > cfg.residual_tol * scale) return detail::infeasible("x^T y nonzero");
      s.minimizer = yxp - yxp.transpose() + xxp.transpose() * yxp;
      s.free_params = "H complex skew-symmetric n x n: P_x^T H P_x";
      break;
    }
    case StructureFamily::PSD:
      if (std::abs(xy.imag()) > cfg.residual_tol * scale || xy.real() <= cfg.residual_tol * scale)
        return detail::infeasible("x*y not positive");
      s.minimizer = y * y.adjoint() / xy.real();
      s.free_params = "K positive semidefinite n x n: P_x K P_x";
      break;
    case StructureFamily::NSD:
      return detail::reflected(map_min(StructureFamily::PSD, x, -y, cfg), "x*y not negative");
    case StructureFamily::Dissipative: {
      if (xy.real() < -cfg.residual_tol * scale) return detail::infeasible("Re(x*y) negative");
      s.boundary = std::abs(xy.real()) <= cfg.residual_tol * scale;
      s.minimizer = detail::dissipative_minimizer(x, y, s.boundary);
      s.free_params =
          "Z, K, G in C^{n,n}: G skew-Hermitian, K psd, K - (2y+Z*x)(2y+Z*x)*/(4Re x*y) psd";
      if (s.boundary) {
        const double lmin = min_eig_hermitian(s.minimizer);
        if (lmin < -psd_threshold(s.minimizer, cfg))
          throw VerificationFailure("dissipative boundary minimizer failed a posteriori check");
      }
      break;
    }
    case StructureFamily::AntiDissipative:
      return detail::reflected(map_min(StructureFamily::Dissipative, x, -y, cfg),
                               "Re(x*y) positive");
  }
  s.min_norm = fro(s.minimizer);
  return s;
}

/// Minimal-norm Δ ∈ C^{n,m} with Δx = y and Δ*z = w (no structure).
/// x, w ∈ C^m; y, z ∈ C^n.
inline MapSolution map_two_sided(const cvec& x, const cvec& y, const cvec& z, const cvec& w,
                                 const ToleranceConfig& cfg = {}) {
  if (x.size() != w.size() || y.size() != z.size())
    throw DimensionError("map_two_sided: need dim x = dim w and dim y = dim z");
  if (x.norm() == 0.0 || z.norm() == 0.0) throw DegenerateInput("x and z must be nonzero");
  const double scale = x.norm() * w.norm() + y.norm() * z.norm();
  if (std::abs(inner(x, w) - inner(y, z)) > cfg.residual_tol * scale)
    return detail::infeasible("x*w != y*z");
  MapSolution s;
  s.feasible = true;
  const cmat xp = vec_pinv(x);
  const cmat wzp_h = (w * vec_pinv(z)).adjoint();
  s.minimizer = y * xp + wzp_h - wzp_h * x * xp;
  s.min_norm = fro(s.minimizer);
  s.free_params = "R in C^{n,m}: P_z R P_x";
  return s;
}

/// The closed-form trace expression for the two-sided minimal norm, kept as
/// an independent cross-check of ‖Δ̂‖_F.
inline double two_sided_norm_formula(const cvec& x, const cvec& y, const cvec& z,
                                     const cvec& w) {
  const cmat yxp = y * vec_pinv(x);
  const cmat wzp = w * vec_pinv(z);
  const cmat xxp = x * vec_pinv(x);
  const double v = yxp.squaredNorm() + wzp.squaredNorm() -
                   (wzp * wzp.adjoint() * xxp).trace().real();
  return std::sqrt(std::max(v, 0.0));
}

/// Evaluates the characterization of all solutions of Δx = y at the given
/// free matrices. Throws ConstraintViolation when a free matrix breaks its
/// constraint or the data admit no solution.
inline cmat map_characterize(StructureFamily family, const cvec& x, const cvec& y,
                             const MapFreeParams& p, const ToleranceConfig& cfg = {}) {
  detail::require_pair(x, y);
  const Index n = x.size();
  auto need = [n](const cmat& A, const char* name) {
    if (A.rows() != n || A.cols() != n)
      throw DimensionError(std::string("free parameter ") + name + " must be n x n");
  };
  const cmat P = null_projector(x, cfg);

  if (family == StructureFamily::NSD || family == StructureFamily::AntiDissipative) {
    const auto base = family == StructureFamily::NSD ? StructureFamily::PSD
                                                     : StructureFamily::Dissipative;
    return -map_characterize(base, x, -y, p, cfg);
  }

  const MapSolution s = map_min(family, x, y, cfg);
  if (!s.feasible) throw ConstraintViolation("no solution: " + s.reason);

  switch (family) {
    case StructureFamily::Unstructured:
      need(p.Z, "Z");
      return s.minimizer + p.Z * P;
    case StructureFamily::Hermitian:
      need(p.H, "H");
      if (detail::adjoint_defect(p.H, 1.0) > cfg.residual_tol)
        throw ConstraintViolation("H must be Hermitian");
      return s.minimizer + P * p.H * P;
    case StructureFamily::SkewHermitian:
      need(p.H, "H");
      if (detail::adjoint_defect(p.H, -1.0) > cfg.residual_tol)
        throw ConstraintViolation("H must be skew-Hermitian");
      return s.minimizer + P * p.H * P;
    case StructureFamily::Symmetric:
      need(p.H, "H");
      if (detail::transpose_defect(p.H, 1.0) > cfg.residual_tol)
        throw ConstraintViolation("H must be complex symmetric");
      return s.minimizer + P.transpose() * p.H * P;
    case StructureFamily::SkewSymmetric:
      need(p.H, "H");
      if (detail::transpose_defect(p.H, -1.0) > cfg.residual_tol)
        throw ConstraintViolation("H must be complex skew-symmetric");
      return s.minimizer + P.transpose() * p.H * P;
    case StructureFamily::PSD:
      need(p.K, "K");
      if (detail::adjoint_defect(p.K, 1.0) > cfg.residual_tol || !psd_ok(p.K, cfg))
        throw ConstraintViolation("K must be positive semidefinite");
      return s.minimizer + P * p.K * P;
    case StructureFamily::Dissipative: {
      need(p.Z, "Z");
      need(p.K, "K");
      need(p.G, "G");
      if (s.boundary)
        throw ConstraintViolation("characterization needs Re(x*y) > 0");
      if (detail::adjoint_defect(p.G, -1.0) > cfg.residual_tol)
        throw ConstraintViolation("G must be skew-Hermitian");
      if (detail::adjoint_defect(p.K, 1.0) > cfg.residual_tol || !psd_ok(p.K, cfg))
        throw ConstraintViolation("K must be positive semidefinite");
      const cvec v = 2.0 * y + p.Z.adjoint() * x;
      const double re = inner(x, y).real();
      const cmat T = p.K - v * v.adjoint() / (4.0 * re);
      // Rounding in v scales with its two summands, not with v itself.
      const double vs = 2.0 * y.norm() + fro(p.Z) * x.norm();
      if (min_eig_hermitian(T) < -cfg.psd_tol * (fro(p.K) + vs * vs / (4.0 * re)))
        throw ConstraintViolation("K - (2y+Z*x)(2y+Z*x)*/(4Re x*y) must be positive semidefinite");
      const cmat yxp = y * vec_pinv(x);
      const cmat xxp = x * vec_pinv(x);
      return yxp + yxp.adjoint() * P + xxp * p.Z * P + P * p.K * P + P * p.G * P;
    }
    default:
      break;
  }
  throw Error("unreachable family");
}

}  // namespace dsmkit
