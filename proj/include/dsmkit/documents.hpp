#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dsm.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "pencil.hpp"
#include "structured_maps.hpp"

namespace dsmkit::io {

namespace detail {

inline cvec as_vector(const cmat& A, const char* name) {
  if (A.cols() != 1) throw FormatError(std::string(name) + ": expected a column vector");
  return A.col(0);
}

inline bool is_diss(StructureFamily f) {
  return f == StructureFamily::Dissipative || f == StructureFamily::AntiDissipative;
}

inline Orientation orientation(StructureFamily f) {
  return f == StructureFamily::AntiDissipative ? Orientation::AntiDissipative
                                               : Orientation::Dissipative;
}

}  // namespace detail

/// Routes (family, x, y[, z, w]) to the matching solver:
///   no z, w                       -> map_min
///   unstructured with z, w        -> map_two_sided
///   (anti-)dissipative, square    -> dsdm_type1 (x, y, z, w may be n x k)
///   (anti-)dissipative, dim x > n -> dsdm_type2
///   any other family with z, w    -> dsm_solve
inline ResultDocument solve_map_document(StructureFamily family, const cmat& X, const cmat& Y,
                                         const std::optional<cmat>& Z,
                                         const std::optional<cmat>& W,
                                         const ToleranceConfig& cfg = {}) {
  if (Z.has_value() != W.has_value()) throw FormatError("--z and --w must be given together");
  ResultDocument d;
  d.family = to_string(family);
  d.problem["x"] = X;
  d.problem["y"] = Y;
  if (Z) {
    d.problem["z"] = *Z;
    d.problem["w"] = *W;
  }

  if (!Z) {
    d.kind = "map";
    const cvec x = detail::as_vector(X, "x"), y = detail::as_vector(Y, "y");
    const MapSolution s = map_min(family, x, y, cfg);
    d.feasible = s.feasible;
    d.reason = s.reason;
    if (!s.feasible) return d;
    d.norm_lower = d.norm_upper = s.min_norm;
    d.exact = !s.boundary;
    d.note = s.boundary ? "boundary, minimality not certified" : "closed form";
    d.solution = s.minimizer;
    d.residuals = verify_solution(s.minimizer, family, x, y, std::nullopt, cfg);
    return d;
  }

  if (family == StructureFamily::Unstructured) {
    d.kind = "two-sided";
    const cvec x = detail::as_vector(X, "x"), y = detail::as_vector(Y, "y");
    const cvec z = detail::as_vector(*Z, "z"), w = detail::as_vector(*W, "w");
    const MapSolution s = map_two_sided(x, y, z, w, cfg);
    d.feasible = s.feasible;
    d.reason = s.reason;
    if (!s.feasible) return d;
    d.norm_lower = d.norm_upper = s.min_norm;
    d.exact = true;
    d.note = "closed form";
    d.solution = s.minimizer;
    d.residuals = verify_solution(s.minimizer, family, x, y, std::make_pair(z, w), cfg);
    return d;
  }

  if (detail::is_diss(family) && X.rows() == Y.rows()) {
    d.kind = "type1";
    const Type1Problem q{X, Y, *Z, *W};
    const Orientation o = detail::orientation(family);
    const Type1Solution s = dsdm_type1(q, cfg, o);
    d.feasible = s.feasible;
    d.reason = s.reason;
    if (!s.feasible) return d;
    d.norm_lower = d.norm_upper = s.min_norm;
    d.exact = s.exact;
    d.note = s.exact ? "closed form" : "hypotheses failed: ";
    for (std::size_t i = 0; !s.exact && i < s.warnings.size(); ++i)
      d.note += (i ? "; " : "") + s.warnings[i];
    d.solution = s.minimizer;
    d.residuals = verify_solution(s.minimizer, q, o, cfg);
    return d;
  }

  const DsmProblem p = DsmProblem::from_full(detail::as_vector(X, "x"), detail::as_vector(Y, "y"),
                                             detail::as_vector(*Z, "z"),
                                             detail::as_vector(*W, "w"));
  DsmSolution s;
  if (detail::is_diss(family)) {
    d.kind = "type2";
    s = dsdm_type2(p, cfg, detail::orientation(family));
  } else {
    d.kind = "dsm";
    s = dsm_solve(family, p, cfg);
  }
  d.feasible = s.feasible;
  d.reason = s.reason;
  if (!s.feasible) return d;
  d.norm_lower = s.norm_lower;
  d.norm_upper = s.norm_upper;
  d.exact = s.exact;
  d.note = s.sufficiency_note;
  d.solution = s.H();
  d.residuals = verify_solution(*d.solution, p, family, cfg);
  return d;
}

struct VerifyReport {
  std::vector<Condition> checks;
  bool pass = false;
  std::optional<double> oracle_norm;
};

namespace detail {

inline const cmat& problem_part(const ResultDocument& d, const char* key) {
  const auto it = d.problem.find(key);
  if (it == d.problem.end()) throw FormatError(std::string("problem: missing field '") + key + "'");
  return it->second;
}

inline void finalize(VerifyReport& r) {
  r.pass = !r.checks.empty() &&
           std::all_of(r.checks.begin(), r.checks.end(), [](const Condition& c) { return c.held; });
}

}  // namespace detail

/// Re-audits a ResultDocument: residuals are recomputed from the echoed
/// problem, the norm claims are checked against the stored solution and, when
/// the document claims exactness, the oracle must not undercut it.
inline VerifyReport verify_document(const ResultDocument& d, const ToleranceConfig& cfg = {},
                                    const OracleBudget& budget = {}) {
  VerifyReport r;
  const auto fam = parse_family(d.family);
  if (!fam) throw FormatError("result: unknown family '" + d.family + "'");
  const StructureFamily family = *fam;
  const cmat& X = detail::problem_part(d, "x");
  const cmat& Y = detail::problem_part(d, "y");
  std::optional<cmat> Z, W;
  if (d.problem.count("z")) {
    Z = detail::problem_part(d, "z");
    W = detail::problem_part(d, "w");
  }

  const ResultDocument fresh = solve_map_document(family, X, Y, Z, W, cfg);
  r.checks.push_back({"kind matches routing", fresh.kind == d.kind});
  r.checks.push_back({"feasibility verdict reproduces", fresh.feasible == d.feasible});
  if (!d.feasible || !fresh.feasible) {
    detail::finalize(r);
    return r;
  }
  if (!d.solution) {
    r.checks.push_back({"solution present", false});
    detail::finalize(r);
    return r;
  }
  const cmat& D = *d.solution;

  ResidualReport audit;
  try {
    if (d.kind == "map") {
      audit = verify_solution(D, family, X.col(0), Y.col(0), std::nullopt, cfg);
    } else if (d.kind == "two-sided") {
      audit = verify_solution(D, family, X.col(0), Y.col(0), std::make_pair(cvec(Z->col(0)), cvec(W->col(0))), cfg);
    } else if (d.kind == "type1") {
      audit = verify_solution(D, Type1Problem{X, Y, *Z, *W}, detail::orientation(family), cfg);
    } else {
      audit = verify_solution(D, DsmProblem::from_full(X.col(0), Y.col(0), Z->col(0), W->col(0)),
                              family, cfg);
    }
  } catch (const DimensionError&) {
    r.checks.push_back({"solution shape", false});
    detail::finalize(r);
    return r;
  }
  for (const auto& c : audit.checks) r.checks.push_back(c);

  const double nD = fro(D);
  const double tol = 1e-10 * std::max(1.0, d.norm_upper);
  r.checks.push_back({"norm.upper = |solution|_F", std::abs(nD - d.norm_upper) <= tol});
  r.checks.push_back({"norm.lower <= norm.upper", d.norm_lower <= d.norm_upper + tol});
  r.checks.push_back({"norms reproduce", std::abs(fresh.norm_upper - d.norm_upper) <= tol &&
                                             std::abs(fresh.norm_lower - d.norm_lower) <= tol &&
                                             fresh.exact == d.exact});

  if (d.exact) {
    OracleResult o;
    if (d.kind == "type1") {
      o = oracle_min_structured(Type1Problem{X, Y, *Z, *W}, detail::orientation(family), budget, cfg);
    } else if (d.kind == "map" || d.kind == "two-sided") {
      std::vector<MapConstraint> cons{{X.col(0), Y.col(0), false}};
      if (Z) cons.push_back({Z->col(0), W->col(0), true});
      if (is_linear_family(family)) {
        const Index lead = family == StructureFamily::Unstructured ? 0 : D.rows();
        o = oracle_least_norm(D.rows(), D.cols(), cons, family, lead, cfg);
      } else {
        o = oracle_min_map(family, X.col(0), Y.col(0), std::nullopt, budget, cfg);
      }
    } else {
      const DsmProblem p = DsmProblem::from_full(X.col(0), Y.col(0), Z->col(0), W->col(0));
      if (is_linear_family(family)) {
        o = oracle_least_norm(p.n(), p.n() + p.m(), {{p.x(), p.y, false}, {p.z, p.w(), true}},
                              family, p.n(), cfg);
      } else {
        o = oracle_min_structured(p, family, budget, cfg);
      }
    }
    r.oracle_norm = o.norm;
    const bool undercut = o.certified_feasible && o.norm < d.norm_upper * (1.0 - 1e-6) - 1e-12;
    r.checks.push_back({"oracle does not undercut exact minimum", !undercut});
  }
  detail::finalize(r);
  return r;
}

/// Relative residual ‖(L − ΔL)(λ)u‖ / ((‖L(λ)‖ + ‖ΔL(λ)‖)‖u‖).
inline double perturbation_residual(const PHPencil& P, cplx lambda, const cvec& u,
                                    const PerturbationBlocks& d) {
  const cmat L = P.at(lambda);
  const cmat dL = d.dM() + lambda * d.dN();
  const double scale = (fro(L) + fro(dL)) * u.norm();
  return scale == 0.0 ? 0.0 : ((L - dL) * u).norm() / scale;
}

/// Builds the single-shot backward-error document, including the perturbation
/// reconstructed at the upper bound when the error is finite.
inline BackerrDocument solve_backerr_document(const PHPencil& P, const EigenPair& ep,
                                              BlockSelection blocks, Variant variant,
                                              const ToleranceConfig& cfg = {}) {
  BackerrDocument d;
  d.pencil = P;
  d.lambda = ep.lambda;
  d.u = ep.u();
  d.bounds = backward_error(P, ep, blocks, variant, cfg);
  if (d.bounds.finite) {
    d.perturbation = reconstruct_perturbation(P, ep, d.bounds, cfg);
    d.residual = perturbation_residual(P, cplx(0.0, ep.lambda.imag()), d.u, *d.perturbation);
  }
  return d;
}

inline VerifyReport verify_backerr_document(const BackerrDocument& d,
                                            const ToleranceConfig& cfg = {}) {
  VerifyReport r;
  const PHPencil& P = d.pencil;
  const EigenPair ep = EigenPair::from_u(d.lambda, d.u, P.n(), P.m());
  const BackwardErrorBounds fresh = backward_error(P, ep, d.bounds.blocks, d.bounds.variant, cfg);
  const auto close = [](double a, double b) {
    if (std::isinf(a) || std::isinf(b)) return a == b;
    return std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b));
  };
  r.checks.push_back({"finiteness reproduces", fresh.finite == d.bounds.finite});
  r.checks.push_back({"bounds reproduce", close(fresh.eta_lower, d.bounds.eta_lower) &&
                                              close(fresh.eta_upper, d.bounds.eta_upper)});
  if (!d.bounds.finite) {
    detail::finalize(r);
    return r;
  }
  if (!d.perturbation) {
    r.checks.push_back({"perturbation present", false});
    detail::finalize(r);
    return r;
  }
  const PerturbationBlocks& p = *d.perturbation;
  const Index n = P.n(), m = P.m();
  const bool shapes = p.dJ.rows() == n && p.dJ.cols() == n && p.dR.rows() == n &&
                      p.dR.cols() == n && p.dE.rows() == n && p.dE.cols() == n &&
                      p.dB.rows() == n && p.dB.cols() == m;
  r.checks.push_back({"perturbation shapes", shapes});
  if (!shapes) {
    detail::finalize(r);
    return r;
  }
  const double res = perturbation_residual(P, cplx(0.0, d.lambda.imag()), d.u, p);
  r.checks.push_back({"(L - dL)(lambda)u = 0", res <= cfg.residual_tol});
  using dsmkit::detail::adjoint_defect;
  r.checks.push_back({"dJ skew-Hermitian", adjoint_defect(p.dJ, -1.0) <= cfg.residual_tol});
  r.checks.push_back({"dR Hermitian", adjoint_defect(p.dR, 1.0) <= cfg.residual_tol});
  r.checks.push_back({"dE Hermitian", adjoint_defect(p.dE, 1.0) <= cfg.residual_tol});
  if (d.bounds.variant == Variant::Sd)
    r.checks.push_back({"dR positive semidefinite", min_eig_hermitian(p.dR) >= -psd_threshold(p.dR, cfg)});
  const BlockSelection& b = d.bounds.blocks;
  const bool zeros = (b.has(BlockSelection::J) || p.dJ.norm() == 0.0) &&
                     (b.has(BlockSelection::R) || p.dR.norm() == 0.0) &&
                     (b.has(BlockSelection::E) || p.dE.norm() == 0.0) &&
                     (b.has(BlockSelection::B) || p.dB.norm() == 0.0);
  r.checks.push_back({"unselected blocks zero", zeros});
  const double nrm = p.norm();
  const double tol = 1e-10 * std::max(1.0, d.bounds.eta_upper);
  r.checks.push_back({"perturbation norm within bounds",
                      nrm >= d.bounds.eta_lower - tol && nrm <= d.bounds.eta_upper + tol});
  if (d.bounds.exact)
    r.checks.push_back({"perturbation norm = eta", std::abs(nrm - d.bounds.eta_upper) <= tol});
  detail::finalize(r);
  return r;
}

}  // namespace dsmkit::io
