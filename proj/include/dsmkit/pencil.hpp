#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SVD>

#include "dsm.hpp"
#include "linalg.hpp"
#include "random.hpp"

namespace dsmkit {

/// L(z) = M + zN with M = [[0, J−R, B], [(J−R)*, 0, 0], [B*, 0, S]] and
/// N = [[0, E, 0], [−E*, 0, 0], [0, 0, 0]].
struct PHPencil {
  cmat J, R, E, B, S;

  Index n() const { return J.rows(); }
  Index m() const { return B.cols(); }

  cmat M() const {
    const Index n_ = n(), m_ = m();
    cmat out = cmat::Zero(2 * n_ + m_, 2 * n_ + m_);
    out.block(0, n_, n_, n_) = J - R;
    out.block(0, 2 * n_, n_, m_) = B;
    out.block(n_, 0, n_, n_) = (J - R).adjoint();
    out.block(2 * n_, 0, m_, n_) = B.adjoint();
    out.block(2 * n_, 2 * n_, m_, m_) = S;
    return out;
  }

  cmat N() const {
    const Index n_ = n(), m_ = m();
    cmat out = cmat::Zero(2 * n_ + m_, 2 * n_ + m_);
    out.block(0, n_, n_, n_) = E;
    out.block(n_, 0, n_, n_) = -E.adjoint();
    return out;
  }

  cmat at(cplx lambda) const { return M() + lambda * N(); }

  /// Per-invariant report; shapes are checked first and short-circuit the rest.
  std::vector<Condition> check(const ToleranceConfig& cfg = {}) const {
    const Index n_ = n(), m_ = m();
    std::vector<Condition> out;
    const bool shapes = n_ > 0 && m_ > 0 && J.cols() == n_ && R.rows() == n_ && R.cols() == n_ &&
                        E.rows() == n_ && E.cols() == n_ && B.rows() == n_ && S.rows() == m_ &&
                        S.cols() == m_;
    out.push_back({"shapes", shapes});
    if (!shapes) return out;
    const bool finite = J.allFinite() && R.allFinite() && E.allFinite() && B.allFinite() &&
                        S.allFinite();
    out.push_back({"finite", finite});
    if (!finite) return out;
    out.push_back({"J skew-Hermitian", detail::adjoint_defect(J, -1.0) <= cfg.residual_tol});
    out.push_back({"E Hermitian", detail::adjoint_defect(E, 1.0) <= cfg.residual_tol});
    const bool rh = detail::adjoint_defect(R, 1.0) <= cfg.residual_tol;
    out.push_back({"R Hermitian", rh});
    out.push_back({"R positive semidefinite", rh && min_eig_hermitian(R) >= -psd_threshold(R, cfg)});
    const bool sh = detail::adjoint_defect(S, 1.0) <= cfg.residual_tol;
    out.push_back({"S Hermitian", sh});
    out.push_back({"S positive definite", sh && min_eig_hermitian(S) > psd_threshold(S, cfg)});
    return out;
  }

  void validate(const ToleranceConfig& cfg = {}) const {
    for (const auto& c : check(cfg)) {
      if (c.held) continue;
      if (c.name == "shapes") throw DimensionError("pencil: inconsistent block shapes");
      throw StructuralError("pencil: " + c.name + " violated");
    }
  }
};

struct EigenPair {
  cplx lambda{0.0, 0.0};
  cvec u1, u2, u3;

  cvec u() const {
    cvec v(u1.size() + u2.size() + u3.size());
    v << u1, u2, u3;
    return v;
  }

  static EigenPair from_u(cplx lambda, const cvec& u, Index n, Index m) {
    if (u.size() != 2 * n + m) throw DimensionError("eigenvector must have length 2n+m");
    return {lambda, u.head(n), u.segment(n, n), u.tail(m)};
  }

  void validate(const PHPencil& P, const ToleranceConfig& cfg = {}) const {
    if (u1.size() != P.n() || u2.size() != P.n() || u3.size() != P.m())
      throw DimensionError("eigenpair dimensions do not match the pencil");
    if (!(u1.allFinite() && u2.allFinite() && u3.allFinite() && std::isfinite(lambda.real()) &&
          std::isfinite(lambda.imag())))
      throw DimensionError("eigenpair has non-finite entries");
    if (u().norm() == 0.0) throw DegenerateInput("eigenvector must be nonzero");
    if (std::abs(lambda.real()) > cfg.residual_tol * std::abs(lambda))
      throw StructuralError("lambda must be purely imaginary");
  }
};

/// Nonempty subset of {J, R, E, B}; canonical spelling lists the letters in that order.
class BlockSelection {
 public:
  static constexpr unsigned J = 1, R = 2, E = 4, B = 8;

  BlockSelection() = default;
  explicit BlockSelection(unsigned mask) : mask_(mask & 15u) {}

  static BlockSelection parse(std::string_view s) {
    unsigned mask = 0;
    for (char c : s) {
      switch (std::toupper(static_cast<unsigned char>(c))) {
        case 'J': mask |= J; break;
        case 'R': mask |= R; break;
        case 'E': mask |= E; break;
        case 'B': mask |= B; break;
        case ',': case ' ': break;
        default: throw std::invalid_argument("unknown block '" + std::string(1, c) + "'");
      }
    }
    BlockSelection b(mask);
    if (!b.supported())
      throw std::invalid_argument("unsupported block combination '" + std::string(s) + "'");
    return b;
  }

  bool has(unsigned bit) const { return (mask_ & bit) != 0; }
  unsigned mask() const { return mask_; }

  std::string str() const {
    std::string s;
    if (has(J)) s += 'J';
    if (has(R)) s += 'R';
    if (has(E)) s += 'E';
    if (has(B)) s += 'B';
    return s;
  }

  /// The two-, three- and four-block combinations.
  bool supported() const {
    int count = 0;
    for (unsigned b = 1; b <= 8; b <<= 1) count += has(b) ? 1 : 0;
    return count >= 2;
  }

  static std::vector<BlockSelection> all() {
    std::vector<BlockSelection> out;
    for (const char* s : {"JR", "JE", "JB", "RE", "RB", "EB", "JRE", "JRB", "REB", "JEB", "JREB"})
      out.push_back(parse(s));
    return out;
  }

  bool operator==(const BlockSelection& o) const { return mask_ == o.mask_; }
  bool is(std::string_view s) const { return str() == s; }

 private:
  unsigned mask_ = 0;
};

enum class Variant { S, Sd };

inline const char* to_string(Variant v) { return v == Variant::S ? "s" : "sd"; }

inline Variant parse_variant(std::string_view s) {
  if (s == "s" || s == "S") return Variant::S;
  if (s == "sd" || s == "Sd" || s == "SD") return Variant::Sd;
  throw std::invalid_argument("variant must be 's' or 'sd'");
}

struct BackwardErrorBounds {
  Variant variant = Variant::Sd;
  BlockSelection blocks;
  bool finite = false;
  double eta_lower = std::numeric_limits<double>::infinity();
  double eta_upper = std::numeric_limits<double>::infinity();
  bool exact = false;
  cmat H1, H2;
  cplx alpha{0.0, 0.0};
  cvec ytilde, w1;
  std::vector<Condition> conditions;

  std::string conditions_report() const {
    std::string s;
    for (const auto& c : conditions) {
      if (!s.empty()) s += "; ";
      s += c.name + (c.held ? " [ok]" : " [fail]");
    }
    return s;
  }
};

struct PerturbationBlocks {
  cmat dJ, dR, dE, dB;

  double norm() const {
    return std::sqrt(dJ.squaredNorm() + dR.squaredNorm() + dE.squaredNorm() + dB.squaredNorm());
  }

  cmat dM() const {
    const Index n = dJ.rows(), m = dB.cols();
    cmat out = cmat::Zero(2 * n + m, 2 * n + m);
    out.block(0, n, n, n) = dJ - dR;
    out.block(0, 2 * n, n, m) = dB;
    out.block(n, 0, n, n) = (dJ - dR).adjoint();
    out.block(2 * n, 0, m, n) = dB.adjoint();
    return out;
  }

  cmat dN() const {
    const Index n = dJ.rows(), m = dB.cols();
    cmat out = cmat::Zero(2 * n + m, 2 * n + m);
    out.block(0, n, n, n) = dE;
    out.block(n, 0, n, n) = -dE.adjoint();
    return out;
  }
};

struct MappingData {
  cvec x, y, z, w;
};

/// DSM data equivalent to (L(λ) − ΔL(λ))u = 0.
inline MappingData mapping_data(const PHPencil& P, const EigenPair& ep) {
  const Index n = P.n(), m = P.m();
  if (ep.u1.size() != n || ep.u2.size() != n || ep.u3.size() != m)
    throw DimensionError("eigenpair dimensions do not match the pencil");
  const cplx l = ep.lambda;
  MappingData d;
  d.x.resize(n + m);
  d.x << ep.u2, ep.u3;
  d.y = (P.J - P.R + l * P.E) * ep.u2 + P.B * ep.u3;
  d.z = ep.u1;
  d.w.resize(n + m);
  d.w << -(P.J + P.R + l * P.E) * ep.u1, P.B.adjoint() * ep.u1 + P.S * ep.u3;
  return d;
}

namespace detail {

inline cplx checked_lambda(cplx l, const ToleranceConfig& cfg) {
  if (!(std::isfinite(l.real()) && std::isfinite(l.imag())))
    throw DimensionError("lambda must be finite");
  if (std::abs(l) == 0.0) throw DegenerateInput("lambda must be nonzero");
  if (std::abs(l.real()) > cfg.residual_tol * std::abs(l))
    throw StructuralError("lambda must be purely imaginary");
  return {0.0, l.imag()};
}

inline bool small_vec(const cvec& v, double scale, const ToleranceConfig& cfg) {
  return v.norm() <= cfg.residual_tol * scale;
}

inline std::string block_args(const BlockSelection& b) {
  std::string s;
  for (char c : b.str()) {
    if (!s.empty()) s += ',';
    s += c;
  }
  return s;
}

[[noreturn]] inline void prior_work(Variant v, const BlockSelection& b) {
  throw NotImplemented(std::string("η^") + (v == Variant::S ? "S" : "Sd") + "(" + block_args(b) +
                       ") lives in prior work; not implemented");
}

struct PencilContext {
  cplx lambda;
  double lam2;
  cvec ytilde, w1;
  double scale;  ///< ‖L(λ)‖_F ‖u‖, residual yardstick
};

inline PencilContext context(const PHPencil& P, const EigenPair& ep, const ToleranceConfig& cfg) {
  const Index n = P.n(), m = P.m();
  if (ep.u1.size() != n || ep.u2.size() != n || ep.u3.size() != m)
    throw DimensionError("eigenpair dimensions do not match the pencil");
  if (ep.u().norm() == 0.0) throw DegenerateInput("eigenvector must be nonzero");
  PencilContext c;
  c.lambda = checked_lambda(ep.lambda, cfg);
  c.lam2 = std::norm(c.lambda);
  c.ytilde = (P.J - P.R + c.lambda * P.E) * ep.u2;
  c.w1 = -(P.J + P.R + c.lambda * P.E) * ep.u1;
  c.scale = (fro(P.J) + fro(P.R) + std::abs(c.lambda) * fro(P.E) + fro(P.B) + fro(P.S)) *
            ep.u().norm();
  if (c.scale == 0.0) c.scale = ep.u().norm();
  return c;
}

inline BackwardErrorBounds not_finite(BackwardErrorBounds b) {
  b.finite = false;
  b.eta_lower = b.eta_upper = std::numeric_limits<double>::infinity();
  return b;
}

inline bool all_held(const std::vector<Condition>& cs) {
  return std::all_of(cs.begin(), cs.end(), [](const Condition& c) { return c.held; });
}

inline cmat b_part(const PHPencil& P, const EigenPair& ep, const BlockSelection& b) {
  if (!b.has(BlockSelection::B)) return cmat::Zero(P.n(), P.m());
  return ep.u1 * vec_pinv(ep.u1) * P.B;
}

}  // namespace detail

/// Symmetry-structure-preserving eigenpair backward error for JB, RB, EB, JEB.
inline BackwardErrorBounds eta_s(const PHPencil& P, const EigenPair& ep, BlockSelection blocks,
                                 const ToleranceConfig& cfg = {}) {
  const std::string code = blocks.str();
  if (!(code == "JB" || code == "RB" || code == "EB" || code == "JEB"))
    detail::prior_work(Variant::S, blocks);
  const auto c = detail::context(P, ep, cfg);
  BackwardErrorBounds b;
  b.variant = Variant::S;
  b.blocks = blocks;
  b.ytilde = c.ytilde;
  b.w1 = c.w1;

  const double u1n = ep.u1.norm();
  b.conditions.push_back({"u3 = 0", detail::small_vec(ep.u3, ep.u().norm(), cfg)});
  const bool rb = code == "RB";
  if (rb) {
    const cmat K = P.J + c.lambda * P.E;
    const bool held = std::abs(inner(ep.u1, K * ep.u1)) <= cfg.residual_tol * fro(K) * u1n * u1n;
    b.conditions.push_back({"u1*(J+lambda E)u1 = 0", held});
  } else {
    b.conditions.push_back({"R u1 = 0", detail::small_vec(P.R * ep.u1, fro(P.R) * u1n, cfg)});
  }
  if (!detail::all_held(b.conditions)) return detail::not_finite(b);

  const Colinearity col = colinear(ep.u2, ep.u1, cfg.colinearity_tol);
  const bool colin = col.holds && col.alpha != cplx(0.0, 0.0);
  b.alpha = col.alpha;

  cmat X(P.n(), 2), Y(P.n(), 2);
  X << ep.u2, ep.u1;
  Y << c.ytilde, (rb ? c.w1 : cvec(-c.w1));
  const cmat Xp = pinv(X, cfg);
  const cmat YXp = Y * Xp;
  const double ys = std::max(fro(Y), c.scale * std::numeric_limits<double>::epsilon());
  const bool range_ok = fro(YXp * X - Y) <= cfg.residual_tol * ys;
  const cmat XY = X.adjoint() * Y;
  const double sign = rb ? 1.0 : -1.0;
  const bool sym_ok = fro(XY - sign * XY.adjoint()) <= cfg.residual_tol * fro(X) * ys;
  b.conditions.push_back({"YX^+X = Y", range_ok});
  b.conditions.push_back({rb ? "Y*X = X*Y" : "Y*X = -X*Y", sym_ok});
  b.conditions.push_back({"u2 = alpha u1", colin});
  if (!range_ok) throw HypothesisViolated("YX^+X = Y");
  if (!sym_ok) throw HypothesisViolated(rb ? "Y*X = X*Y" : "Y*X = -X*Y");

  b.H1 = rb ? cmat(YXp + YXp.adjoint() - X * Xp * YXp) : cmat(YXp - YXp.adjoint() - X * Xp * YXp);
  b.H2 = detail::b_part(P, ep, blocks);
  double h1 = b.H1.squaredNorm();
  if (code == "EB") h1 /= c.lam2;
  if (code == "JEB") h1 /= 1.0 + c.lam2;
  b.finite = true;
  b.exact = true;
  b.eta_lower = b.eta_upper = std::sqrt(h1 + b.H2.squaredNorm());
  return b;
}

/// Semidefinite-structure-preserving eigenpair backward error (ΔR ⪰ 0).
inline BackwardErrorBounds eta_sd(const PHPencil& P, const EigenPair& ep, BlockSelection blocks,
                                  const ToleranceConfig& cfg = {}) {
  const std::string code = blocks.str();
  if (code == "JB" || code == "EB" || code == "JEB") {
    BackwardErrorBounds b = eta_s(P, ep, blocks, cfg);
    b.variant = Variant::Sd;
    return b;
  }
  if (code == "JE") detail::prior_work(Variant::Sd, blocks);

  const auto c = detail::context(P, ep, cfg);
  BackwardErrorBounds b;
  b.variant = Variant::Sd;
  b.blocks = blocks;
  b.ytilde = c.ytilde;
  b.w1 = c.w1;
  const double u1n = ep.u1.norm();
  const bool with_b = blocks.has(BlockSelection::B);

  b.conditions.push_back({"u3 = 0", detail::small_vec(ep.u3, ep.u().norm(), cfg)});
  if (code == "RB") {
    const cmat K = P.J + c.lambda * P.E;
    b.conditions.push_back({"u1*(J+lambda E)u1 = 0", std::abs(inner(ep.u1, K * ep.u1)) <=
                                                         cfg.residual_tol * fro(K) * u1n * u1n});
    b.conditions.push_back(
        {"R u1 != 0", !detail::small_vec(P.R * ep.u1, fro(P.R) * u1n, cfg)});
  } else if (!with_b) {
    b.conditions.push_back(
        {"B*u1 = 0", detail::small_vec(P.B.adjoint() * ep.u1, fro(P.B) * u1n, cfg)});
  }
  if (!detail::all_held(b.conditions)) return detail::not_finite(b);

  const Colinearity col = colinear(ep.u2, ep.u1, cfg.colinearity_tol);
  const bool colin = col.holds && col.alpha != cplx(0.0, 0.0);
  b.alpha = col.alpha;
  b.H2 = detail::b_part(P, ep, blocks);
  const double h2 = b.H2.squaredNorm();

  if (code == "RB") {
    cmat X(P.n(), 2), Y(P.n(), 2);
    X << ep.u2, ep.u1;
    Y << c.ytilde, c.w1;
    const double ys = std::max(fro(Y), c.scale * std::numeric_limits<double>::epsilon());
    const bool range_ok = fro(Y * pinv(X, cfg) * X - Y) <= cfg.residual_tol * ys;
    const cmat XY = X.adjoint() * Y;
    const bool herm = fro(XY - XY.adjoint()) <= cfg.residual_tol * fro(X) * ys;
    const bool nsd = herm && max_eig_hermitian(XY) <= psd_threshold(XY, cfg);
    b.conditions.push_back({"YX^+X = Y", range_ok});
    b.conditions.push_back({"X*Y negative semidefinite", nsd});
    b.conditions.push_back({"u2 = alpha u1", colin});
    if (!range_ok) throw HypothesisViolated("YX^+X = Y");
    if (!nsd) throw HypothesisViolated("X*Y negative semidefinite");
    // With u2 ∥ u1, X has rank one and Y*X is singular; the pseudoinverse
    // keeps the formula on range(X).
    b.H1 = Y * pinv(Y.adjoint() * X, cfg) * Y.adjoint();
    b.finite = true;
    b.exact = true;
    b.eta_lower = b.eta_upper = std::sqrt(b.H1.squaredNorm() + h2);
    return b;
  }

  if (!(code == "JR" || code == "RE" || code == "JRE" || code == "JRB" || code == "REB" ||
        code == "JREB"))
    detail::prior_work(Variant::Sd, blocks);

  const double u2n = ep.u2.norm();
  const bool ru2 = !detail::small_vec(P.R * ep.u2, fro(P.R) * u2n, cfg);
  b.conditions.push_back({"u2 = alpha u1", colin});
  b.conditions.push_back({"R u2 != 0", ru2});
  if (!colin) throw HypothesisViolated("u2 = alpha u1");
  if (!ru2) throw HypothesisViolated("R u2 != 0");

  const Type1Solution t = dsdm_type1_vec(ep.u2, c.ytilde, ep.u1, c.w1, cfg,
                                         Orientation::AntiDissipative);
  if (!t.feasible) throw StructuralError("pencil: R is not positive semidefinite (" + t.reason + ")");
  b.H1 = t.minimizer;
  const HermSkew hs = herm_skew_parts(b.H1);
  const double hh = hs.H.squaredNorm();
  const double hsk = hs.S.squaredNorm();
  const double h1 = b.H1.squaredNorm();
  const double l2 = c.lam2;
  double lo2 = 0.0, up2 = 0.0;
  if (code == "JR") {
    lo2 = up2 = h1;
  } else if (code == "JRB") {
    lo2 = up2 = h1 + h2;
  } else if (code == "RE") {
    lo2 = l2 >= 1.0 ? h1 / l2 : h1;
    up2 = hh + hsk / l2;
  } else if (code == "JRE") {
    lo2 = h1 / (1.0 + l2);
    up2 = hh + hsk / (1.0 + l2);
  } else if (code == "REB") {
    lo2 = (l2 <= 1.0 ? h1 : h1 / l2) + h2;
    up2 = hh + hsk / l2 + h2;
  } else {  // JREB
    lo2 = h1 / (1.0 + l2) + h2;
    up2 = h1 + h2;
  }
  b.finite = true;
  b.exact = code == "JR" || code == "JRB";
  b.eta_lower = std::sqrt(lo2);
  b.eta_upper = std::sqrt(up2);
  return b;
}

inline BackwardErrorBounds backward_error(const PHPencil& P, const EigenPair& ep,
                                          BlockSelection blocks, Variant variant,
                                          const ToleranceConfig& cfg = {}) {
  return variant == Variant::S ? eta_s(P, ep, blocks, cfg) : eta_sd(P, ep, blocks, cfg);
}

/// Splits [H1 H2] of a finite result into ΔJ, ΔR, ΔE, ΔB and checks that
/// (L − ΔL)(λ)u = 0 and that each block has its structure.
inline PerturbationBlocks reconstruct_perturbation(const PHPencil& P, const EigenPair& ep,
                                                   const BackwardErrorBounds& sol,
                                                   const ToleranceConfig& cfg = {}) {
  if (!sol.finite) throw std::invalid_argument("reconstruct_perturbation: infinite backward error");
  const Index n = P.n(), m = P.m();
  if (sol.H1.rows() != n || sol.H1.cols() != n || sol.H2.rows() != n || sol.H2.cols() != m)
    throw DimensionError("reconstruct_perturbation: solution shapes do not match the pencil");
  const cplx l = detail::checked_lambda(ep.lambda, cfg);
  const double l2 = std::norm(l);
  const BlockSelection& b = sol.blocks;
  const bool hj = b.has(BlockSelection::J), hr = b.has(BlockSelection::R),
             he = b.has(BlockSelection::E);

  PerturbationBlocks d{cmat::Zero(n, n), cmat::Zero(n, n), cmat::Zero(n, n), cmat::Zero(n, m)};
  const HermSkew hs = herm_skew_parts(sol.H1);
  if (hr) d.dR = -hs.H;
  // Skew part goes to ΔJ + λΔE; the least-norm split weighs the two blocks by 1 and |λ|.
  if (hj && he) {
    d.dJ = hs.S / (1.0 + l2);
    d.dE = std::conj(l) * hs.S / (1.0 + l2);
  } else if (hj) {
    d.dJ = hs.S;
  } else if (he) {
    d.dE = hs.S / l;
  }
  if (b.has(BlockSelection::B)) d.dB = sol.H2;
  d.dJ = (d.dJ - d.dJ.adjoint()).eval() / 2.0;
  d.dR = (d.dR + d.dR.adjoint()).eval() / 2.0;
  d.dE = (d.dE + d.dE.adjoint()).eval() / 2.0;

  const cvec u = ep.u();
  const cmat L = P.at(l);
  const cmat dL = d.dM() + l * d.dN();
  const double res = ((L - dL) * u).norm();
  const double scale = (fro(L) + fro(dL)) * u.norm();
  if (res > cfg.residual_tol * scale)
    throw VerificationFailure("reconstruct_perturbation: (L - dL)(lambda)u residual " +
                              std::to_string(res));
  if (sol.variant == Variant::Sd && hr && min_eig_hermitian(d.dR) < -psd_threshold(d.dR, cfg))
    throw VerificationFailure("reconstruct_perturbation: dR not positive semidefinite");
  if (!hr && hs.H.norm() > cfg.residual_tol * std::max(fro(sol.H1), 1.0))
    throw VerificationFailure("reconstruct_perturbation: H1 has a Hermitian part but R is fixed");
  if (!hj && !he && hs.S.norm() > cfg.residual_tol * std::max(fro(sol.H1), 1.0))
    throw VerificationFailure("reconstruct_perturbation: H1 has a skew part but J and E are fixed");
  return d;
}

// ---------------------------------------------------------------- generators

/// Random port-Hamiltonian pencil. rank_R < 0 gives a full-rank R = GG*, otherwise
/// G has rank_R columns.
inline PHPencil gen_pencil(Index n, Index m, std::uint64_t seed, Index rank_R = -1) {
  if (n < 1 || m < 1) throw DimensionError("gen_pencil: n and m must be at least 1");
  if (rank_R > n) throw DimensionError("gen_pencil: rank of R cannot exceed n");
  Rng rng(seed);
  PHPencil P;
  const cmat A = rng.cmatrix(n, n);
  P.J = A - A.adjoint();
  const cmat C = rng.cmatrix(n, n);
  P.E = C + C.adjoint();
  const cmat G = rng.cmatrix(n, rank_R < 0 ? n : rank_R);
  P.R = G * G.adjoint();
  P.R = (P.R + P.R.adjoint()).eval() / 2.0;
  P.B = rng.cmatrix(n, m);
  const cmat F = rng.cmatrix(m, m);
  P.S = F * F.adjoint() + cmat::Identity(m, m);
  P.S = (P.S + P.S.adjoint()).eval() / 2.0;
  P.validate();
  return P;
}

namespace detail {

/// Orthonormal basis of ker(A) from a full SVD, with a relative cut.
inline cmat kernel_basis(const cmat& A, double rel_tol) {
  const Index n = A.cols();
  if (A.rows() == 0) return cmat::Identity(n, n);
  Eigen::JacobiSVD<cmat> svd(A, Eigen::ComputeFullV);
  const rvec& s = svd.singularValues();
  const double cut = rel_tol * std::max(s.size() ? s(0) : 0.0, 1e-300);
  Index r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  return svd.matrixV().rightCols(n - r);
}

}  // namespace detail

/// Random eigenpair satisfying the finiteness conditions and hypotheses of
/// the routed formula for `blocks`. Throws Error when the pencil cannot
/// supply one (for example a full-rank R for JB).
inline EigenPair gen_eigpair(const PHPencil& P, std::uint64_t seed, BlockSelection blocks,
                             Variant variant = Variant::Sd, const ToleranceConfig& cfg = {}) {
  P.validate(cfg);
  const Index n = P.n(), m = P.m();
  const std::string code = blocks.str();
  Rng rng(seed);
  constexpr int kTries = 64;
  const double ker_tol = 1e-10;

  for (int attempt = 0; attempt < kTries; ++attempt) {
    EigenPair ep;
    ep.u3 = cvec::Zero(m);
    const double mod = rng.uniform(0.2, 5.0);
    ep.lambda = cplx(0.0, rng.coin() ? mod : -mod);
    cvec u1;

    if (code == "RB") {
      // Needs (J + λE)u1 = 0 with λ ∈ iℝ: an imaginary eigenvalue of the pencil J + λE.
      Eigen::PartialPivLU<cmat> lu(P.E);
      if (std::abs(lu.determinant()) <= 1e-12 * std::pow(std::max(fro(P.E), 1e-300), double(n)))
        throw Error("gen_eigpair: E is singular; cannot place an imaginary eigenvalue for RB");
      Eigen::ComplexEigenSolver<cmat> es(-lu.solve(P.J), false);
      std::vector<double> cands;
      for (Index i = 0; i < n; ++i) {
        const cplx ev = es.eigenvalues()(i);
        if (std::abs(ev) > 1e-8 && std::abs(ev.real()) <= 1e-8 * std::abs(ev))
          cands.push_back(ev.imag());
      }
      if (cands.empty())
        throw Error("gen_eigpair: J + lambda E has no nonzero imaginary eigenvalue (try odd n)");
      const std::size_t k = std::uniform_int_distribution<std::size_t>(0, cands.size() - 1)(rng.engine());
      ep.lambda = cplx(0.0, cands[k]);
      const cmat Kb = detail::kernel_basis(P.J + ep.lambda * P.E, 1e-8);
      if (Kb.cols() == 0) continue;
      u1 = Kb * rng.cvector(Kb.cols());
    } else if (code == "JB" || code == "EB" || code == "JEB") {
      const cmat Kb = detail::kernel_basis(P.R, ker_tol);
      if (Kb.cols() == 0)
        throw Error("gen_eigpair: " + code + " needs R u1 = 0 but R has full rank");
      u1 = Kb * rng.cvector(Kb.cols());
    } else if (code == "JR" || code == "RE" || code == "JRE") {
      const cmat Kb = detail::kernel_basis(P.B.adjoint(), ker_tol);
      if (Kb.cols() == 0)
        throw Error("gen_eigpair: " + code + " needs B*u1 = 0 but B has full row rank");
      u1 = Kb * rng.cvector(Kb.cols());
    } else {
      u1 = rng.cvector(n);
    }

    cplx alpha = rng.cnormal();
    if (std::abs(alpha) < 0.1) continue;
    ep.u1 = u1;
    ep.u2 = alpha * u1;
    if (ep.u1.norm() == 0.0) continue;
    const bool type1_route = !(code == "RB" || code == "JB" || code == "EB" || code == "JEB");
    if (type1_route && (P.R * ep.u2).norm() <= 1e-6 * fro(P.R) * ep.u2.norm()) continue;
    if (code == "RB" && variant == Variant::Sd &&
        (P.R * ep.u1).norm() <= 1e-6 * fro(P.R) * ep.u1.norm())
      continue;
    return ep;
  }
  throw Error("gen_eigpair: no admissible eigenpair after " + std::to_string(kTries) + " draws");
}

struct ExperimentRow {
  cplx lambda;
  bool finite = false;
  double eta_lower = std::numeric_limits<double>::infinity();
  double eta_upper = std::numeric_limits<double>::infinity();
  std::string conditions;
  std::string error;  ///< empty unless the row could not be evaluated
};

/// One row per λ with the same eigenvector u, drawn once for `blocks`.
inline std::vector<ExperimentRow> experiment_table(const PHPencil& P,
                                                   const std::vector<cplx>& lambdas,
                                                   std::uint64_t ep_seed, BlockSelection blocks,
                                                   Variant variant = Variant::Sd,
                                                   const ToleranceConfig& cfg = {}) {
  std::vector<ExperimentRow> rows;
  if (lambdas.empty()) return rows;
  const EigenPair base = gen_eigpair(P, ep_seed, blocks, variant, cfg);
  rows.reserve(lambdas.size());
  for (const cplx l : lambdas) {
    ExperimentRow row;
    row.lambda = l;
    try {
      EigenPair ep = base;
      ep.lambda = l;
      const BackwardErrorBounds b = backward_error(P, ep, blocks, variant, cfg);
      row.finite = b.finite;
      row.eta_lower = b.eta_lower;
      row.eta_upper = b.eta_upper;
      row.conditions = b.conditions_report();
    } catch (const std::exception& e) {
      row.error = e.what();
      row.conditions = std::string("error: ") + e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dsmkit
