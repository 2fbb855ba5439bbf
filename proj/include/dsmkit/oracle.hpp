#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dsm.hpp"
#include "linalg.hpp"
#include "pencil.hpp"
#include "random.hpp"
#include "structured_maps.hpp"

namespace dsmkit {

/// Iteration budget for the cone-constrained oracle.
struct OracleBudget {
  int max_iterations = 20000;
  double step_tolerance = 1e-14;
  int restarts = 6;  ///< random starts tried when searching for a strictly feasible anchor
  std::uint64_t seed = 0;

  void validate() const {
    if (max_iterations <= 0 || !(step_tolerance > 0) || restarts <= 0)
      throw std::invalid_argument("OracleBudget: fields must be positive");
  }
};

namespace oracle {

enum class BlockKind { Free, Hermitian, SkewHermitian, Symmetric, SkewSymmetric };

/// Semidefinite side constraint on one block.
enum class Cone { None, Psd, Nsd, Dissipative, AntiDissipative };

struct BlockSpec {
  Index rows = 0, cols = 0;
  BlockKind kind = BlockKind::Free;
  Cone cone = Cone::None;
};

/// A tuple of complex matrices with linear structure, coordinatized by an
/// orthonormal basis for the real inner product Re tr(A*B). The coordinate
/// map is an isometry, so ‖θ‖₂ equals the Frobenius norm of the tuple.
class RealSpace {
 public:
  explicit RealSpace(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
    Index off = 0;
    for (const auto& b : blocks_) {
      if ((b.kind != BlockKind::Free || b.cone != Cone::None) && b.rows != b.cols)
        throw DimensionError("structured block must be square");
      offsets_.push_back(off);
      basis_.push_back(make_basis(b));
      off += Index(basis_.back().size());
    }
    dim_ = off;
  }

  Index dim() const { return dim_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }

  cmat unpack_block(const rvec& th, std::size_t k) const {
    const auto& b = blocks_[k];
    cmat A = cmat::Zero(b.rows, b.cols);
    const auto& basis = basis_[k];
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double t = th(offsets_[k] + Index(i));
      if (t == 0.0) continue;
      for (const auto& e : basis[i]) A(e.r, e.c) += t * e.v;
    }
    return A;
  }

  std::vector<cmat> unpack(const rvec& th) const {
    std::vector<cmat> out;
    for (std::size_t k = 0; k < blocks_.size(); ++k) out.push_back(unpack_block(th, k));
    return out;
  }

  /// Coordinates of the orthogonal projection of A onto block k's subspace.
  void pack_block(const cmat& A, std::size_t k, rvec& th) const {
    const auto& basis = basis_[k];
    for (std::size_t i = 0; i < basis.size(); ++i) {
      double s = 0.0;
      for (const auto& e : basis[i]) s += (std::conj(e.v) * A(e.r, e.c)).real();
      th(offsets_[k] + Index(i)) = s;
    }
  }

  rvec pack(const std::vector<cmat>& As) const {
    rvec th = rvec::Zero(dim_);
    for (std::size_t k = 0; k < blocks_.size(); ++k) pack_block(As[k], k, th);
    return th;
  }

  /// Projection onto the product of the blocks' cones (identity on blocks without one).
  rvec project_cone(const rvec& th) const {
    rvec out = th;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      if (blocks_[k].cone == Cone::None) continue;
      pack_block(cone_project(unpack_block(th, k), blocks_[k].cone), k, out);
    }
    return out;
  }

  /// Smallest eigenvalue margin over all cone blocks; ≥ 0 means inside.
  double cone_margin(const rvec& th) const {
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      if (blocks_[k].cone == Cone::None) continue;
      margin = std::min(margin, cone_margin(unpack_block(th, k), blocks_[k].cone));
    }
    return margin;
  }

  rvec shift_cone(const rvec& th, double delta) const {
    rvec out = th;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      if (blocks_[k].cone == Cone::None) continue;
      const cmat A = unpack_block(th, k);
      const double s = sign_of(blocks_[k].cone);
      const cmat I = cmat::Identity(A.rows(), A.cols());
      // project onto {A : s·(A)_H ⪰ δ I}
      const cmat P = cone_project(A - s * delta * I, blocks_[k].cone) + s * delta * I;
      pack_block(P, k, out);
    }
    return out;
  }

  bool has_cone() const {
    return std::any_of(blocks_.begin(), blocks_.end(),
                       [](const BlockSpec& b) { return b.cone != Cone::None; });
  }

 private:
  struct Entry {
    Index r, c;
    cplx v;
  };
  using Element = std::vector<Entry>;

  static double sign_of(Cone c) { return (c == Cone::Nsd || c == Cone::AntiDissipative) ? -1.0 : 1.0; }

  static cmat cone_project(const cmat& A, Cone c) {
    const double s = sign_of(c);
    const cmat H = (A + A.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<cmat> es(s * H);
    const rvec ev = es.eigenvalues().cwiseMax(0.0);
    const cmat Hp = s * (es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint());
    if (c == Cone::Psd || c == Cone::Nsd) return Hp;
    return Hp + (A - A.adjoint()) / 2.0;
  }

  static double cone_margin(const cmat& A, Cone c) {
    const double s = sign_of(c);
    return min_eig_hermitian(s * A);
  }

  static std::vector<Element> make_basis(const BlockSpec& b) {
    std::vector<Element> out;
    const cplx one(1.0, 0.0), im(0.0, 1.0);
    const double r2 = 1.0 / std::sqrt(2.0);
    const Index R = b.rows, C = b.cols;
    BlockKind kind = b.kind;
    if (b.cone == Cone::Psd || b.cone == Cone::Nsd) kind = BlockKind::Hermitian;
    switch (kind) {
      case BlockKind::Free:
        for (Index j = 0; j < C; ++j)
          for (Index i = 0; i < R; ++i) {
            out.push_back({{i, j, one}});
            out.push_back({{i, j, im}});
          }
        break;
      case BlockKind::Hermitian:
      case BlockKind::SkewHermitian: {
        const cplx u = kind == BlockKind::Hermitian ? one : im;
        for (Index i = 0; i < R; ++i) out.push_back({{i, i, u}});
        for (Index j = 0; j < C; ++j)
          for (Index i = 0; i < j; ++i) {
            out.push_back({{i, j, u * r2}, {j, i, u * r2}});
            out.push_back({{i, j, u * im * r2}, {j, i, -u * im * r2}});
          }
        break;
      }
      case BlockKind::Symmetric:
        for (Index i = 0; i < R; ++i) {
          out.push_back({{i, i, one}});
          out.push_back({{i, i, im}});
        }
        for (Index j = 0; j < C; ++j)
          for (Index i = 0; i < j; ++i) {
            out.push_back({{i, j, r2 * one}, {j, i, r2 * one}});
            out.push_back({{i, j, r2 * im}, {j, i, r2 * im}});
          }
        break;
      case BlockKind::SkewSymmetric:
        for (Index j = 0; j < C; ++j)
          for (Index i = 0; i < j; ++i) {
            out.push_back({{i, j, r2 * one}, {j, i, -r2 * one}});
            out.push_back({{i, j, r2 * im}, {j, i, -r2 * im}});
          }
        break;
    }
    return out;
  }

  std::vector<BlockSpec> blocks_;
  std::vector<Index> offsets_;
  std::vector<std::vector<Element>> basis_;
  Index dim_ = 0;
};

using LinearOp = std::function<cvec(const std::vector<cmat>&)>;

/// Real form of a complex-linear constraint op(Δ) = rhs over a RealSpace.
struct AffineSet {
  rmat A;
  rvec b;
  rmat Ap;  ///< pseudoinverse of A
  double scale = 1.0;

  AffineSet(const RealSpace& space, const LinearOp& op, const cvec& rhs,
            const ToleranceConfig& cfg) {
    const Index d = space.dim();
    const Index q = rhs.size();
    A.resize(2 * q, d);
    rvec e = rvec::Zero(d);
    for (Index k = 0; k < d; ++k) {
      e(k) = 1.0;
      const cvec col = op(space.unpack(e));
      e(k) = 0.0;
      if (col.size() != q) throw DimensionError("oracle: operator output size mismatch");
      A.col(k) << col.real(), col.imag();
    }
    b.resize(2 * q);
    b << rhs.real(), rhs.imag();
    Eigen::JacobiSVD<rmat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const rvec& s = svd.singularValues();
    const double cut = cfg.rank_tol * (s.size() ? s(0) : 0.0) * 100.0;
    rvec inv = rvec::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > cut && s(i) > 0.0) inv(i) = 1.0 / s(i);
    Ap = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    scale = std::max(A.norm(), 1.0) * std::max(b.norm(), 1.0);
  }

  rvec project(const rvec& th) const { return th - Ap * (A * th - b); }
  double residual(const rvec& th) const { return (A * th - b).norm(); }
};

}  // namespace oracle

struct OracleResult {
  std::vector<cmat> blocks;
  cmat Delta;  ///< blocks concatenated left to right when row counts agree
  double norm = 0.0;
  bool converged = true;
  bool certified_feasible = true;  ///< the point satisfies every constraint to working precision
  int iterations = 0;
  double affine_residual = 0.0;
  double cone_margin = 0.0;
};

namespace oracle {

inline OracleResult finish(const RealSpace& space, const AffineSet& aff, const rvec& th) {
  OracleResult r;
  r.blocks = space.unpack(th);
  r.norm = th.norm();
  r.affine_residual = aff.residual(th);
  r.cone_margin = space.has_cone() ? space.cone_margin(th) : 0.0;
  bool same_rows = true;
  Index cols = 0;
  for (const auto& B : r.blocks) {
    same_rows = same_rows && B.rows() == r.blocks.front().rows();
    cols += B.cols();
  }
  if (same_rows && !r.blocks.empty()) {
    r.Delta.resize(r.blocks.front().rows(), cols);
    Index c = 0;
    for (const auto& B : r.blocks) {
      r.Delta.middleCols(c, B.cols()) = B;
      c += B.cols();
    }
  }
  return r;
}

inline void require_consistent(const AffineSet& aff, const rvec& th, const ToleranceConfig& cfg) {
  if (aff.residual(th) > 1e3 * cfg.residual_tol * aff.scale)
    throw Error("oracle: inconsistent constraints (residual " + std::to_string(aff.residual(th)) +
                ")");
}

/// Dykstra iterations for the projection of `start` onto the affine set ∩ cone.
inline rvec dykstra(const RealSpace& space, const AffineSet& aff, rvec x,
                    const OracleBudget& budget, int& iters, bool& converged,
                    double shift = 0.0) {
  rvec p = rvec::Zero(x.size()), q = rvec::Zero(x.size());
  converged = false;
  for (iters = 1; iters <= budget.max_iterations; ++iters) {
    const rvec y = aff.project(x + p);
    p = x + p - y;
    const rvec xn = shift > 0.0 ? space.shift_cone(y + q, shift) : space.project_cone(y + q);
    q = y + q - xn;
    const double step = (xn - x).norm();
    x = xn;
    if (step <= budget.step_tolerance * std::max(1.0, x.norm()) && iters > 2) {
      converged = true;
      break;
    }
  }
  return x;
}

/// Least-norm point of {op(Δ) = rhs} ∩ cones. Exact (pseudoinverse) when no
/// block carries a cone; otherwise Dykstra from the origin followed by a
/// bisection towards a strictly feasible anchor, so the returned point is
/// feasible and its norm is an upper bound on the minimum.
inline OracleResult minimize(const RealSpace& space, const LinearOp& op, const cvec& rhs,
                             const OracleBudget& budget, const ToleranceConfig& cfg) {
  budget.validate();
  const AffineSet aff(space, op, rhs, cfg);
  const rvec th0 = aff.Ap * aff.b;
  require_consistent(aff, th0, cfg);
  if (!space.has_cone() || space.cone_margin(th0) >= 0.0) return finish(space, aff, th0);

  int iters = 0;
  bool conv = false;
  rvec x = dykstra(space, aff, rvec::Zero(space.dim()), budget, iters, conv);
  rvec z = aff.project(x);

  OracleResult r;
  if (space.cone_margin(z) < 0.0) {
    // Find a strictly feasible anchor on the affine set.
    Rng rng(budget.seed);
    std::optional<rvec> anchor;
    const double base = std::max(x.norm(), 1e-8);
    OracleBudget sub = budget;
    sub.max_iterations = std::min(budget.max_iterations, 4000);
    sub.step_tolerance = 1e-12;
    for (int k = 0; k < budget.restarts && !anchor; ++k) {
      for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
        rvec start = x;
        if (k > 0)
          for (Index i = 0; i < start.size(); ++i) start(i) += base * rng.normal();
        int it2 = 0;
        bool c2 = false;
        const rvec a = aff.project(dykstra(space, aff, start, sub, it2, c2, delta * base));
        if (space.cone_margin(a) > 0.0 &&
            aff.residual(a) <= 1e3 * cfg.residual_tol * aff.scale) {
          anchor = a;
          break;
        }
      }
    }
    if (anchor) {
      double lo = 0.0, hi = 1.0;
      for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (space.cone_margin((1.0 - mid) * z + mid * *anchor) >= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      z = (1.0 - hi) * z + hi * *anchor;
      r = finish(space, aff, z);
    } else {
      r = finish(space, aff, z);
      r.certified_feasible = false;
    }
  } else {
    r = finish(space, aff, z);
  }
  r.iterations = iters;
  r.converged = conv;
  return r;
}

inline BlockKind kind_of(StructureFamily f) {
  switch (f) {
    case StructureFamily::Hermitian: return BlockKind::Hermitian;
    case StructureFamily::SkewHermitian: return BlockKind::SkewHermitian;
    case StructureFamily::Symmetric: return BlockKind::Symmetric;
    case StructureFamily::SkewSymmetric: return BlockKind::SkewSymmetric;
    case StructureFamily::PSD:
    case StructureFamily::NSD: return BlockKind::Hermitian;
    default: return BlockKind::Free;
  }
}

inline Cone cone_of(StructureFamily f) {
  switch (f) {
    case StructureFamily::PSD: return Cone::Psd;
    case StructureFamily::NSD: return Cone::Nsd;
    case StructureFamily::Dissipative: return Cone::Dissipative;
    case StructureFamily::AntiDissipative: return Cone::AntiDissipative;
    default: return Cone::None;
  }
}

}  // namespace oracle

/// One interpolation condition on Δ: Δ v = rhs, or Δ* v = rhs when adjoint is set.
struct MapConstraint {
  cvec v;
  cvec rhs;
  bool adjoint = false;
};

/// Least-norm Δ (rows x cols) satisfying every constraint, with the leading
/// square block (size `lead`, 0 for none) restricted to a linear family.
/// The result is the exact global minimizer.
inline OracleResult oracle_least_norm(Index rows, Index cols,
                                      const std::vector<MapConstraint>& constraints,
                                      StructureFamily lead_family = StructureFamily::Unstructured,
                                      Index lead = 0, const ToleranceConfig& cfg = {}) {
  if (!is_linear_family(lead_family))
    throw std::invalid_argument("oracle_least_norm: family must be linear");
  if (lead > rows || lead > cols) throw DimensionError("oracle_least_norm: leading block too large");
  if (lead_family != StructureFamily::Unstructured && lead == 0) lead = std::min(rows, cols);
  std::vector<oracle::BlockSpec> specs;
  if (lead > 0) specs.push_back({rows, lead, oracle::kind_of(lead_family)});
  if (cols > lead) specs.push_back({rows, cols - lead, oracle::BlockKind::Free});
  if (lead > 0 && rows != lead) throw DimensionError("oracle_least_norm: leading block must span all rows");
  Index total = 0;
  for (const auto& c : constraints) {
    if (c.v.size() != (c.adjoint ? rows : cols) || c.rhs.size() != (c.adjoint ? cols : rows))
      throw DimensionError("oracle_least_norm: constraint dimensions");
    total += c.rhs.size();
  }
  const oracle::RealSpace space(specs);
  const auto assemble = [rows, cols](const std::vector<cmat>& bl) {
    cmat D(rows, cols);
    Index c = 0;
    for (const auto& B : bl) {
      D.middleCols(c, B.cols()) = B;
      c += B.cols();
    }
    return D;
  };
  const oracle::LinearOp op = [&](const std::vector<cmat>& bl) {
    const cmat D = assemble(bl);
    cvec out(total);
    Index o = 0;
    for (const auto& c : constraints) {
      const cvec r = c.adjoint ? cvec(D.adjoint() * c.v) : cvec(D * c.v);
      out.segment(o, r.size()) = r;
      o += r.size();
    }
    return out;
  };
  cvec rhs(total);
  Index o = 0;
  for (const auto& c : constraints) {
    rhs.segment(o, c.rhs.size()) = c.rhs;
    o += c.rhs.size();
  }
  OracleResult r = oracle::minimize(space, op, rhs, OracleBudget{}, cfg);
  r.Delta = assemble(r.blocks);
  return r;
}

namespace detail {

inline OracleResult oracle_dsm_like(Index n, Index m, StructureFamily family,
                                    const std::vector<MapConstraint>& cons,
                                    const OracleBudget& budget, const ToleranceConfig& cfg) {
  std::vector<oracle::BlockSpec> specs;
  specs.push_back({n, n, oracle::kind_of(family), oracle::cone_of(family)});
  if (m > 0) specs.push_back({n, m, oracle::BlockKind::Free});
  const oracle::RealSpace space(specs);
  Index total = 0;
  for (const auto& c : cons) total += c.rhs.size();
  const auto assemble = [n, m](const std::vector<cmat>& bl) {
    cmat D(n, n + m);
    D.leftCols(n) = bl[0];
    if (m > 0) D.rightCols(m) = bl[1];
    return D;
  };
  const oracle::LinearOp op = [&](const std::vector<cmat>& bl) {
    const cmat D = assemble(bl);
    cvec out(total);
    Index o = 0;
    for (const auto& c : cons) {
      const cvec r = c.adjoint ? cvec(D.adjoint() * c.v) : cvec(D * c.v);
      out.segment(o, r.size()) = r;
      o += r.size();
    }
    return out;
  };
  cvec rhs(total);
  Index o = 0;
  for (const auto& c : cons) {
    rhs.segment(o, c.rhs.size()) = c.rhs;
    o += c.rhs.size();
  }
  OracleResult r = oracle::minimize(space, op, rhs, budget, cfg);
  r.Delta = assemble(r.blocks);
  return r;
}

}  // namespace detail

/// Minimal-norm Δ = [Δ1 Δ2] with Δx = y, Δ*z = w and Δ1 in `family`
/// (PSD, NSD, dissipative or anti-dissipative for the cone families).
inline OracleResult oracle_min_structured(const DsmProblem& p, StructureFamily family,
                                          const OracleBudget& budget = {},
                                          const ToleranceConfig& cfg = {}) {
  p.validate();
  return detail::oracle_dsm_like(p.n(), p.m(), family,
                                 {{p.x(), p.y, false}, {p.z, p.w(), true}}, budget, cfg);
}

/// Minimal-norm square Δ with ΔX = Y, Δ*Z = W and Δ ± Δ* ⪰ 0.
inline OracleResult oracle_min_structured(const Type1Problem& q,
                                          Orientation orient = Orientation::Dissipative,
                                          const OracleBudget& budget = {},
                                          const ToleranceConfig& cfg = {}) {
  const Index n = q.X.rows();
  std::vector<MapConstraint> cons;
  for (Index j = 0; j < q.X.cols(); ++j) {
    cons.push_back({q.X.col(j), q.Y.col(j), false});
    cons.push_back({q.Z.col(j), q.W.col(j), true});
  }
  const StructureFamily f = orient == Orientation::Dissipative ? StructureFamily::Dissipative
                                                               : StructureFamily::AntiDissipative;
  return detail::oracle_dsm_like(n, 0, f, cons, budget, cfg);
}

/// Minimal-norm square Δ in `family` with Δx = y (and Δ*z = w when given).
inline OracleResult oracle_min_map(StructureFamily family, const cvec& x, const cvec& y,
                                   const std::optional<std::pair<cvec, cvec>>& zw = std::nullopt,
                                   const OracleBudget& budget = {},
                                   const ToleranceConfig& cfg = {}) {
  std::vector<MapConstraint> cons{{x, y, false}};
  if (zw) cons.push_back({zw->first, zw->second, true});
  return detail::oracle_dsm_like(x.size(), 0, family, cons, budget, cfg);
}

/// Smallest ‖[ΔJ ΔR ΔE ΔB]‖_F over structured perturbations of the selected
/// blocks with (L − ΔL)(λ)u = 0; ΔR ⪰ 0 for the Sd variant.
inline OracleResult oracle_eta(const PHPencil& P, const EigenPair& ep, BlockSelection blocks,
                               Variant variant, const OracleBudget& budget = {},
                               const ToleranceConfig& cfg = {}) {
  const Index n = P.n(), m = P.m();
  ep.validate(P, cfg);
  const cplx l(0.0, ep.lambda.imag());
  using oracle::BlockKind;
  using oracle::Cone;
  std::vector<oracle::BlockSpec> specs;
  std::vector<char> which;
  if (blocks.has(BlockSelection::J)) { specs.push_back({n, n, BlockKind::SkewHermitian}); which.push_back('J'); }
  if (blocks.has(BlockSelection::R)) {
    specs.push_back({n, n, BlockKind::Hermitian, variant == Variant::Sd ? Cone::Psd : Cone::None});
    which.push_back('R');
  }
  if (blocks.has(BlockSelection::E)) { specs.push_back({n, n, BlockKind::Hermitian}); which.push_back('E'); }
  if (blocks.has(BlockSelection::B)) { specs.push_back({n, m, BlockKind::Free}); which.push_back('B'); }
  if (specs.empty()) throw std::invalid_argument("oracle_eta: no blocks selected");
  const oracle::RealSpace space(specs);
  const cvec u = ep.u();
  const auto to_blocks = [&](const std::vector<cmat>& bl) {
    PerturbationBlocks d{cmat::Zero(n, n), cmat::Zero(n, n), cmat::Zero(n, n), cmat::Zero(n, m)};
    for (std::size_t k = 0; k < which.size(); ++k) {
      switch (which[k]) {
        case 'J': d.dJ = bl[k]; break;
        case 'R': d.dR = bl[k]; break;
        case 'E': d.dE = bl[k]; break;
        default: d.dB = bl[k]; break;
      }
    }
    return d;
  };
  const oracle::LinearOp op = [&](const std::vector<cmat>& bl) {
    const PerturbationBlocks d = to_blocks(bl);
    return cvec((d.dM() + l * d.dN()) * u);
  };
  const cvec rhs = P.at(l) * u;
  OracleResult r;
  try {
    r = oracle::minimize(space, op, rhs, budget, cfg);
  } catch (const Error& e) {
    throw Error(std::string("oracle_eta: no admissible perturbation (") + e.what() + ")");
  }
  const PerturbationBlocks d = to_blocks(r.blocks);
  r.blocks = {d.dJ, d.dR, d.dE, d.dB};
  r.Delta.resize(0, 0);
  return r;
}

// ---------------------------------------------------------------- audits

struct ResidualReport {
  double interp_x = 0.0;        ///< ‖Δx − y‖ / (‖Δ‖‖x‖ + ‖y‖)
  double interp_z = 0.0;        ///< ‖Δ*z − w‖ / (‖Δ‖‖z‖ + ‖w‖), 0 when absent
  double structure_defect = 0.0;
  double min_eig = std::numeric_limits<double>::quiet_NaN();  ///< cone families, sign-adjusted
  std::vector<Condition> checks;
  bool pass = false;
};

namespace detail {

inline double structure_defect(StructureFamily f, const cmat& A) {
  switch (f) {
    case StructureFamily::Hermitian:
    case StructureFamily::PSD:
    case StructureFamily::NSD: return adjoint_defect(A, 1.0);
    case StructureFamily::SkewHermitian: return adjoint_defect(A, -1.0);
    case StructureFamily::Symmetric: return transpose_defect(A, 1.0);
    case StructureFamily::SkewSymmetric: return transpose_defect(A, -1.0);
    default: return 0.0;
  }
}

inline double signed_min_eig(StructureFamily f, const cmat& A) {
  switch (f) {
    case StructureFamily::PSD:
    case StructureFamily::Dissipative: return min_eig_hermitian(A);
    case StructureFamily::NSD:
    case StructureFamily::AntiDissipative: return min_eig_hermitian(-A);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

inline ResidualReport audit(const cmat& D, const cmat& D1, StructureFamily family,
                            const std::vector<MapConstraint>& cons, const ToleranceConfig& cfg) {
  ResidualReport r;
  const double nd = fro(D);
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const auto& c = cons[i];
    if (c.v.size() != (c.adjoint ? D.rows() : D.cols()))
      throw DimensionError("verify_solution: shapes do not match");
    const cvec lhs = c.adjoint ? cvec(D.adjoint() * c.v) : cvec(D * c.v);
    const double denom = nd * c.v.norm() + c.rhs.norm();
    const double rel = denom == 0.0 ? 0.0 : (lhs - c.rhs).norm() / denom;
    (c.adjoint ? r.interp_z : r.interp_x) = std::max(c.adjoint ? r.interp_z : r.interp_x, rel);
  }
  r.structure_defect = structure_defect(family, D1);
  r.min_eig = signed_min_eig(family, D1);
  r.checks.push_back({"interpolation Dx = y", r.interp_x <= cfg.residual_tol});
  r.checks.push_back({"interpolation D*z = w", r.interp_z <= cfg.residual_tol});
  r.checks.push_back({std::string("structure ") + to_string(family),
                      r.structure_defect <= cfg.residual_tol});
  if (!std::isnan(r.min_eig))
    r.checks.push_back({"semidefiniteness", r.min_eig >= -cfg.psd_tol * std::max(fro(D1), 1.0)});
  r.pass = all_held(r.checks);
  return r;
}

}  // namespace detail

/// Residual audit of a DSM solution Δ = [Δ1 Δ2].
inline ResidualReport verify_solution(const cmat& D, const DsmProblem& p, StructureFamily family,
                                      const ToleranceConfig& cfg = {}) {
  if (D.rows() != p.n() || D.cols() != p.n() + p.m())
    throw DimensionError("verify_solution: shapes do not match");
  return detail::audit(D, D.leftCols(p.n()), family, {{p.x(), p.y, false}, {p.z, p.w(), true}}, cfg);
}

/// Residual audit of a square Δ with Δx = y (and Δ*z = w when given).
inline ResidualReport verify_solution(const cmat& D, StructureFamily family, const cvec& x,
                                      const cvec& y,
                                      const std::optional<std::pair<cvec, cvec>>& zw = std::nullopt,
                                      const ToleranceConfig& cfg = {}) {
  std::vector<MapConstraint> cons{{x, y, false}};
  if (zw) cons.push_back({zw->first, zw->second, true});
  return detail::audit(D, D, family, cons, cfg);
}

inline ResidualReport verify_solution(const cmat& D, const Type1Problem& q,
                                      Orientation orient = Orientation::Dissipative,
                                      const ToleranceConfig& cfg = {}) {
  std::vector<MapConstraint> cons;
  for (Index j = 0; j < q.X.cols(); ++j) {
    cons.push_back({q.X.col(j), q.Y.col(j), false});
    cons.push_back({q.Z.col(j), q.W.col(j), true});
  }
  return detail::audit(D, D,
                       orient == Orientation::Dissipative ? StructureFamily::Dissipative
                                                          : StructureFamily::AntiDissipative,
                       cons, cfg);
}

}  // namespace dsmkit
