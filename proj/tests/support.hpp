#pragma once

#include <cmath>
#include <complex>

#include "dsmkit.hpp"

namespace dsmtest {

using namespace dsmkit;

inline cmat random_member(StructureFamily f, Index n, Rng& rng) {
  const cmat A = rng.cmatrix(n, n);
  switch (f) {
    case StructureFamily::Hermitian: return A + A.adjoint();
    case StructureFamily::SkewHermitian: return A - A.adjoint();
    case StructureFamily::Symmetric: return A + A.transpose();
    case StructureFamily::SkewSymmetric: return A - A.transpose();
    case StructureFamily::PSD: return A * A.adjoint();
    case StructureFamily::NSD: return -A * A.adjoint();
    case StructureFamily::Dissipative: {
      const cmat G = rng.cmatrix(n, n);
      return G * G.adjoint() + (A - A.adjoint());
    }
    case StructureFamily::AntiDissipative: {
      const cmat G = rng.cmatrix(n, n);
      return -G * G.adjoint() + (A - A.adjoint());
    }
    default: return A;
  }
}

/// Feasible DSM data generated from a random Δ = [Δ1 Δ2] with Δ1 in `f`.
inline DsmProblem random_dsm(StructureFamily f, Index n, Index m, Rng& rng,
                             cmat* Delta = nullptr) {
  cmat D(n, n + m);
  D << random_member(f, n, rng), rng.cmatrix(n, m);
  const cvec x = rng.cvector(n + m);
  const cvec z = rng.cvector(n);
  if (Delta) *Delta = D;
  return DsmProblem::from_full(x, D * x, z, D.adjoint() * z);
}

/// As random_dsm with x1 forced parallel to z (or to conj(z) for the
/// transpose-based families).
inline DsmProblem aligned_dsm(StructureFamily f, Index n, Index m, Rng& rng) {
  cmat D(n, n + m);
  D << random_member(f, n, rng), rng.cmatrix(n, m);
  const cvec z = rng.cvector(n);
  const bool transpose = f == StructureFamily::Symmetric || f == StructureFamily::SkewSymmetric;
  cvec x(n + m);
  x << rng.cnormal() * (transpose ? cvec(z.conjugate()) : z), rng.cvector(m);
  return DsmProblem::from_full(x, D * x, z, D.adjoint() * z);
}

/// Makes x*w = y*z by moving w2 along x2.
inline void make_compatible(DsmProblem& p) {
  const cplx need = inner(p.y, p.z) - inner(p.x1, p.w1) - inner(p.x2, p.w2);
  p.w2 += p.x2 * (need / p.x2.squaredNorm());
}

/// Type-2 data with y = βz and z ⊥ x1; w1 is parallel to z when `w1_parallel`.
inline DsmProblem type2_aligned(Index n, Index m, Rng& rng, bool w1_parallel) {
  DsmProblem p;
  p.z = rng.cvector(n);
  const cmat Pz = null_projector(p.z);
  p.x1 = Pz * rng.cvector(n);
  p.x2 = rng.cvector(m);
  p.y = rng.cnormal() * p.z;
  if (w1_parallel) {
    p.w1 = cplx(std::abs(rng.normal()) + 0.1, rng.normal()) * p.z;
  } else {
    p.w1 = rng.cvector(n);
    const double re = inner(p.z, p.w1).real();
    if (re < 0) p.w1 = -p.w1;
  }
  p.w2 = rng.cvector(m);
  make_compatible(p);
  return p;
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace dsmtest
