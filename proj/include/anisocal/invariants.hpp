#pragma once

#include <vector>

#include "anisocal/set_kind.hpp"
#include "anisocal/structure.hpp"
#include "anisocal/tensors.hpp"

namespace anisocal::invariants {

// ---------------------------------------------------------------------------
// Realized structure tensors in the operator form used by the invariant
// evaluation: Mandel vectors/operators (2nd order), Mandel 6x6 (4th order),
// Mandel trilinear form (6th order). Templated so structure-parameter
// tangents flow through.
// ---------------------------------------------------------------------------

template <class T>
struct Realized {
  SetKind kind = SetKind::Iso;
  // G2 / first pair block
  TSym3<T> G1{}, G1sq{};
  // second pair block
  TSym3<T> G2{}, G2sq{};
  TSym3<T> pair_sym{};  // sym(G1.G2), for N12
  // G4
  TMat66<T> op4{};
  TVec6<T> ghat4{};
  // G6
  TW666<T> w6{};
  TMat66<T> m1{};
  TVec6<T> t1{};
};

template <class T>
Realized<T> realize(SetKind kind, const T* params) {
  Realized<T> r;
  r.kind = kind;
  switch (kind) {
    case SetKind::Iso:
    case SetKind::Coord:
      break;
    case SetKind::G2:
      r.G1 = structure::g2_core(params);
      r.G1sq = square_sym(r.G1);
      break;
    case SetKind::Pair:
      r.G1 = structure::g2_core(params);
      r.G1sq = square_sym(r.G1);
      r.G2 = structure::g2_core(params + 6);
      r.G2sq = square_sym(r.G2);
      r.pair_sym = sym_part(mul_sym(r.G1, r.G2));
      break;
    case SetKind::G4:
      structure::g4_core(params, r.op4, r.ghat4);
      break;
    case SetKind::G6:
      structure::g6_core(params, r.w6, r.m1, r.t1);
      break;
  }
  return r;
}

/// Per-invariant value and derivatives with respect to C, in Mandel
/// coordinates: d is dI/dC as a 6-vector, h is d2I/dC2 as a 6x6 operator.
template <class T>
struct CsetDeriv {
  std::vector<T> value;
  std::vector<TVec6<T>> d;
  std::vector<TMat66<T>> h;
};

/// Evaluate the invariant set of `kind` and its C-derivatives up to `order`.
template <class T>
void eval_cspace(const Realized<T>& rs, const TSym3<T>& C, int order, CsetDeriv<T>& out);

// ---------------------------------------------------------------------------
// F-space bundle (double precision): values, tensor generators dI/dF and
// exact second derivatives d2I/dFdF.
// ---------------------------------------------------------------------------

struct InvariantBundle {
  SetKind kind = SetKind::Iso;
  int order = 0;
  std::vector<double> values;
  std::vector<Mat3> dF;       // order >= 1
  std::vector<Tangent4> ddF;  // order >= 2
};

/// Throws KindMismatch when spec.kind != kind, NonInvertible when det F <= 0.
InvariantBundle invariant_bundle(SetKind kind, const Mat3& F,
                                 const structure::StructureSpec& spec, int order);

/// Bundle evaluation from a prebuilt Realized<double> (used by hot loops).
InvariantBundle invariant_bundle(const Realized<double>& rs, const Mat3& F, int order);

/// Chain a C-space derivative set to F-space.
void chain_to_f(const CsetDeriv<double>& cs, const Mat3& F, int order, InvariantBundle& out);

/// J = det F with dJ/dF = J F^{-T} and the exact second derivative.
struct JBundle {
  double J = 0.0;
  Mat3 dF{};
  Tangent4 ddF{};
};
JBundle j_bundle(const Mat3& F, int order);

// ---------------------------------------------------------------------------
// Appendix-style reference invariant sets (values only; identity-test suite)
// ---------------------------------------------------------------------------

enum class ReferenceGroup {
  Triclinic,            // P set, two 2nd-order tensors
  Monoclinic,           // Q set, two 2nd-order tensors
  OrthotropicDyads,     // S set, two orthonormal dyads
  OrthotropicSingle,    // T set, one tensor with three distinct eigenvalues
  Tetragonal,           // U set, D_tet from two orthonormal vectors
  Cubic,                // V set, G_cub from three orthonormal vectors
  Hexagonal,            // W set, unnormalized 6th-order sum + axis dyad
  TransverselyIsotropic // R set (I1,I2,I3,R4,R5,R6,R7)
};

struct ReferenceStructure {
  Sym3 A{}, B{};                      // triclinic / monoclinic pair
  std::array<double, 3> a1{}, a2{}, a3{};  // frame vectors
  std::array<double, 3> N{};          // tetragonal / hexagonal axis
  Sym3 G{};                           // TI / single orthotropic tensor
};

/// Throws UnsupportedGroup for groups without a reference set.
std::vector<double> reference_invariants(ReferenceGroup group, const Sym3& C,
                                         const ReferenceStructure& rs);

}  // namespace anisocal::invariants
