#pragma once

#include <string>

#include "anisocal/errors.hpp"

namespace anisocal {

/// Supported invariant-set families. Coord is the coordinate-based reference
/// model operating on the six independent components of C.
enum class SetKind { Iso, G2, G4, G6, Pair, Coord };

inline int invariant_count(SetKind k) {
  switch (k) {
    case SetKind::Iso: return 3;
    case SetKind::G2: return 7;
    case SetKind::G4: return 11;
    case SetKind::G6: return 13;
    case SetKind::Pair: return 12;
    case SetKind::Coord: return 6;
  }
  return 0;
}

inline int structure_param_count(SetKind k) {
  switch (k) {
    case SetKind::Iso: return 0;
    case SetKind::G2: return 6;
    case SetKind::G4: return 9;
    case SetKind::G6: return 9;
    case SetKind::Pair: return 12;
    case SetKind::Coord: return 0;
  }
  return 0;
}

inline std::string set_kind_name(SetKind k) {
  switch (k) {
    case SetKind::Iso: return "iso";
    case SetKind::G2: return "g2";
    case SetKind::G4: return "g4";
    case SetKind::G6: return "g6";
    case SetKind::Pair: return "pair";
    case SetKind::Coord: return "coord";
  }
  return "?";
}

inline SetKind set_kind_from_name(const std::string& s) {
  if (s == "iso") return SetKind::Iso;
  if (s == "g2") return SetKind::G2;
  if (s == "g4") return SetKind::G4;
  if (s == "g6") return SetKind::G6;
  if (s == "pair") return SetKind::Pair;
  if (s == "coord") return SetKind::Coord;
  throw KindMismatch("unknown set kind: " + s);
}

}  // namespace anisocal
