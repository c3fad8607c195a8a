#pragma once

#include <optional>
#include <string>
#include <vector>

#include "starslice/bodies.hpp"

namespace starslice {

// Known-class membership rules. Tags are assigned by a closed whitelist per
// family; no numerical positive-definiteness testing is attempted.
enum class ClassKind {
  IntersectionBody,
  GeneralizedMIntersection,  // param = m
  KIntersection,             // param = k
  SubspaceLq,                // param = q in (0, 2]
  SubspaceLpPos,             // param = p in (2, inf]
  GeneralSymmetricConvex,
  Unknown,
};

struct ClassTag {
  ClassKind kind;
  double param = 0.0;
};

std::string class_kind_name(ClassKind kind);

// Rule table:
//   ball, ellipsoid, lp(p <= 2), and their linear images / sections:
//     IntersectionBody, GeneralizedMIntersection(m) and KIntersection(k)
//     for every 1 <= m, k <= n-1, SubspaceLq(q)
//   lp(p > 2) and its linear images / sections:
//     SubspaceLpPos(p), GeneralSymmetricConvex
//   radial grids produced by the intersection-body operator:
//     IntersectionBody and the derived tags above
//   anything else: Unknown
std::vector<ClassTag> classify(const StarBody& body);

bool has_tag(const std::vector<ClassTag>& tags, ClassKind kind);
bool has_tag(const std::vector<ClassTag>& tags, ClassKind kind, double param);

// Convexity by family whitelist: lp(p >= 1), ball, ellipsoid, and their
// linear images / sections.
bool is_convex_family(const StarBody& body);

}  // namespace starslice
