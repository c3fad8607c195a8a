#include "starslice/classify.hpp"

#include <cmath>
#include <limits>

namespace starslice {

namespace {

// effective lp exponent of the body's core family, looking through linear
// images and restrictions; ball/ellipsoid count as p = 2
std::optional<double> core_lp_exponent(const StarBody& body) {
  switch (body.family()) {
    case BodyFamily::EuclideanBall:
    case BodyFamily::Ellipsoid:
      return 2.0;
    case BodyFamily::LpBall:
      return body.lp_exponent();
    case BodyFamily::LinearImage:
    case BodyFamily::Restriction:
      return core_lp_exponent(body.inner());
    default:
      return std::nullopt;
  }
}

// grids produced by the intersection-body operator, possibly behind linear
// images (which preserve the generalized m-intersection classes)
bool is_intersection_body_grid(const StarBody& body) {
  if (body.family() == BodyFamily::LinearImage)
    return is_intersection_body_grid(body.inner());
  return body.family() == BodyFamily::RadialGrid &&
         body.grid_provenance() == GridProvenance::SectionVolumes;
}

void push_intersection_family_tags(std::vector<ClassTag>& tags, int n) {
  tags.push_back({ClassKind::IntersectionBody, 0.0});
  for (int m = 1; m <= n - 1; ++m)
    tags.push_back({ClassKind::GeneralizedMIntersection, double(m)});
  for (int k = 1; k <= n - 1; ++k)
    tags.push_back({ClassKind::KIntersection, double(k)});
}

}  // namespace

std::string class_kind_name(ClassKind kind) {
  switch (kind) {
    case ClassKind::IntersectionBody: return "intersection_body";
    case ClassKind::GeneralizedMIntersection: return "generalized_m_intersection";
    case ClassKind::KIntersection: return "k_intersection";
    case ClassKind::SubspaceLq: return "subspace_lq";
    case ClassKind::SubspaceLpPos: return "subspace_lp";
    case ClassKind::GeneralSymmetricConvex: return "symmetric_convex";
    case ClassKind::Unknown: return "unknown";
  }
  return "?";
}

std::vector<ClassTag> classify(const StarBody& body) {
  std::vector<ClassTag> tags;
  int n = body.dim();
  if (n < 2) {
    tags.push_back({ClassKind::Unknown, 0.0});
    return tags;
  }

  if (is_intersection_body_grid(body)) {
    // an intersection body of a star body by construction; intersection
    // bodies are generalized m-intersection bodies for every m, hence
    // m-intersection bodies
    push_intersection_family_tags(tags, n);
    return tags;
  }

  auto p = core_lp_exponent(body);
  if (!p) {
    tags.push_back({ClassKind::Unknown, 0.0});
    return tags;
  }

  if (*p <= 2.0) {
    // unit balls of subspaces of L_q, q <= 2, are k-intersection bodies for
    // every k; linear images preserve all of these classes
    push_intersection_family_tags(tags, n);
    tags.push_back({ClassKind::SubspaceLq, *p});
  } else {
    tags.push_back({ClassKind::SubspaceLpPos, *p});
    tags.push_back({ClassKind::GeneralSymmetricConvex, 0.0});
  }
  return tags;
}

bool has_tag(const std::vector<ClassTag>& tags, ClassKind kind) {
  for (const auto& t : tags)
    if (t.kind == kind) return true;
  return false;
}

bool has_tag(const std::vector<ClassTag>& tags, ClassKind kind, double param) {
  for (const auto& t : tags)
    if (t.kind == kind && t.param == param) return true;
  return false;
}

bool is_convex_family(const StarBody& body) {
  switch (body.family()) {
    case BodyFamily::EuclideanBall:
    case BodyFamily::Ellipsoid:
      return true;
    case BodyFamily::LpBall:
      return body.lp_exponent() >= 1.0;
    case BodyFamily::LinearImage:
    case BodyFamily::Restriction:
      return is_convex_family(body.inner());
    default:
      return false;
  }
}

}  // namespace starslice
