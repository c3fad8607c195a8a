#include "starslice/sphere_grid.hpp"

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>

#include "starslice/gauss_legendre.hpp"
#include "starslice/rng.hpp"

namespace starslice {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
}

struct SphereGrid::Impl {
  int dim = 0;
  GridKind kind = GridKind::Angular;
  int resolution = 0;
  std::uint64_t seed = 0;

  // angular (n = 2): node k is angle k*pi/pairs, k in [0, 2*pairs);
  // pair slot = k mod pairs.
  int angular_pairs = 0;

  // icosahedral (n = 3)
  std::vector<Eigen::Vector3d> ico_nodes;
  std::vector<int> ico_slot;                          // node -> value slot
  std::vector<int> slot_rep;                          // value slot -> node
  std::vector<std::array<int, 3>> faces;              // base face vertex ids
  std::vector<Eigen::Matrix3d> face_inverse;          // [a b c]^-1 per face
  std::vector<std::vector<int>> face_node;            // lattice -> node id
  std::size_t pairs = 0;

  // cap-blend (n >= 4): one representative per pair
  std::vector<Eigen::VectorXd> cap_nodes;
  double cos_alpha = 0.0;
};

namespace {

using Impl = SphereGrid::Impl;

// ---- icosahedral grid ------------------------------------------------------

std::vector<Eigen::Vector3d> icosahedron_vertices() {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Eigen::Vector3d> v;
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0}) {
      v.emplace_back(0.0, s1, s2 * phi);
      v.emplace_back(s1, s2 * phi, 0.0);
      v.emplace_back(s2 * phi, 0.0, s1);
    }
  for (auto& x : v) x.normalize();
  return v;
}

std::int64_t coord_key(double x) {
  return static_cast<std::int64_t>(std::llround(x * 1e7));
}

std::array<std::int64_t, 3> node_key(const Eigen::Vector3d& p) {
  return {coord_key(p.x()), coord_key(p.y()), coord_key(p.z())};
}

void build_icosahedral(Impl& g, int frequency) {
  const int nu = frequency;
  auto base = icosahedron_vertices();

  // base faces: vertex triples at minimal pairwise distance
  double edge = 1e30;
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i + 1; j < base.size(); ++j)
      edge = std::min(edge, (base[i] - base[j]).norm());
  for (std::size_t i = 0; i < base.size(); ++i)
    for (std::size_t j = i + 1; j < base.size(); ++j)
      for (std::size_t k = j + 1; k < base.size(); ++k) {
        if ((base[i] - base[j]).norm() < edge * 1.01 &&
            (base[i] - base[k]).norm() < edge * 1.01 &&
            (base[j] - base[k]).norm() < edge * 1.01)
          g.faces.push_back({static_cast<int>(i), static_cast<int>(j),
                             static_cast<int>(k)});
      }
  if (g.faces.size() != 20)
    throw std::logic_error("icosahedron face enumeration failed");

  std::map<std::array<std::int64_t, 3>, int> ids;
  auto intern = [&](const Eigen::Vector3d& p) {
    auto it = ids.find(node_key(p));
    if (it != ids.end()) return it->second;
    int id = static_cast<int>(g.ico_nodes.size());
    ids.emplace(node_key(p), id);
    g.ico_nodes.push_back(p);
    return id;
  };

  g.face_node.resize(g.faces.size());
  for (std::size_t f = 0; f < g.faces.size(); ++f) {
    const Eigen::Vector3d& a = base[g.faces[f][0]];
    const Eigen::Vector3d& b = base[g.faces[f][1]];
    const Eigen::Vector3d& c = base[g.faces[f][2]];
    g.face_node[f].assign(static_cast<std::size_t>((nu + 1) * (nu + 2) / 2), -1);
    std::size_t pos = 0;
    for (int i = 0; i <= nu; ++i)
      for (int j = 0; j <= nu - i; ++j) {
        Eigen::Vector3d p =
            a + (b - a) * (static_cast<double>(i) / nu) +
            (c - a) * (static_cast<double>(j) / nu);
        p.normalize();
        g.face_node[f][pos++] = intern(p);
      }
    Eigen::Matrix3d m;
    m.col(0) = a;
    m.col(1) = b;
    m.col(2) = c;
    g.face_inverse.push_back(m.inverse());
  }

  if (g.ico_nodes.size() != static_cast<std::size_t>(10 * nu * nu + 2))
    throw std::logic_error("icosahedral node count mismatch");

  // antipodal pairing with shared value slots
  g.ico_slot.assign(g.ico_nodes.size(), -1);
  int slot = 0;
  for (std::size_t i = 0; i < g.ico_nodes.size(); ++i) {
    if (g.ico_slot[i] >= 0) continue;
    auto it = ids.find(node_key(-g.ico_nodes[i]));
    if (it == ids.end())
      throw std::logic_error("icosahedral grid is not antipodally closed");
    g.ico_slot[i] = slot;
    g.ico_slot[static_cast<std::size_t>(it->second)] = slot;
    g.slot_rep.push_back(static_cast<int>(i));
    ++slot;
  }
  g.pairs = static_cast<std::size_t>(slot);
}

// index into the triangular lattice of one face
inline int lattice_index(int nu, int i, int j) {
  // nodes stored as (i, j) with i + j <= nu, j-major within fixed i
  return i * (nu + 1) - i * (i - 1) / 2 + j;
}

// antipodal canonicalization: exact evenness by construction
template <typename Vec>
bool flip_to_canonical(Vec& p) {
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) return false;
    if (p[i] < 0.0) {
      p = -p;
      return true;
    }
  }
  return false;
}

double interpolate_icosahedral(const Impl& g,
                               const Eigen::Ref<const Eigen::VectorXd>& d,
                               const std::vector<double>& values) {
  Eigen::Vector3d p(d[0], d[1], d[2]);
  flip_to_canonical(p);
  // containing base face: the one whose barycentric coefficients are all
  // non-negative; argmax of the minimum coefficient is robust on edges
  int best_face = 0;
  Eigen::Vector3d best_bary = Eigen::Vector3d::Zero();
  double best_min = -1e30;
  for (std::size_t f = 0; f < g.faces.size(); ++f) {
    Eigen::Vector3d bc = g.face_inverse[f] * p;
    double mn = bc.minCoeff();
    if (mn > best_min) {
      best_min = mn;
      best_face = static_cast<int>(f);
      best_bary = bc;
    }
  }
  double s = best_bary.sum();
  Eigen::Vector3d bary = best_bary / s;

  const int nu = g.resolution;
  double u = bary[1] * nu;
  double v = bary[2] * nu;
  int i0 = std::min(static_cast<int>(std::floor(u)), nu - 1);
  int j0 = std::min(static_cast<int>(std::floor(v)), nu - 1);
  if (i0 < 0) i0 = 0;
  if (j0 < 0) j0 = 0;
  if (i0 + j0 > nu - 1) {
    // numerical spill over the diagonal; pull back inside
    int over = i0 + j0 - (nu - 1);
    if (i0 >= over) i0 -= over; else j0 -= i0 + j0 - (nu - 1);
  }
  double fu = u - i0;
  double fv = v - j0;

  const std::vector<int>& fn = g.face_node[static_cast<std::size_t>(best_face)];
  int n00 = fn[static_cast<std::size_t>(lattice_index(nu, i0, j0))];
  int n10 = fn[static_cast<std::size_t>(lattice_index(nu, i0 + 1, j0))];
  int n01 = fn[static_cast<std::size_t>(lattice_index(nu, i0, j0 + 1))];

  double w00, w10, w01, w11 = 0.0;
  int n11 = -1;
  if (fu + fv <= 1.0 || i0 + j0 + 2 > nu) {
    w00 = std::max(0.0, 1.0 - fu - fv);
    w10 = std::max(0.0, fu);
    w01 = std::max(0.0, fv);
  } else {
    n11 = fn[static_cast<std::size_t>(lattice_index(nu, i0 + 1, j0 + 1))];
    w11 = std::max(0.0, fu + fv - 1.0);
    w01 = std::max(0.0, 1.0 - fu);
    w10 = std::max(0.0, 1.0 - fv);
    w00 = 0.0;
  }
  double acc = w00 * values[static_cast<std::size_t>(g.ico_slot[n00])] +
               w10 * values[static_cast<std::size_t>(g.ico_slot[n10])] +
               w01 * values[static_cast<std::size_t>(g.ico_slot[n01])];
  double wsum = w00 + w10 + w01;
  if (n11 >= 0) {
    acc += w11 * values[static_cast<std::size_t>(g.ico_slot[n11])];
    wsum += w11;
  }
  return acc / wsum;
}

// ---- cap-blend grid (n >= 4) -----------------------------------------------

// fraction of the sphere within angular radius alpha of a pole
double cap_fraction(int n, double alpha) {
  auto f = [n](double t) { return std::pow(std::sin(t), n - 2); };
  double num = integrate_radial(96, alpha, f);
  double den = integrate_radial(96, kPi, f);
  return num / den;
}

void build_cap_blend(Impl& g, int pairs, std::uint64_t seed) {
  g.cap_nodes.reserve(static_cast<std::size_t>(pairs));
  for (int i = 0; i < pairs; ++i) {
    SplitMix64 rng(derive_seed(seed, 0xC4B1D, static_cast<std::uint64_t>(i)));
    Eigen::VectorXd v(g.dim);
    double nrm = 0.0;
    do {
      rng.fill_gaussian(v);
      nrm = v.norm();
    } while (nrm < 1e-12);
    g.cap_nodes.push_back(v / nrm);
  }
  g.pairs = static_cast<std::size_t>(pairs);

  // blend radius sized so a cap holds ~24 nodes out of 2*pairs on average
  double target = std::min(0.45, 12.0 / pairs);
  double lo = 1e-3, hi = kPi / 2;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (cap_fraction(g.dim, mid) < target ? lo : hi) = mid;
  }
  g.cos_alpha = std::cos(0.5 * (lo + hi));
}

double interpolate_cap_blend(const Impl& g,
                             const Eigen::Ref<const Eigen::VectorXd>& d,
                             const std::vector<double>& values) {
  const double c = g.cos_alpha;
  double wsum = 0.0, acc = 0.0;
  double best_abs = -1.0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < g.cap_nodes.size(); ++i) {
    double t = std::abs(g.cap_nodes[i].dot(d));
    if (t > best_abs) {
      best_abs = t;
      best = i;
    }
    if (t <= c) continue;
    if (t > 1.0 - 1e-12) return values[i];  // node hit: exact
    double w = (t - c) * (t - c) / (1.0 - t);
    wsum += w;
    acc += w * values[i];
  }
  if (wsum <= 0.0) return values[best];  // outside every cap: nearest node
  return acc / wsum;
}

}  // namespace

// ---- public interface -------------------------------------------------------

SphereGrid SphereGrid::standard(int dim, int resolution, std::uint64_t seed) {
  if (dim < 2) throw std::invalid_argument("SphereGrid: dim must be >= 2");
  if (resolution < 1)
    throw std::invalid_argument("SphereGrid: resolution must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->dim = dim;
  impl->resolution = resolution;
  impl->seed = seed;
  if (dim == 2) {
    impl->kind = GridKind::Angular;
    impl->angular_pairs = resolution;
    impl->pairs = static_cast<std::size_t>(resolution);
  } else if (dim == 3) {
    impl->kind = GridKind::Icosahedral;
    build_icosahedral(*impl, resolution);
  } else {
    impl->kind = GridKind::CapBlend;
    build_cap_blend(*impl, resolution, seed);
  }
  SphereGrid g;
  g.impl = std::move(impl);
  return g;
}

SphereGrid SphereGrid::standard_default(int dim, std::uint64_t seed) {
  if (dim == 2) return standard(2, 1024);
  if (dim == 3) return standard(3, 16);
  return standard(dim, 1000, seed);
}

int SphereGrid::dim() const { return impl->dim; }
GridKind SphereGrid::kind() const { return impl->kind; }
int SphereGrid::resolution() const { return impl->resolution; }
std::uint64_t SphereGrid::seed() const { return impl->seed; }

std::size_t SphereGrid::pair_count() const { return impl->pairs; }

Eigen::VectorXd SphereGrid::pair_direction(std::size_t pair) const {
  const Impl& g = *impl;
  if (pair >= g.pairs) throw std::out_of_range("SphereGrid: pair index");
  if (g.kind == GridKind::Angular) {
    double a = kPi * static_cast<double>(pair) / g.angular_pairs;
    Eigen::VectorXd v(2);
    v << std::cos(a), std::sin(a);
    return v;
  }
  if (g.kind == GridKind::Icosahedral)
    return g.ico_nodes[static_cast<std::size_t>(g.slot_rep[pair])];
  return g.cap_nodes[pair];
}

double SphereGrid::interpolate(const Eigen::Ref<const Eigen::VectorXd>& d,
                               const std::vector<double>& values) const {
  const Impl& g = *impl;
  if (values.size() != g.pairs)
    throw std::invalid_argument("SphereGrid: value count != pair count");
  if (g.kind == GridKind::Angular) {
    Eigen::Vector2d p(d[0], d[1]);
    flip_to_canonical(p);  // evenness: fold to the canonical half-circle
    double theta = std::atan2(p[1], p[0]);
    if (theta < 0.0) theta += kPi;
    double u = theta / (kPi / g.angular_pairs);
    int k = static_cast<int>(std::floor(u));
    double frac = u - k;
    int k0 = k % g.angular_pairs;
    int k1 = (k + 1) % g.angular_pairs;
    return (1.0 - frac) * values[static_cast<std::size_t>(k0)] +
           frac * values[static_cast<std::size_t>(k1)];
  }
  if (g.kind == GridKind::Icosahedral)
    return interpolate_icosahedral(g, d, values);
  return interpolate_cap_blend(g, d, values);
}

}  // namespace starslice
