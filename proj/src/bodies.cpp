#include "starslice/bodies.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include <Eigen/Dense>

namespace starslice {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(const Eigen::Ref<const Eigen::VectorXd>& x,
                  const char* where) {
  if (!x.allFinite())
    throw std::invalid_argument(std::string(where) + ": non-finite input");
}
}  // namespace

// ---- Direction / Subspace ---------------------------------------------------

Direction::Direction(Eigen::VectorXd coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2)
    throw std::invalid_argument("Direction: dimension must be >= 2");
  check_finite(coords_, "Direction");
  if (std::abs(coords_.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("Direction: not a unit vector");
}

Direction Direction::normalized(Eigen::VectorXd v) {
  double n = v.norm();
  if (!(n > 0.0) || !v.allFinite())
    throw std::invalid_argument("Direction: cannot normalize zero vector");
  return Direction(v / n);
}

Subspace::Subspace(int ambient_dim, Eigen::MatrixXd basis)
    : ambient_dim_(ambient_dim), basis_(std::move(basis)) {
  if (basis_.rows() != ambient_dim_)
    throw std::invalid_argument("Subspace: basis rows != ambient dimension");
  int k = static_cast<int>(basis_.cols());
  if (k < 1 || k > ambient_dim_ - 1)
    throw std::invalid_argument("Subspace: codimension out of range");
  Eigen::MatrixXd gram = basis_.transpose() * basis_;
  if (!(gram - Eigen::MatrixXd::Identity(k, k)).isZero(1e-10))
    throw std::invalid_argument("Subspace: basis is not orthonormal");
}

Direction Subspace::spanning_direction() const {
  if (dim() != 1)
    throw std::logic_error("Subspace: spanning_direction needs dim 1");
  return Direction::normalized(basis_.col(0));
}

Subspace hyperplane_orthogonal_to(const Direction& xi) {
  const Eigen::VectorXd& v = xi.vec();
  int n = xi.dim();
  // Householder H with H e1 = +-v; columns 2..n of H span v-perp
  Eigen::VectorXd w = v;
  double sign = w[0] >= 0.0 ? 1.0 : -1.0;
  w[0] += sign;
  double wn2 = w.squaredNorm();
  Eigen::MatrixXd basis(n, n - 1);
  for (int j = 1; j < n; ++j) {
    Eigen::VectorXd col = Eigen::VectorXd::Unit(n, j);
    col -= (2.0 * w[j] / wn2) * w;
    basis.col(j - 1) = col;
  }
  return Subspace(n, std::move(basis));
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& basis) {
  int n = static_cast<int>(basis.rows());
  int k = static_cast<int>(basis.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return q.rightCols(n - k);
}

// ---- StarBody families ------------------------------------------------------

namespace {

struct BallData {
  double radius;
};
struct LpData {
  double p;       // (0, inf]
  double scale;
  int int_p;      // p as a small positive integer, or 0
};
struct EllipsoidData {
  Eigen::MatrixXd form;  // positive definite
  double min_eig;        // cached for radial_upper_bound
};
struct LinearImageData {
  StarBody inner;
  Eigen::MatrixXd transform;
  Eigen::MatrixXd inverse;
  double op_norm;  // ||T||_2
};
struct GridData {
  SphereGrid grid;
  std::vector<double> values;
  GridProvenance provenance;
  double max_value;
};
struct RestrictionData {
  StarBody inner;
  Eigen::MatrixXd basis;  // ambient_dim x dim, orthonormal columns
};

using FamilyData = std::variant<BallData, LpData, EllipsoidData,
                                LinearImageData, GridData, RestrictionData>;

}  // namespace

struct StarBody::Impl {
  int dim = 0;
  FamilyData data;
};

namespace {

StarBody make_body(int dim, FamilyData data) {
  auto impl = std::make_shared<StarBody::Impl>();
  impl->dim = dim;
  impl->data = std::move(data);
  StarBody b;
  b.impl = std::move(impl);
  return b;
}

double lp_norm(const LpData& d, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (d.p == kInf) return x.lpNorm<Eigen::Infinity>() / d.scale;
  if (d.p == 1.0) return x.lpNorm<1>() / d.scale;
  if (d.p == 2.0) return x.norm() / d.scale;
  double acc = 0.0;
  if (d.int_p > 0) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      double a = std::abs(x[i]);
      double t = a;
      for (int e = 1; e < d.int_p; ++e) t *= a;
      acc += t;
    }
  } else {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      acc += std::pow(std::abs(x[i]), d.p);
  }
  return std::pow(acc, 1.0 / d.p) / d.scale;
}

}  // namespace

StarBody StarBody::euclidean_ball(int n, double radius) {
  if (n < 1) throw std::invalid_argument("euclidean_ball: n must be >= 1");
  if (!(radius > 0.0))
    throw std::invalid_argument("euclidean_ball: radius must be > 0");
  return make_body(n, BallData{radius});
}

StarBody StarBody::lp_ball(int n, double p, double scale) {
  if (n < 1) throw std::invalid_argument("lp_ball: n must be >= 1");
  if (!(p > 0.0)) throw std::invalid_argument("lp_ball: p must be > 0");
  if (!(scale > 0.0)) throw std::invalid_argument("lp_ball: scale must be > 0");
  int int_p = 0;
  if (p != kInf && p == std::floor(p) && p <= 16.0)
    int_p = static_cast<int>(p);
  return make_body(n, LpData{p, scale, int_p});
}

StarBody StarBody::cube(int n, double half_side) {
  return lp_ball(n, kInf, half_side);
}

StarBody StarBody::ellipsoid(Eigen::MatrixXd quadratic_form) {
  int n = static_cast<int>(quadratic_form.rows());
  if (quadratic_form.cols() != n || n < 1)
    throw std::invalid_argument("ellipsoid: form must be square");
  if (!(quadratic_form - quadratic_form.transpose()).isZero(1e-10))
    throw std::invalid_argument("ellipsoid: form must be symmetric");
  Eigen::MatrixXd sym = 0.5 * (quadratic_form + quadratic_form.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  double min_eig = es.eigenvalues().minCoeff();
  if (!(min_eig > 0.0))
    throw std::invalid_argument("ellipsoid: form must be positive definite");
  return make_body(n, EllipsoidData{std::move(sym), min_eig});
}

StarBody StarBody::ellipsoid_from_axes(const Eigen::VectorXd& axes) {
  int n = static_cast<int>(axes.size());
  if (n < 1) throw std::invalid_argument("ellipsoid: empty axes");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (!(axes[i] > 0.0))
      throw std::invalid_argument("ellipsoid: axes must be > 0");
    m(i, i) = 1.0 / (axes[i] * axes[i]);
  }
  return ellipsoid(std::move(m));
}

StarBody StarBody::linear_image(StarBody inner, Eigen::MatrixXd transform) {
  int n = inner.dim();
  if (transform.rows() != n || transform.cols() != n)
    throw std::invalid_argument("linear_image: matrix must be n x n");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(transform);
  double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-300)
    throw std::invalid_argument("linear_image: matrix must be invertible");
  Eigen::MatrixXd inverse = lu.inverse();
  double op_norm =
      Eigen::JacobiSVD<Eigen::MatrixXd>(transform).singularValues()(0);
  return make_body(n, LinearImageData{std::move(inner), std::move(transform),
                                      std::move(inverse), op_norm});
}

StarBody StarBody::radial_grid(SphereGrid grid, std::vector<double> values,
                               GridProvenance provenance) {
  if (values.size() != grid.pair_count())
    throw std::invalid_argument("radial_grid: value count != pair count");
  double max_v = 0.0;
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("radial_grid: radial values must be positive");
    max_v = std::max(max_v, v);
  }
  int n = grid.dim();
  return make_body(n, GridData{std::move(grid), std::move(values), provenance,
                               max_v});
}

int StarBody::dim() const { return impl->dim; }

BodyFamily StarBody::family() const {
  switch (impl->data.index()) {
    case 0: return BodyFamily::EuclideanBall;
    case 1: return BodyFamily::LpBall;
    case 2: return BodyFamily::Ellipsoid;
    case 3: return BodyFamily::LinearImage;
    case 4: return BodyFamily::RadialGrid;
    default: return BodyFamily::Restriction;
  }
}

std::string StarBody::family_name() const {
  switch (family()) {
    case BodyFamily::EuclideanBall: return "ball";
    case BodyFamily::LpBall: return "lp";
    case BodyFamily::Ellipsoid: return "ellipsoid";
    case BodyFamily::LinearImage: return "linear_image";
    case BodyFamily::RadialGrid: return "radial_grid";
    case BodyFamily::Restriction: return "restriction";
  }
  return "?";
}

double StarBody::radius() const { return std::get<BallData>(impl->data).radius; }
double StarBody::lp_exponent() const { return std::get<LpData>(impl->data).p; }
double StarBody::lp_scale() const { return std::get<LpData>(impl->data).scale; }
const Eigen::MatrixXd& StarBody::quadratic_form() const {
  return std::get<EllipsoidData>(impl->data).form;
}
const StarBody& StarBody::inner() const {
  if (family() == BodyFamily::LinearImage)
    return std::get<LinearImageData>(impl->data).inner;
  return std::get<RestrictionData>(impl->data).inner;
}
const Eigen::MatrixXd& StarBody::transform() const {
  return std::get<LinearImageData>(impl->data).transform;
}
const Eigen::MatrixXd& StarBody::restriction_basis() const {
  return std::get<RestrictionData>(impl->data).basis;
}
const SphereGrid& StarBody::grid() const {
  return std::get<GridData>(impl->data).grid;
}
const std::vector<double>& StarBody::grid_values() const {
  return std::get<GridData>(impl->data).values;
}
GridProvenance StarBody::grid_provenance() const {
  return std::get<GridData>(impl->data).provenance;
}

StarBody StarBody::scaled(double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("scaled: factor must be > 0");
  switch (family()) {
    case BodyFamily::EuclideanBall:
      return euclidean_ball(dim(), t * radius());
    case BodyFamily::LpBall:
      return lp_ball(dim(), lp_exponent(), t * lp_scale());
    case BodyFamily::Ellipsoid:
      return ellipsoid(quadratic_form() / (t * t));
    case BodyFamily::RadialGrid: {
      const auto& g = std::get<GridData>(impl->data);
      std::vector<double> values = g.values;
      for (double& v : values) v *= t;
      return radial_grid(g.grid, std::move(values), g.provenance);
    }
    default:
      return linear_image(*this,
                          t * Eigen::MatrixXd::Identity(dim(), dim()));
  }
}

// ---- evaluation -------------------------------------------------------------

double minkowski(const StarBody& body,
                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != body.dim())
    throw std::invalid_argument("minkowski: dimension mismatch");
  check_finite(x, "minkowski");

  const auto& data = body.impl->data;
  switch (data.index()) {
    case 0:
      return x.norm() / std::get<BallData>(data).radius;
    case 1:
      return lp_norm(std::get<LpData>(data), x);
    case 2: {
      const auto& e = std::get<EllipsoidData>(data);
      return std::sqrt(x.dot(e.form * x));
    }
    case 3: {
      const auto& li = std::get<LinearImageData>(data);
      return minkowski(li.inner, li.inverse * x);
    }
    case 4: {
      const auto& g = std::get<GridData>(data);
      double nrm = x.norm();
      if (nrm == 0.0) return 0.0;
      return nrm / g.grid.interpolate(x / nrm, g.values);
    }
    default: {
      const auto& r = std::get<RestrictionData>(data);
      return minkowski(r.inner, r.basis * x);
    }
  }
}

double radial_unit(const StarBody& body,
                   const Eigen::Ref<const Eigen::VectorXd>& u) {
  double norm_k = minkowski(body, u);
  if (!(norm_k > 0.0))
    throw std::domain_error("radial: Minkowski functional vanished on unit vector");
  return 1.0 / norm_k;
}

double radial(const StarBody& body, const Direction& d) {
  if (d.dim() != body.dim())
    throw std::invalid_argument("radial: dimension mismatch");
  return radial_unit(body, d.vec());
}

StarBody subspace_restrict(const StarBody& body, const Subspace& h) {
  if (h.ambient_dim() != body.dim())
    throw std::invalid_argument("subspace_restrict: dimension mismatch");
  const int k = h.dim();
  const Eigen::MatrixXd& b = h.basis();
  const auto& data = body.impl->data;

  switch (data.index()) {
    case 0:
      return StarBody::euclidean_ball(k, std::get<BallData>(data).radius);
    case 1: {
      const auto& lp = std::get<LpData>(data);
      if (lp.p == 2.0) return StarBody::euclidean_ball(k, lp.scale);
      break;
    }
    case 2: {
      const auto& e = std::get<EllipsoidData>(data);
      return StarBody::ellipsoid(b.transpose() * e.form * b);
    }
    case 3: {
      // ||B y||_{TK} = ||T^-1 B y||_K; QR-split T^-1 B = Q R so the result is
      // R^-1 applied to the restriction of K onto span(Q)
      const auto& li = std::get<LinearImageData>(data);
      Eigen::MatrixXd a = li.inverse * b;
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
      Eigen::MatrixXd q =
          qr.householderQ() * Eigen::MatrixXd::Identity(body.dim(), k);
      Eigen::MatrixXd r =
          qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
      // fix signs so r has positive diagonal (q adjusted to match)
      for (int j = 0; j < k; ++j)
        if (r(j, j) < 0.0) {
          r.row(j) *= -1.0;
          q.col(j) *= -1.0;
        }
      StarBody base = subspace_restrict(li.inner, Subspace(body.dim(), q));
      return StarBody::linear_image(std::move(base), r.inverse());
    }
    case 5: {
      const auto& rst = std::get<RestrictionData>(data);
      if (k == 1) break;  // keep single wrapper; generic path below
      return subspace_restrict(rst.inner,
                               Subspace(rst.inner.dim(), rst.basis * b));
    }
    default:
      break;
  }
  if (k == 1) {
    // 1-dimensional section: a symmetric segment, representable as a scaled
    // Euclidean ball in dimension 1
    double rho = radial_unit(body, b.col(0));
    return StarBody::euclidean_ball(1, rho);
  }
  auto impl = std::make_shared<StarBody::Impl>();
  impl->dim = k;
  impl->data = RestrictionData{body, b};
  StarBody out;
  out.impl = std::move(impl);
  return out;
}

double radial_upper_bound(const StarBody& body) {
  const auto& data = body.impl->data;
  switch (data.index()) {
    case 0:
      return std::get<BallData>(data).radius;
    case 1: {
      const auto& lp = std::get<LpData>(data);
      // rho is extremal on an axis or the main diagonal
      double n = static_cast<double>(body.dim());
      double diag = lp.p == kInf ? std::sqrt(n)
                                 : std::pow(n, 0.5 - 1.0 / lp.p);
      return lp.scale * std::max(1.0, diag);
    }
    case 2:
      return 1.0 / std::sqrt(std::get<EllipsoidData>(data).min_eig);
    case 3: {
      const auto& li = std::get<LinearImageData>(data);
      return li.op_norm * radial_upper_bound(li.inner);
    }
    case 4:
      // interpolation is a convex combination of node values (up to the
      // node-exact singular weights), so the max node value bounds rho
      return std::get<GridData>(data).max_value * (1.0 + 1e-9);
    default:
      return radial_upper_bound(std::get<RestrictionData>(data).inner);
  }
}

std::optional<Eigen::MatrixXd> to_quadratic_form(const StarBody& body) {
  const auto& data = body.impl->data;
  int n = body.dim();
  switch (data.index()) {
    case 0: {
      double r = std::get<BallData>(data).radius;
      return Eigen::MatrixXd::Identity(n, n) / (r * r);
    }
    case 1: {
      const auto& lp = std::get<LpData>(data);
      if (lp.p != 2.0) return std::nullopt;
      return Eigen::MatrixXd::Identity(n, n) / (lp.scale * lp.scale);
    }
    case 2:
      return std::get<EllipsoidData>(data).form;
    case 3: {
      const auto& li = std::get<LinearImageData>(data);
      auto m = to_quadratic_form(li.inner);
      if (!m) return std::nullopt;
      return Eigen::MatrixXd(li.inverse.transpose() * (*m) * li.inverse);
    }
    case 5: {
      const auto& r = std::get<RestrictionData>(data);
      auto m = to_quadratic_form(r.inner);
      if (!m) return std::nullopt;
      return Eigen::MatrixXd(r.basis.transpose() * (*m) * r.basis);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace starslice
