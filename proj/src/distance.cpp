#include "starslice/distance.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "starslice/parallel.hpp"
#include "starslice/quadrature.hpp"
#include "starslice/rng.hpp"

namespace starslice {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

bool axis_aligned_lp_like(const StarBody& body) {
  return body.family() == BodyFamily::EuclideanBall ||
         body.family() == BodyFamily::LpBall;
}

void append_critical_directions(int n, std::vector<Eigen::VectorXd>& dirs) {
  for (int i = 0; i < n; ++i) dirs.push_back(Eigen::VectorXd::Unit(n, i));
  // main diagonals: all sign patterns with the first coordinate positive
  int patterns = 1 << (n - 1);
  for (int bits = 0; bits < patterns; ++bits) {
    Eigen::VectorXd v(n);
    v[0] = 1.0;
    for (int i = 1; i < n; ++i) v[i] = (bits >> (i - 1)) & 1 ? -1.0 : 1.0;
    dirs.push_back(v / std::sqrt(static_cast<double>(n)));
  }
}

}  // namespace

std::vector<Eigen::VectorXd> make_direction_set(int n,
                                                const DirectionSpec& spec) {
  if (n < 2) throw std::invalid_argument("make_direction_set: n must be >= 2");
  std::vector<Eigen::VectorXd> dirs;
  if (n == 2) {
    dirs.reserve(static_cast<std::size_t>(spec.angular_grid));
    for (int i = 0; i < spec.angular_grid; ++i) {
      double a = 2.0 * kPi * i / spec.angular_grid;
      Eigen::VectorXd v(2);
      v << std::cos(a), std::sin(a);
      dirs.push_back(std::move(v));
    }
    return dirs;
  }
  dirs.reserve(static_cast<std::size_t>(spec.samples) + 64);
  Eigen::VectorXd u(n);
  for (std::int64_t i = 0; i < spec.samples; ++i) {
    SplitMix64 rng(derive_seed(spec.seed, 0xD15, static_cast<std::uint64_t>(i)));
    double nrm = 0.0;
    do {
      rng.fill_gaussian(u);
      nrm = u.norm();
    } while (nrm < 1e-12);
    dirs.push_back(u / nrm);
  }
  if (spec.add_critical) append_critical_directions(n, dirs);
  return dirs;
}

DistanceResult geometric_distance(const StarBody& k, const StarBody& l,
                                  const DirectionSpec& directions) {
  if (k.dim() != l.dim())
    throw std::invalid_argument("geometric_distance: dimension mismatch");
  int n = k.dim();

  // quadratic pair: both suprema from the generalized eigenproblem
  auto mk = to_quadratic_form(k);
  auto ml = to_quadratic_form(l);
  if (mk && ml) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(*ml, *mk);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    // rho_K/rho_L (theta) = sqrt(theta' M_L theta / theta' M_K theta)
    DistanceResult r;
    r.witness_scale = std::sqrt(hi);
    r.value = std::sqrt(hi / lo);
    r.certified = DistanceCertificate::ExactGrid;
    return r;
  }

  auto dirs = make_direction_set(n, directions);
  double sup_kl = 0.0, sup_lk = 0.0;
  for (const auto& d : dirs) {
    double rk = radial_unit(k, d);
    double rl = radial_unit(l, d);
    sup_kl = std::max(sup_kl, rk / rl);
    sup_lk = std::max(sup_lk, rl / rk);
  }
  DistanceResult r;
  r.witness_scale = sup_kl;
  r.value = sup_kl * sup_lk;
  // lp-ratio extremizers lie on axes or the main diagonal, both in the set
  bool exact = n == 2 ? axis_aligned_lp_like(k) && axis_aligned_lp_like(l) &&
                            directions.angular_grid % 8 == 0
                      : axis_aligned_lp_like(k) && axis_aligned_lp_like(l) &&
                            directions.add_critical;
  r.certified = exact ? DistanceCertificate::ExactGrid
                      : DistanceCertificate::SampledLowerBound;
  return r;
}

// ---- GL_n parameterization and Nelder-Mead ----------------------------------

namespace {

int rotation_param_count(int n) { return n * (n - 1) / 2; }

Eigen::MatrixXd rotation_from_angles(int n,
                                     const Eigen::Ref<const Eigen::VectorXd>& a) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::JacobiRotation<double> g(std::cos(a[idx]), std::sin(a[idx]));
      r.applyOnTheLeft(i, j, g);
      ++idx;
    }
  return r;
}

// T = base * R(theta1) * diag(exp s) * R(theta2)
Eigen::MatrixXd transform_from_params(int n, const Eigen::MatrixXd& base,
                                      const Eigen::VectorXd& params) {
  int q = rotation_param_count(n);
  Eigen::MatrixXd r1 = rotation_from_angles(n, params.head(q));
  Eigen::MatrixXd r2 = rotation_from_angles(n, params.segment(q + n, q));
  Eigen::VectorXd d(n);
  for (int i = 0; i < n; ++i)
    d[i] = std::exp(std::clamp(params[q + i], -30.0, 30.0));
  return base * r1 * d.asDiagonal() * r2;
}

// d_G(K, T L) on a fixed direction set with rho_K precomputed:
// g(d) = rho_K(d) * ||T^-1 d||_L, value = max g / min g
double objective_dg(const StarBody& l, const Eigen::MatrixXd& t,
                    const std::vector<Eigen::VectorXd>& dirs,
                    const std::vector<double>& rho_k) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(t);
  if (std::abs(lu.determinant()) < 1e-200)
    return std::numeric_limits<double>::infinity();
  Eigen::MatrixXd tinv = lu.inverse();
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  Eigen::VectorXd w(t.rows());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    w.noalias() = tinv * dirs[i];
    double g = rho_k[i] * minkowski(l, w);
    hi = std::max(hi, g);
    lo = std::min(lo, g);
  }
  if (!(lo > 0.0) || !std::isfinite(hi))
    return std::numeric_limits<double>::infinity();
  return hi / lo;
}

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
};

template <typename F>
NelderMeadResult nelder_mead(F&& f, const Eigen::VectorXd& x0, double scale,
                             int max_iterations) {
  const int dim = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(static_cast<std::size_t>(dim) + 1, x0);
  std::vector<double> fs(static_cast<std::size_t>(dim) + 1, 0.0);
  for (int i = 1; i <= dim; ++i) xs[static_cast<std::size_t>(i)][i - 1] += scale;
  for (std::size_t i = 0; i < xs.size(); ++i) fs[i] = f(xs[i]);

  auto order = [&] {
    // simple insertion ordering; deterministic for ties
    for (std::size_t i = 1; i < xs.size(); ++i)
      for (std::size_t j = i; j > 0 && fs[j] < fs[j - 1]; --j) {
        std::swap(fs[j], fs[j - 1]);
        std::swap(xs[j], xs[j - 1]);
      }
  };
  order();

  for (int it = 0; it < max_iterations; ++it) {
    if (fs.back() - fs.front() < 1e-13 * (1.0 + std::abs(fs.front()))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) centroid += xs[i];
    centroid /= static_cast<double>(dim);

    Eigen::VectorXd xr = centroid + (centroid - xs.back());
    double fr = f(xr);
    if (fr < fs.front()) {
      Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs.back());
      double fe = f(xe);
      if (fe < fr) {
        xs.back() = xe;
        fs.back() = fe;
      } else {
        xs.back() = xr;
        fs.back() = fr;
      }
    } else if (fr < fs[fs.size() - 2]) {
      xs.back() = xr;
      fs.back() = fr;
    } else {
      Eigen::VectorXd xc = centroid + 0.5 * (xs.back() - centroid);
      double fc = f(xc);
      if (fc < fs.back()) {
        xs.back() = xc;
        fs.back() = fc;
      } else {
        for (std::size_t i = 1; i < xs.size(); ++i) {
          xs[i] = xs.front() + 0.5 * (xs[i] - xs.front());
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  return {xs.front(), fs.front()};
}

// second moments int_K x x' dx by the polar formula, for the moment-matching
// start
Eigen::MatrixXd second_moment(const StarBody& body, std::uint64_t seed) {
  int n = body.dim();
  const std::int64_t count = 4096;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd u(n);
  for (std::int64_t i = 0; i < count; ++i) {
    SplitMix64 rng(derive_seed(seed, 0x2D0, static_cast<std::uint64_t>(i)));
    double nrm = 0.0;
    do {
      rng.fill_gaussian(u);
      nrm = u.norm();
    } while (nrm < 1e-12);
    u /= nrm;
    double rho = radial_unit(body, u);
    acc += std::pow(rho, n + 2) * (u * u.transpose());
  }
  return acc / static_cast<double>(count);
}

}  // namespace

DistanceResult bm_distance_upper(const StarBody& k, const StarBody& l,
                                 int budget, std::uint64_t seed,
                                 const BmOptions& options) {
  if (k.dim() != l.dim())
    throw std::invalid_argument("bm_distance_upper: dimension mismatch");
  int n = k.dim();
  if (n > 6)
    throw std::invalid_argument("bm_distance_upper: practical bound is n <= 6");
  if (budget < 1)
    throw std::invalid_argument("bm_distance_upper: budget must be >= 1");

  auto dirs = make_direction_set(n, options.search_directions);
  std::vector<double> rho_k(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    rho_k[i] = radial_unit(k, dirs[i]);

  const int q = rotation_param_count(n);
  const int param_count = 2 * q + n;

  // start list: identity, moment matching, then seeded random bases
  std::vector<Eigen::MatrixXd> bases;
  bases.push_back(Eigen::MatrixXd::Identity(n, n));
  {
    Eigen::MatrixXd ck = second_moment(k, derive_seed(seed, 0xA));
    Eigen::MatrixXd cl = second_moment(l, derive_seed(seed, 0xB));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ek(ck), el(cl);
    if (ek.eigenvalues().minCoeff() > 0.0 && el.eigenvalues().minCoeff() > 0.0) {
      Eigen::MatrixXd sk = ek.operatorSqrt();
      Eigen::MatrixXd sl_inv = el.operatorInverseSqrt();
      bases.push_back(sk * sl_inv);
    }
  }
  for (int r = static_cast<int>(bases.size()); r < budget + 1; ++r) {
    SplitMix64 rng(derive_seed(seed, 0xB45E, static_cast<std::uint64_t>(r)));
    Eigen::VectorXd params(param_count);
    for (int i = 0; i < q; ++i) params[i] = rng.next_uniform(-kPi, kPi);
    for (int i = 0; i < n; ++i) params[q + i] = 0.4 * rng.next_gaussian();
    for (int i = 0; i < q; ++i) params[q + n + i] = rng.next_uniform(-kPi, kPi);
    bases.push_back(transform_from_params(n, Eigen::MatrixXd::Identity(n, n), params));
  }

  Eigen::MatrixXd best_t = Eigen::MatrixXd::Identity(n, n);
  double best_f = std::numeric_limits<double>::infinity();
  for (const Eigen::MatrixXd& base : bases) {
    auto objective = [&](const Eigen::VectorXd& params) {
      return objective_dg(l, transform_from_params(n, base, params), dirs, rho_k);
    };
    NelderMeadResult res =
        nelder_mead(objective, Eigen::VectorXd::Zero(param_count), 0.08,
                    options.max_iterations);
    if (res.f < best_f) {
      best_f = res.f;
      best_t = transform_from_params(n, base, res.x);
    }
  }

  // honest final evaluation on the full direction set
  StarBody tl = StarBody::linear_image(l, best_t);
  DistanceResult final_dg = geometric_distance(k, tl, options.final_directions);
  DistanceResult out;
  out.value = final_dg.value;
  out.witness_scale = final_dg.witness_scale;
  out.witness_map = best_t;
  out.certified = DistanceCertificate::OptimizedUpperBound;
  return out;
}

ToClassResult distance_to_class(const StarBody& l, const ClassTag& cls,
                                const std::vector<StarBody>& candidates,
                                int budget, std::uint64_t seed,
                                const BmOptions& options) {
  if (candidates.empty())
    throw std::invalid_argument("distance_to_class: empty candidate list");
  ToClassResult best;
  best.distance.value = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto tags = classify(candidates[i]);
    if (!has_tag(tags, cls.kind) ||
        (cls.kind == ClassKind::GeneralizedMIntersection &&
         !has_tag(tags, cls.kind, cls.param)))
      throw std::invalid_argument(
          "distance_to_class: candidate lacks the requested class tag");
    DistanceResult r = bm_distance_upper(
        l, candidates[i], budget,
        derive_seed(seed, 0xC1A55, static_cast<std::uint64_t>(i)), options);
    if (r.value < best.distance.value) {
      best.distance = r;
      best.candidate_index = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace starslice
