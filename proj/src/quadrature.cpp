#include "starslice/quadrature.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "starslice/constants.hpp"
#include "starslice/gauss_legendre.hpp"
#include "starslice/parallel.hpp"
#include "starslice/rng.hpp"

namespace starslice {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum Stream : std::uint64_t {
  kStreamSphere = 0x53,
  kStreamHaar = 0x48,
  kStreamRejection = 0x52,
  kStreamMaxSection = 0x4D,
  kStreamRefine = 0x46,
};

// fills the pre-sized vector with the index-th uniform direction
void gaussian_direction(std::uint64_t seed, std::uint64_t index,
                        Eigen::VectorXd& out) {
  SplitMix64 rng(derive_seed(seed, kStreamSphere, index));
  double nrm = 0.0;
  do {
    rng.fill_gaussian(out);
    nrm = out.norm();
  } while (nrm < 1e-12);
  out /= nrm;
}

// Monte Carlo mean of h over S^{n-1}. Under StratifiedAntithetic the error
// bar is computed over antithetic pair averages.
template <typename H>
Estimate sphere_mean(int n, std::int64_t count, std::uint64_t seed,
                     Estimator estimator, H&& h) {
  if (estimator == Estimator::MonteCarlo) {
    MeanVar acc = chunked_reduce<MeanVar>(
        count, MeanVar{},
        [&](std::int64_t begin, std::int64_t end, MeanVar& mv) {
          Eigen::VectorXd u(n);
          for (std::int64_t i = begin; i < end; ++i) {
            gaussian_direction(seed, static_cast<std::uint64_t>(i), u);
            mv.add(h(u));
          }
        },
        [](MeanVar& a, const MeanVar& b) { a.merge(b); });
    return {acc.mean(), acc.std_error(), count};
  }
  // antithetic: iterate pairs; an odd trailing sample stands alone
  std::int64_t pairs = (count + 1) / 2;
  MeanVar acc = chunked_reduce<MeanVar>(
      pairs, MeanVar{},
      [&](std::int64_t begin, std::int64_t end, MeanVar& mv) {
        Eigen::VectorXd u(n);
        for (std::int64_t j = begin; j < end; ++j) {
          gaussian_direction(seed, static_cast<std::uint64_t>(j), u);
          double v = h(u);
          if (2 * j + 1 < count) {
            u = -u;
            mv.add(0.5 * (v + h(u)));
          } else {
            mv.add(v);
          }
        }
      },
      [](MeanVar& a, const MeanVar& b) { a.merge(b); });
  return {acc.mean(), acc.std_error(), count};
}

bool ball_like_radius(const StarBody& body, double& radius) {
  if (body.family() == BodyFamily::EuclideanBall) {
    radius = body.radius();
    return true;
  }
  if (body.family() == BodyFamily::LpBall && body.lp_exponent() == 2.0) {
    radius = body.lp_scale();
    return true;
  }
  return false;
}

}  // namespace

void QuadratureSpec::validate() const {
  if (sphere_samples < 1 || radial_nodes < 1 || subspace_samples < 1)
    throw std::invalid_argument("quadrature: counts must be >= 1");
  if (refine_steps < 0)
    throw std::invalid_argument("quadrature: refine_steps must be >= 0");
}

std::vector<Direction> sphere_sample(int n, std::int64_t count,
                                     std::uint64_t seed, Estimator estimator) {
  if (n < 2) throw std::invalid_argument("sphere_sample: n must be >= 2");
  if (count < 1) throw std::invalid_argument("sphere_sample: count must be >= 1");
  std::vector<Direction> out;
  out.reserve(static_cast<std::size_t>(count));
  Eigen::VectorXd u(n);
  for (std::int64_t i = 0; i < count; ++i) {
    if (estimator == Estimator::StratifiedAntithetic) {
      gaussian_direction(seed, static_cast<std::uint64_t>(i / 2), u);
      out.emplace_back(i % 2 == 0 ? u : Eigen::VectorXd(-u));
    } else {
      gaussian_direction(seed, static_cast<std::uint64_t>(i), u);
      out.emplace_back(u);
    }
  }
  return out;
}

namespace {
Subspace haar_one(int n, int m, std::uint64_t derived_seed) {
  int k = n - m;
  SplitMix64 rng(derived_seed);
  Eigen::MatrixXd g(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = rng.next_gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  // fix signs of R's diagonal for exact Haar distribution
  Eigen::MatrixXd r = qr.matrixQR().topRows(k);
  for (int j = 0; j < k; ++j)
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  return Subspace(n, std::move(q));
}
}  // namespace

std::vector<Subspace> haar_subspace(int n, int m, std::int64_t count,
                                    std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("haar_subspace: n must be >= 2");
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("haar_subspace: m out of range [1, n-1]");
  if (count < 1) throw std::invalid_argument("haar_subspace: count must be >= 1");
  std::vector<Subspace> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i)
    out.push_back(
        haar_one(n, m, derive_seed(seed, kStreamHaar, static_cast<std::uint64_t>(i))));
  return out;
}

std::optional<double> closed_form_volume(const StarBody& body) {
  int n = body.dim();
  switch (body.family()) {
    case BodyFamily::EuclideanBall:
      return ball_volume(n) * std::pow(body.radius(), n);
    case BodyFamily::LpBall: {
      double p = body.lp_exponent();
      double s = body.lp_scale();
      if (p == kInf) return std::pow(2.0 * s, n);
      double log_v = n * (std::log(2.0) + std::lgamma(1.0 + 1.0 / p)) -
                     std::lgamma(1.0 + n / p);
      return std::exp(log_v) * std::pow(s, n);
    }
    case BodyFamily::Ellipsoid: {
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(body.quadratic_form());
      return ball_volume(n) / std::sqrt(lu.determinant());
    }
    case BodyFamily::LinearImage: {
      auto inner = closed_form_volume(body.inner());
      if (!inner) return std::nullopt;
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(body.transform());
      return std::abs(lu.determinant()) * *inner;
    }
    default:
      return std::nullopt;
  }
}

Estimate volume(const StarBody& body, const QuadratureSpec& quad) {
  quad.validate();
  if (auto v = closed_form_volume(body)) return {*v, 0.0, 0};
  int n = body.dim();
  if (n == 1) {
    // a symmetric segment: |K| = 2 rho
    Eigen::VectorXd e = Eigen::VectorXd::Ones(1);
    return {2.0 / minkowski(body, e), 0.0, 0};
  }
  double bn = ball_volume(n);
  Estimate mean = sphere_mean(
      n, quad.sphere_samples, quad.seed, quad.estimator,
      [&](const Eigen::VectorXd& u) {
        return std::pow(radial_unit(body, u), n);
      });
  return scaled(mean, bn);
}

Estimate section_volume(const StarBody& body, const Subspace& h,
                        const QuadratureSpec& quad) {
  if (h.ambient_dim() != body.dim())
    throw std::invalid_argument("section_volume: dimension mismatch");
  if (h.dim() == 1) {
    // chord: 2 rho_K(theta_H), deterministic
    double rho = radial_unit(body, h.basis().col(0));
    return {2.0 * rho, 0.0, 0};
  }
  return volume(subspace_restrict(body, h), quad);
}

namespace {

// radial part of the polar formula: int_0^rho t^{pow} f(t * dir) dt,
// with the density evaluated at ambient points `ambient_dir * t`
double radial_density_integral(const DensitySpec& f, int nodes, double rho,
                               int pow_t,
                               const Eigen::VectorXd& ambient_dir,
                               Eigen::VectorXd& scratch) {
  const GaussLegendreRule& rule = gauss_legendre(nodes);
  double half = 0.5 * rho;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    double t = half * (rule.nodes[i] + 1.0);
    scratch = ambient_dir * t;
    double tp = 1.0;
    for (int e = 0; e < pow_t; ++e) tp *= t;
    acc += rule.weights[i] * tp * f(scratch);
  }
  return acc * half;
}

}  // namespace

Estimate measure_of_body(const StarBody& body, const DensitySpec& f,
                         const QuadratureSpec& quad) {
  quad.validate();
  int n = body.dim();
  if (f.dim() != n)
    throw std::invalid_argument("measure_of_body: density dimension mismatch");
  if (f.is_constant())
    return scaled(volume(body, quad), f.constant_value());

  double r = 0.0;
  if (ball_like_radius(body, r) && f.is_radial()) {
    // rotation-invariant case: a single deterministic radial integral
    double v = sphere_surface(n) *
               integrate_radial(quad.radial_nodes, r, [&](double t) {
                 return std::pow(t, n - 1) * f.radial_value(t);
               });
    return {v, 0.0, 0};
  }

  double surf = sphere_surface(n);
  Estimate mean = sphere_mean(
      n, quad.sphere_samples, quad.seed, quad.estimator,
      [&, n](const Eigen::VectorXd& u) {
        thread_local Eigen::VectorXd scratch;
        scratch.resize(n);
        double rho = radial_unit(body, u);
        return radial_density_integral(f, quad.radial_nodes, rho, n - 1, u,
                                       scratch);
      });
  return scaled(mean, surf);
}

Estimate measure_of_section(const StarBody& body, const Subspace& h,
                            const DensitySpec& f, const QuadratureSpec& quad) {
  quad.validate();
  int n = body.dim();
  if (h.ambient_dim() != n)
    throw std::invalid_argument("measure_of_section: dimension mismatch");
  if (f.dim() != n)
    throw std::invalid_argument("measure_of_section: density dimension mismatch");
  if (f.is_constant())
    return scaled(section_volume(body, h, quad), f.constant_value());

  const int k = h.dim();
  if (k == 1) {
    // mu(K cap H) = 2 int_0^rho f(t theta) dt for even f, deterministic
    Eigen::VectorXd theta = h.basis().col(0);
    double rho = radial_unit(body, theta);
    Eigen::VectorXd scratch(n);
    double v = 2.0 * radial_density_integral(f, quad.radial_nodes, rho, 0,
                                             theta, scratch);
    return {v, 0.0, 0};
  }

  StarBody restricted = subspace_restrict(body, h);
  double r = 0.0;
  if (ball_like_radius(restricted, r) && f.is_radial()) {
    // section through a ball-like body with a radial ambient density: the
    // ambient point B y t has Euclidean norm t
    double v = sphere_surface(k) *
               integrate_radial(quad.radial_nodes, r, [&](double t) {
                 return std::pow(t, k - 1) * f.radial_value(t);
               });
    return {v, 0.0, 0};
  }

  const Eigen::MatrixXd& basis = h.basis();
  double surf = sphere_surface(k);
  Estimate mean = sphere_mean(
      k, quad.sphere_samples, quad.seed, quad.estimator,
      [&, n](const Eigen::VectorXd& y) {
        thread_local Eigen::VectorXd ambient, scratch;
        ambient.resize(n);
        scratch.resize(n);
        ambient.noalias() = basis * y;
        double rho = radial_unit(restricted, y);
        return radial_density_integral(f, quad.radial_nodes, rho, k - 1,
                                       ambient, scratch);
      });
  return scaled(mean, surf);
}

namespace {

Estimate eval_section(const StarBody& body, const Subspace& h,
                      const DensitySpec& f, const QuadratureSpec& quad,
                      std::uint64_t sub_seed) {
  return measure_of_section(body, h, f, quad.with_seed(sub_seed));
}

}  // namespace

MaxSectionResult max_section(const StarBody& body, const DensitySpec& f,
                             int m, const QuadratureSpec& quad) {
  quad.validate();
  int n = body.dim();
  if (m < 1 || m > n - 1)
    throw std::invalid_argument("max_section: m out of range [1, n-1]");
  const int k = n - m;
  const std::int64_t count = quad.subspace_samples;

  // stage 1: Haar scan
  std::vector<double> values(static_cast<std::size_t>(count), 0.0);
  std::vector<double> sigmas(static_cast<std::size_t>(count), 0.0);
  std::vector<std::int64_t> samples(static_cast<std::size_t>(count), 0);
  chunked_reduce<int>(
      count, 0,
      [&](std::int64_t begin, std::int64_t end, int&) {
        for (std::int64_t i = begin; i < end; ++i) {
          Subspace h = haar_one(
              n, m, derive_seed(quad.seed, kStreamHaar, static_cast<std::uint64_t>(i)));
          Estimate e = eval_section(
              body, h, f, quad,
              derive_seed(quad.seed, kStreamMaxSection, static_cast<std::uint64_t>(i)));
          values[static_cast<std::size_t>(i)] = e.value;
          sigmas[static_cast<std::size_t>(i)] = e.std_error;
          samples[static_cast<std::size_t>(i)] = e.samples_used;
        }
      },
      [](int&, const int&) {});

  std::int64_t best_i = 0;
  for (std::int64_t i = 1; i < count; ++i)
    if (values[static_cast<std::size_t>(i)] > values[static_cast<std::size_t>(best_i)])
      best_i = i;

  Subspace best_h = haar_one(
      n, m, derive_seed(quad.seed, kStreamHaar, static_cast<std::uint64_t>(best_i)));
  Estimate best{values[static_cast<std::size_t>(best_i)],
                sigmas[static_cast<std::size_t>(best_i)],
                samples[static_cast<std::size_t>(best_i)]};
  Estimate best_sampled = best;

  // stage 2: hill climbing by small rotations of one basis column toward the
  // orthogonal complement. Proposals share one random-number stream (common
  // random numbers), so comparisons between nearby subspaces are not washed
  // out by independent Monte Carlo noise; the step halves on failure.
  Eigen::MatrixXd basis = best_h.basis();
  std::uint64_t crn_seed = derive_seed(quad.seed, kStreamRefine, 0);
  Estimate current = eval_section(body, best_h, f, quad, crn_seed);
  SplitMix64 rng(derive_seed(quad.seed, kStreamRefine, 1));
  double step = 0.3;
  for (int s = 0; s < quad.refine_steps; ++s) {
    Eigen::MatrixXd comp = orthogonal_complement(basis);
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z[i] = rng.next_gaussian();
    Eigen::VectorXd u = comp * z;
    double un = u.norm();
    if (un < 1e-12) continue;
    u /= un;
    int col = s % k;
    bool accepted = false;
    for (double angle : {step, -step}) {
      Eigen::MatrixXd proposal = basis;
      proposal.col(col) =
          std::cos(angle) * basis.col(col) + std::sin(angle) * u;
      Subspace cand(n, proposal);
      Estimate e = eval_section(body, cand, f, quad, crn_seed);
      if (e.value > current.value) {
        basis = proposal;
        current = e;
        accepted = true;
        break;
      }
    }
    step = accepted ? std::min(step * 1.3, 0.8) : std::max(step * 0.5, 5e-4);
  }

  // the refined estimate never falls below the best sampled one; if the
  // common-random-number stream disagrees, keep the scan winner
  if (current.value >= best.value)
    return {Subspace(n, basis), current, best_sampled};
  return {best_h, best, best_sampled};
}

Estimate rejection_volume_oracle(const StarBody& body, const DensitySpec& f,
                                 std::int64_t count, std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("rejection_volume_oracle: count must be >= 1");
  int n = body.dim();
  if (f.dim() != n)
    throw std::invalid_argument("rejection_volume_oracle: density dimension mismatch");
  double radius = radial_upper_bound(body);
  double box = std::pow(2.0 * radius, n);
  MeanVar acc = chunked_reduce<MeanVar>(
      count, MeanVar{},
      [&](std::int64_t begin, std::int64_t end, MeanVar& mv) {
        Eigen::VectorXd x(n);
        for (std::int64_t i = begin; i < end; ++i) {
          SplitMix64 rng(
              derive_seed(seed, kStreamRejection, static_cast<std::uint64_t>(i)));
          for (int j = 0; j < n; ++j)
            x[j] = rng.next_uniform(-radius, radius);
          double v = minkowski(body, x) <= 1.0 ? f(x) : 0.0;
          mv.add(v);
        }
      },
      [](MeanVar& a, const MeanVar& b) { a.merge(b); });
  return {box * acc.mean(), box * acc.std_error(), count};
}

}  // namespace starslice
