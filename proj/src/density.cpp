#include "starslice/density.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace starslice {

namespace {
constexpr double kTwoPi = 6.2831853071795864769252867665590;

struct ConstantData {
  double c;
};
struct GaussianData {
  double sigma;
  double log_norm;  // -n/2 * log(2 pi sigma^2)
};
struct GenGaussianData {
  double q;
  double s;
};
struct ProductData {
  DensitySpec a;
  DensitySpec b;
};

using DensityData =
    std::variant<ConstantData, GaussianData, GenGaussianData, ProductData>;

}  // namespace

struct DensitySpec::Impl {
  int dim = 0;
  DensityData data;
};

namespace {
DensitySpec make_density(int n, DensityData data) {
  if (n < 1) throw std::invalid_argument("density: dimension must be >= 1");
  auto impl = std::make_shared<DensitySpec::Impl>();
  impl->dim = n;
  impl->data = std::move(data);
  DensitySpec d;
  d.impl = std::move(impl);
  return d;
}
}  // namespace

DensitySpec DensitySpec::constant(int n, double c) {
  if (!(c >= 0.0)) throw std::invalid_argument("density: constant must be >= 0");
  return make_density(n, ConstantData{c});
}

DensitySpec DensitySpec::gaussian(int n, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("density: sigma must be > 0");
  double log_norm = -0.5 * n * std::log(kTwoPi * sigma * sigma);
  return make_density(n, GaussianData{sigma, log_norm});
}

DensitySpec DensitySpec::generalized_gaussian(int n, double q, double s) {
  if (!(q > 0.0)) throw std::invalid_argument("density: q must be > 0");
  if (!(s > 0.0)) throw std::invalid_argument("density: s must be > 0");
  return make_density(n, GenGaussianData{q, s});
}

DensitySpec DensitySpec::product(DensitySpec a, DensitySpec b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("density: product factors disagree on dimension");
  int n = a.dim();
  return make_density(n, ProductData{std::move(a), std::move(b)});
}

int DensitySpec::dim() const { return impl->dim; }

double DensitySpec::operator()(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const auto& data = impl->data;
  switch (data.index()) {
    case 0:
      return std::get<ConstantData>(data).c;
    case 1: {
      const auto& g = std::get<GaussianData>(data);
      double z = x.squaredNorm() / (2.0 * g.sigma * g.sigma);
      return std::exp(g.log_norm - z);
    }
    case 2: {
      const auto& gg = std::get<GenGaussianData>(data);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i)
        acc += std::pow(std::abs(x[i]) / gg.s, gg.q);
      return std::exp(-acc);
    }
    default: {
      const auto& p = std::get<ProductData>(data);
      return p.a(x) * p.b(x);
    }
  }
}

bool DensitySpec::is_radial() const {
  const auto& data = impl->data;
  switch (data.index()) {
    case 0:
    case 1:
      return true;
    case 2:
      return std::get<GenGaussianData>(data).q == 2.0;
    default: {
      const auto& p = std::get<ProductData>(data);
      return p.a.is_radial() && p.b.is_radial();
    }
  }
}

double DensitySpec::radial_value(double r) const {
  const auto& data = impl->data;
  switch (data.index()) {
    case 0:
      return std::get<ConstantData>(data).c;
    case 1: {
      const auto& g = std::get<GaussianData>(data);
      return std::exp(g.log_norm - r * r / (2.0 * g.sigma * g.sigma));
    }
    case 2: {
      const auto& gg = std::get<GenGaussianData>(data);
      return std::exp(-std::pow(r / gg.s, 2.0));
    }
    default: {
      const auto& p = std::get<ProductData>(data);
      return p.a.radial_value(r) * p.b.radial_value(r);
    }
  }
}

bool DensitySpec::is_constant() const { return impl->data.index() == 0; }

double DensitySpec::constant_value() const {
  return std::get<ConstantData>(impl->data).c;
}

DensityKind DensitySpec::kind() const {
  switch (impl->data.index()) {
    case 0: return DensityKind::Constant;
    case 1: return DensityKind::Gaussian;
    case 2: return DensityKind::GeneralizedGaussian;
    default: return DensityKind::Product;
  }
}

double DensitySpec::sigma() const {
  return std::get<GaussianData>(impl->data).sigma;
}
double DensitySpec::gg_exponent() const {
  return std::get<GenGaussianData>(impl->data).q;
}
double DensitySpec::gg_scale() const {
  return std::get<GenGaussianData>(impl->data).s;
}
const DensitySpec& DensitySpec::factor_a() const {
  return std::get<ProductData>(impl->data).a;
}
const DensitySpec& DensitySpec::factor_b() const {
  return std::get<ProductData>(impl->data).b;
}

std::string DensitySpec::describe() const {
  std::ostringstream os;
  const auto& data = impl->data;
  switch (data.index()) {
    case 0:
      os << "constant(" << std::get<ConstantData>(data).c << ")";
      break;
    case 1:
      os << "gaussian(" << std::get<GaussianData>(data).sigma << ")";
      break;
    case 2: {
      const auto& gg = std::get<GenGaussianData>(data);
      os << "gen_gaussian(" << gg.q << "," << gg.s << ")";
      break;
    }
    default: {
      const auto& p = std::get<ProductData>(data);
      os << p.a.describe() << "*" << p.b.describe();
      break;
    }
  }
  return os.str();
}

}  // namespace starslice
