#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "starslice/bodies.hpp"
#include "starslice/density.hpp"
#include "starslice/estimate.hpp"

namespace starslice {

enum class Estimator { MonteCarlo, StratifiedAntithetic };

// Sampling counts, seed, and estimator choice for sphere / subspace
// integrals. Results are a deterministic function of (spec, inputs),
// independent of thread count.
struct QuadratureSpec {
  std::int64_t sphere_samples = 8192;
  int radial_nodes = 64;
  std::uint64_t seed = 0;
  Estimator estimator = Estimator::MonteCarlo;
  std::int64_t subspace_samples = 200;
  int refine_steps = 50;

  void validate() const;
  QuadratureSpec with_seed(std::uint64_t s) const {
    QuadratureSpec q = *this;
    q.seed = s;
    return q;
  }
};

/// i.i.d. uniform directions on S^{n-1} (antithetic pairs d_{2k+1} = -d_{2k}
/// under StratifiedAntithetic).
std::vector<Direction> sphere_sample(int n, std::int64_t count,
                                     std::uint64_t seed,
                                     Estimator estimator = Estimator::MonteCarlo);

/// Haar-distributed (n-m)-dimensional subspaces via QR of Gaussian matrices.
std::vector<Subspace> haar_subspace(int n, int m, std::int64_t count,
                                    std::uint64_t seed);

/// Volume |K| by the polar formula |B_2^n| E[rho^n]; closed form (std_error
/// 0) for balls, lp balls, ellipsoids and their linear images.
Estimate volume(const StarBody& body, const QuadratureSpec& quad);

// closed-form volume when the family admits one
std::optional<double> closed_form_volume(const StarBody& body);

/// |K cap H| via the polar formula in dimension n-m; 2 rho_K(theta_H) for
/// one-dimensional sections.
Estimate section_volume(const StarBody& body, const Subspace& h,
                        const QuadratureSpec& quad);

/// mu(K) for the measure with density f: polar formula with a fixed-node
/// Gauss-Legendre radial integral.
Estimate measure_of_body(const StarBody& body, const DensitySpec& f,
                         const QuadratureSpec& quad);

/// mu(K cap H), the density evaluated at ambient points basis * y.
Estimate measure_of_section(const StarBody& body, const Subspace& h,
                            const DensitySpec& f, const QuadratureSpec& quad);

struct MaxSectionResult {
  Subspace subspace;
  Estimate estimate;       // at the returned subspace
  Estimate best_sampled;   // best value among the Haar-sampled candidates
};

/// Approximate max over Gr_{n-m} of mu(K cap H): Haar sampling followed by
/// Givens-rotation hill climbing of the best basis. The returned value is a
/// lower bound on the true maximum (up to its own statistical error).
MaxSectionResult max_section(const StarBody& body, const DensitySpec& f,
                             int m, const QuadratureSpec& quad);

/// Independent oracle: uniform box sampling over [-R, R]^n with acceptance
/// ||x||_K <= 1, averaging f. Shares no code with the polar integrators.
Estimate rejection_volume_oracle(const StarBody& body, const DensitySpec& f,
                                 std::int64_t count, std::uint64_t seed);

}  // namespace starslice
