#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "starslice/bodies.hpp"
#include "starslice/classify.hpp"

namespace starslice {

enum class DistanceCertificate {
  ExactGrid,            // suprema attained on the direction set (or computed
                        // in closed form for quadratic pairs)
  SampledLowerBound,    // grid evaluation of the two suprema
  OptimizedUpperBound,  // best value found by the GL_n optimizer
};

struct DistanceResult {
  double value = 1.0;          // >= 1
  double witness_scale = 1.0;  // a with K in aL in (value) K
  std::optional<Eigen::MatrixXd> witness_map;  // bm only: T applied to L
  DistanceCertificate certified = DistanceCertificate::SampledLowerBound;
};

// Direction set used for the ratio suprema: a uniform angular grid for n = 2,
// seeded samples plus family-critical directions (axes, main diagonals) for
// n >= 3.
struct DirectionSpec {
  std::int64_t samples = 100000;
  int angular_grid = 4096;
  std::uint64_t seed = 0x5EED0D12;
  bool add_critical = true;
};

std::vector<Eigen::VectorXd> make_direction_set(int n, const DirectionSpec& spec);

/// Geometric distance d_G(K, L) = (sup rho_K/rho_L)(sup rho_L/rho_K) over the
/// direction set; exact for quadratic pairs (generalized eigenvalues) and for
/// axis-aligned ball / lp pairs, a lower bound otherwise.
DistanceResult geometric_distance(const StarBody& k, const StarBody& l,
                                  const DirectionSpec& directions = {});

struct BmOptions {
  DirectionSpec search_directions{20000, 4096, 0x5EED0D12, true};
  DirectionSpec final_directions{};  // full-precision re-evaluation
  int max_iterations = 600;          // Nelder-Mead cap per restart
};

/// Upper bound on the Banach-Mazur distance d_BM(K, L) = inf_T d_G(K, T L):
/// multi-start local optimization over GL_n parameterized as
/// rotation * diag(exp s) * rotation. `budget` counts restarts beyond the
/// identity and moment-matching starts. Practical for n <= 6.
DistanceResult bm_distance_upper(const StarBody& k, const StarBody& l,
                                 int budget, std::uint64_t seed,
                                 const BmOptions& options = {});

struct ToClassResult {
  DistanceResult distance;
  int candidate_index = -1;
};

/// min over candidates of bm_distance_upper(L, candidate): an upper bound on
/// the distance from L to the class. Every candidate must carry the requested
/// tag per classify().
ToClassResult distance_to_class(const StarBody& l, const ClassTag& cls,
                                const std::vector<StarBody>& candidates,
                                int budget, std::uint64_t seed,
                                const BmOptions& options = {});

}  // namespace starslice
