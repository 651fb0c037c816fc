#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "dirs/sysmodel.hpp"

// Lévy-flight action refinement: Mantegna-style heavy-tailed steps drive an
// integer mutation gated by normalized channel gain, a coordinate-wise
// crossover against a threshold, and greedy selection on the repaired
// decision's objective. A small variation factor widens the walk for
// demonstration generation; a larger one keeps online refinement local.

namespace dirs::levy {

// Power/compute floors used when repairing continuous variables.
constexpr double kPowerFloor = 1e-6;    // W
constexpr double kComputeFloor = 1e6;   // cycles/s

struct LevyParams {
    double beta = 1.5;   // variation factor, valid in (1, 2)
    double th = 0.5;     // crossover threshold
    int g_max = 100;     // iterations; 0 disables the search
    double eta = 0.05;   // continuous step scale, applied as eta*F_max and eta*P_max
    std::uint64_t rng_seed = 0;
    // The step sampler's sigma_u follows the 2^((1+beta)/2) denominator as
    // printed; setting this uses the conventional 2^((beta-1)/2) instead.
    bool standard_mantegna = false;

    void validate() const;  // throws ConfigError
};

// sigma_u of the step numerator for a given variation factor.
double mantegna_sigma(double beta, bool standard = false);

// One heavy-tailed step d = u / |v|^(1/beta), u ~ N(0, sigma_u^2), v ~ N(0,1).
double sample_levy_step(double beta, std::mt19937_64& rng, bool standard = false);

// Precomputed-sigma sampler for the hot loop.
class StepSampler {
public:
    StepSampler(double beta, bool standard = false);
    double operator()(std::mt19937_64& rng) const;

private:
    double sigma_u_;
    double inv_beta_;
};

// Decreasing mutation weight: 2 - 2g/g_max.
double gamma_weight(int g, int g_max);

struct SearchSolution {
    sysmodel::GlobalDecision decision;
    double fitness = 0.0;  // objective of the repaired decision
};

// Integer part: device i redraws its placement uniformly in {0..M} when
// gamma*d exceeds the stability ratio h[i][a_i] / sum_j h[i][j] (1/M for
// local devices). Continuous parts take independent scaled steps, clamped to
// their boxes.
SearchSolution h_mutation(const SearchSolution& target, const sysmodel::ChannelState& channel,
                          double gamma, const LevyParams& params,
                          const sysmodel::SystemConfig& config, std::mt19937_64& rng);

// Coordinate-wise mix: the candidate takes the mutant coordinate when
// gamma*d > th, the target coordinate otherwise. Fresh draws per coordinate.
SearchSolution levy_crossover(const SearchSolution& mutant, const SearchSolution& target,
                              double gamma, const LevyParams& params, std::mt19937_64& rng);

// Strictly-better candidate survives; ties keep the incumbent.
const SearchSolution& greedy_select(const SearchSolution& candidate,
                                    const SearchSolution& target);

// Clamps powers into [kPowerFloor, P_max], floors offloader compute shares,
// rescales any over-capacity MEC proportionally, and resets local devices to
// their fixed capacity/execution power. Feasible decisions pass through.
sysmodel::GlobalDecision repair(sysmodel::GlobalDecision decision,
                                const sysmodel::SystemConfig& config);

// Full search from an integer assignment with randomized continuous parts.
// Returns the best solution found; with g_max = 0 that is the repaired
// initialization.
SearchSolution levy_search(const std::vector<int>& a_init,
                           const sysmodel::ChannelState& channel,
                           const std::vector<sysmodel::Task>& tasks,
                           const sysmodel::SystemConfig& config, const LevyParams& params);

}  // namespace dirs::levy
