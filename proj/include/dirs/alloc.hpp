#pragma once

#include <cstddef>
#include <vector>

#include "dirs/sysmodel.hpp"

// Continuous resource allocation for a fixed offloading vector. The per-MEC
// sub-problem separates: each assignee's transmit power minimizes a 1-D
// objective on (0, P_max], and the compute split has a closed-form minimizer
// under the capacity budget. A grid-search oracle backs both in the tests.

namespace dirs::alloc {

struct Assignee {
    sysmodel::Task task;
    double gain;  // h between this device and the MEC being solved
};

struct MecAllocation {
    std::vector<double> f;  // compute share per assignee, cycles/s
    std::vector<double> p;  // transmit power per assignee, W
    double cost = 0.0;      // weighted objective contribution of the assignees
};

// argmin over p in (0, P_max] of (phi_t + phi_e*p) * D / rate(p).
// Golden-section search; the objective is unimodal on the feasible interval.
double optimize_power(const sysmodel::Task& task, double gain,
                      const sysmodel::SystemConfig& config);

// Splits `budget` cycles/s across tasks minimizing sum F_i/f_i: the KKT
// minimizer allocates proportionally to sqrt(F_i) and exhausts the budget.
std::vector<double> allocate_compute(const std::vector<double>& cycles, double budget);

MecAllocation solve_mec_subproblem(const std::vector<Assignee>& assignees,
                                   const sysmodel::SystemConfig& config);

struct GridResolution {
    double p_step = 1e-4;        // W
    std::size_t f_points = 100;  // simplex grid points per compute dimension
};

// Exhaustive grid minimizer over the compute simplex and the power interval.
// Test oracle; throws OracleScale beyond 3 assignees.
MecAllocation brute_force_alloc(const std::vector<Assignee>& assignees,
                                const sysmodel::SystemConfig& config,
                                const GridResolution& resolution = {});

// Objective contribution of one MEC's assignees under a given allocation.
double allocation_cost(const std::vector<Assignee>& assignees, const std::vector<double>& f,
                       const std::vector<double>& p, const sysmodel::SystemConfig& config);

// Builds the full decision for an integer assignment: per-MEC solve for the
// offloaders, local capacity and execution power for the rest.
sysmodel::GlobalDecision assemble_decision(const std::vector<int>& assign,
                                           const std::vector<sysmodel::Task>& tasks,
                                           const sysmodel::ChannelState& channel,
                                           const sysmodel::SystemConfig& config);

}  // namespace dirs::alloc
