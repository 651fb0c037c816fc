#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dirs/errors.hpp"
#include "dirs/matrix.hpp"

// Physical model of the multi-server MEC system: channel gains, offloading
// rates, task latency/energy and the weighted objective, plus the feasibility
// checks shared by the search and the schedulers.

namespace dirs::sysmodel {

struct SystemConfig {
    std::size_t n_iotd = 30;    // N
    std::size_t n_mec = 2;      // M
    double bandwidth = 1e6;     // B, Hz per link
    double noise_density = 1e-12;  // sigma^2, W/Hz
    double beta0 = 1e-3;        // channel power gain at the 1 m reference distance
    double f_local = 1e9;       // local CPU capacity, cycles/s
    double kappa = 1e-27;       // effective switched capacitance
    double v_exp = 3.0;         // execution-power exponent
    double f_mec_max = 50e9;    // compute capacity per MEC, cycles/s
    double p_iotd_max = 1.5;    // transmit power cap per IoTD, W
    double phi_t = 0.5;         // latency weight
    double phi_e = 0.5;         // energy weight
    double area_side = 50.0;    // deployment square side, m
    double min_distance = 1.0;  // distance clamp guarding the path-loss singularity, m

    // The SNR uses noise power over the link bandwidth. Change this to
    // `return noise_density;` to read sigma^2 as a power instead.
    double noise_power() const { return noise_density * bandwidth; }

    void validate() const;  // throws ConfigError
};

struct Task {
    double cycles = 1e9;     // F_i
    double data_bits = 8e5;  // D_i
};

struct Topology {
    std::vector<std::array<double, 2>> iotd_pos;
    std::vector<std::array<double, 2>> mec_pos;
    Matrix fading;  // N x M small-scale factors, strictly positive
};

struct ChannelState {
    Matrix gains;  // N x M, h[i][j] > 0

    std::size_t n_iotd() const { return gains.rows(); }
    std::size_t n_mec() const { return gains.cols(); }
};

// One placement per device: assign[i] in {0..M} with 0 = local execution.
// f_alloc/p_alloc hold the compute share and transmit power for the chosen
// placement (local devices carry f_local and the local execution power).
struct GlobalDecision {
    std::vector<int> assign;
    std::vector<double> f_alloc;
    std::vector<double> p_alloc;

    std::size_t size() const { return assign.size(); }
};

struct CostBreakdown {
    std::vector<double> per_device_time;    // T_i, s
    std::vector<double> per_device_energy;  // E_i, J
    std::vector<double> per_device_cost;    // phi_t*T_i + phi_e*E_i
    double total = 0.0;
};

enum class Constraint {
    Placement,    // one valid placement per device
    MecCapacity,  // sum of compute shares within an MEC's capacity
    PowerLimit,   // transmit/execution power within the device cap
};

struct Violation {
    Constraint constraint;
    std::size_t index;  // device index, or MEC index for MecCapacity
    std::string detail;
};

// Uniform positions in the deployment square plus an initial fading draw.
Topology make_topology(const SystemConfig& config, std::uint64_t seed);

// Redraws every small-scale factor i.i.d. unit-mean exponential (Rayleigh
// power fading); called once per slot to make the channel time-varying.
void redraw_fading(Topology& topology, std::mt19937_64& rng);

ChannelState compute_channel(const Topology& topology, const SystemConfig& config);

// Shannon rate B*log2(1 + p*h/noise); p = 0 gives rate 0.
double data_rate(double p, double h, const SystemConfig& config);

// kappa * f_local^v
double local_exec_power(const SystemConfig& config);

// Evaluates the weighted latency+energy objective for one decision.
// Throws InfeasibleDecision when the decision violates the constraints or an
// offloader carries zero power/compute.
CostBreakdown evaluate(const GlobalDecision& decision, const std::vector<Task>& tasks,
                       const ChannelState& channel, const SystemConfig& config);

// Reciprocal objective; requires total > 0.
double reward(const CostBreakdown& cost);

// Empty iff the placement encoding, per-MEC capacity and power caps all hold.
std::vector<Violation> check_feasibility(const GlobalDecision& decision,
                                         const SystemConfig& config);

}  // namespace dirs::sysmodel
