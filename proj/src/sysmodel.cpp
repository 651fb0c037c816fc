#include "dirs/sysmodel.hpp"

#include <cmath>
#include <sstream>

namespace dirs::sysmodel {

namespace {

// Relative slack for the per-MEC capacity check; proportional rescaling in
// the repair step can land exactly on the cap up to rounding.
constexpr double kCapacitySlack = 1e-9;

void require(bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
}

}  // namespace

void SystemConfig::validate() const {
    require(n_iotd > 0, "n_iotd must be positive");
    require(bandwidth > 0, "bandwidth must be positive");
    require(noise_density > 0, "noise_density must be positive");
    require(beta0 > 0, "beta0 must be positive");
    require(f_local > 0, "f_local must be positive");
    require(kappa >= 0, "kappa must be non-negative");
    require(v_exp >= 1, "v_exp must be at least 1");
    require(f_mec_max > 0, "f_mec_max must be positive");
    require(p_iotd_max > 0, "p_iotd_max must be positive");
    require(phi_t >= 0 && phi_e >= 0 && phi_t + phi_e > 0,
            "objective weights must be non-negative with positive sum");
    require(area_side > 0, "area_side must be positive");
    require(min_distance > 0, "min_distance must be positive");
}

Topology make_topology(const SystemConfig& config, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.0, config.area_side);

    Topology topo;
    topo.iotd_pos.resize(config.n_iotd);
    topo.mec_pos.resize(config.n_mec);
    for (auto& p : topo.iotd_pos) p = {coord(rng), coord(rng)};
    for (auto& p : topo.mec_pos) p = {coord(rng), coord(rng)};
    topo.fading = Matrix(config.n_iotd, config.n_mec);
    redraw_fading(topo, rng);
    return topo;
}

void redraw_fading(Topology& topology, std::mt19937_64& rng) {
    std::exponential_distribution<double> exp1(1.0);
    for (auto& l : topology.fading.data()) {
        do {
            l = exp1(rng);
        } while (l <= 0.0);  // zero draws would break the gain positivity invariant
    }
}

ChannelState compute_channel(const Topology& topology, const SystemConfig& config) {
    const std::size_t n = topology.iotd_pos.size();
    const std::size_t m = topology.mec_pos.size();
    if (topology.fading.rows() != n || topology.fading.cols() != m)
        throw DimensionMismatch("fading matrix does not match topology");

    const double min_sq = config.min_distance * config.min_distance;
    ChannelState channel{Matrix(n, m)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double dx = topology.mec_pos[j][0] - topology.iotd_pos[i][0];
            const double dy = topology.mec_pos[j][1] - topology.iotd_pos[i][1];
            const double d_sq = std::max(dx * dx + dy * dy, min_sq);
            channel.gains(i, j) = config.beta0 * topology.fading(i, j) / d_sq;
        }
    }
    return channel;
}

double data_rate(double p, double h, const SystemConfig& config) {
    if (p <= 0.0) return 0.0;
    return config.bandwidth * std::log2(1.0 + p * h / config.noise_power());
}

double local_exec_power(const SystemConfig& config) {
    return config.kappa * std::pow(config.f_local, config.v_exp);
}

CostBreakdown evaluate(const GlobalDecision& decision, const std::vector<Task>& tasks,
                       const ChannelState& channel, const SystemConfig& config) {
    const std::size_t n = decision.size();
    if (tasks.size() != n || decision.f_alloc.size() != n || decision.p_alloc.size() != n)
        throw DimensionMismatch("decision/task sizes disagree");
    if (n > 0 && (channel.n_iotd() != n))
        throw DimensionMismatch("channel does not match device count");

    if (auto v = check_feasibility(decision, config); !v.empty())
        throw InfeasibleDecision("decision violates constraints: " + v.front().detail);

    CostBreakdown out;
    out.per_device_time.resize(n);
    out.per_device_energy.resize(n);
    out.per_device_cost.resize(n);

    const double p_exec = local_exec_power(config);
    for (std::size_t i = 0; i < n; ++i) {
        double t = 0.0, e = 0.0;
        if (decision.assign[i] == 0) {
            t = tasks[i].cycles / config.f_local;
            e = t * p_exec;
        } else {
            const std::size_t j = static_cast<std::size_t>(decision.assign[i]) - 1;
            const double p = decision.p_alloc[i];
            const double f = decision.f_alloc[i];
            if (p <= 0.0 || f <= 0.0)
                throw InfeasibleDecision("offloading device has zero power or compute share");
            const double r = data_rate(p, channel.gains(i, j), config);
            const double t_tx = tasks[i].data_bits / r;
            t = t_tx + tasks[i].cycles / f;
            e = p * t_tx;
        }
        out.per_device_time[i] = t;
        out.per_device_energy[i] = e;
        out.per_device_cost[i] = config.phi_t * t + config.phi_e * e;
        out.total += out.per_device_cost[i];
    }
    return out;
}

double reward(const CostBreakdown& cost) {
    return 1.0 / cost.total;
}

std::vector<Violation> check_feasibility(const GlobalDecision& decision,
                                         const SystemConfig& config) {
    std::vector<Violation> out;
    const int m = static_cast<int>(config.n_mec);
    const double p_exec = local_exec_power(config);

    std::vector<double> mec_load(config.n_mec, 0.0);
    for (std::size_t i = 0; i < decision.size(); ++i) {
        const int a = decision.assign[i];
        if (a < 0 || a > m) {
            std::ostringstream msg;
            msg << "device " << i << " assigned to invalid placement " << a;
            out.push_back({Constraint::Placement, i, msg.str()});
            continue;
        }
        if (a == 0) {
            if (p_exec > config.p_iotd_max) {
                std::ostringstream msg;
                msg << "device " << i << " local execution power " << p_exec
                    << " W exceeds cap " << config.p_iotd_max << " W";
                out.push_back({Constraint::PowerLimit, i, msg.str()});
            }
            continue;
        }
        mec_load[static_cast<std::size_t>(a) - 1] += decision.f_alloc[i];
        const double p = decision.p_alloc[i];
        if (p <= 0.0 || p > config.p_iotd_max) {
            std::ostringstream msg;
            msg << "device " << i << " transmit power " << p << " W outside (0, "
                << config.p_iotd_max << "]";
            out.push_back({Constraint::PowerLimit, i, msg.str()});
        }
    }

    for (std::size_t j = 0; j < config.n_mec; ++j) {
        if (mec_load[j] > config.f_mec_max * (1.0 + kCapacitySlack)) {
            std::ostringstream msg;
            msg << "MEC " << (j + 1) << " compute load " << mec_load[j] << " exceeds capacity "
                << config.f_mec_max;
            out.push_back({Constraint::MecCapacity, j, msg.str()});
        }
    }
    return out;
}

}  // namespace dirs::sysmodel
