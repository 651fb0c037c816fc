#include "dirs/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dirs::alloc {

namespace {

constexpr int kGoldenIterations = 60;  // shrinks the bracket below 1e-12 * P_max
constexpr double kPowerLow = 1e-9;     // open lower end of the power interval

double power_objective(double p, const sysmodel::Task& task, double gain,
                       const sysmodel::SystemConfig& config) {
    const double r = sysmodel::data_rate(p, gain, config);
    return (config.phi_t + config.phi_e * p) * task.data_bits / r;
}

}  // namespace

double optimize_power(const sysmodel::Task& task, double gain,
                      const sysmodel::SystemConfig& config) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = kPowerLow;
    double b = config.p_iotd_max;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = power_objective(x1, task, gain, config);
    double f2 = power_objective(x2, task, gain, config);
    for (int it = 0; it < kGoldenIterations; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = power_objective(x1, task, gain, config);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = power_objective(x2, task, gain, config);
        }
    }
    const double mid = 0.5 * (a + b);
    // The cap itself can be the minimizer (e.g. zero energy weight); keep it
    // if the interior estimate does not beat it.
    return power_objective(config.p_iotd_max, task, gain, config) <=
                   power_objective(mid, task, gain, config)
               ? config.p_iotd_max
               : mid;
}

std::vector<double> allocate_compute(const std::vector<double>& cycles, double budget) {
    std::vector<double> f(cycles.size());
    if (cycles.empty()) return f;
    double sum_sqrt = 0.0;
    for (double c : cycles) sum_sqrt += std::sqrt(c);
    for (std::size_t i = 0; i < cycles.size(); ++i)
        f[i] = budget * std::sqrt(cycles[i]) / sum_sqrt;
    return f;
}

double allocation_cost(const std::vector<Assignee>& assignees, const std::vector<double>& f,
                       const std::vector<double>& p, const sysmodel::SystemConfig& config) {
    double cost = 0.0;
    for (std::size_t i = 0; i < assignees.size(); ++i) {
        const double r = sysmodel::data_rate(p[i], assignees[i].gain, config);
        const double t_tx = assignees[i].task.data_bits / r;
        cost += config.phi_t * (t_tx + assignees[i].task.cycles / f[i]) +
                config.phi_e * p[i] * t_tx;
    }
    return cost;
}

MecAllocation solve_mec_subproblem(const std::vector<Assignee>& assignees,
                                   const sysmodel::SystemConfig& config) {
    MecAllocation out;
    if (assignees.empty()) return out;

    std::vector<double> cycles(assignees.size());
    for (std::size_t i = 0; i < assignees.size(); ++i) cycles[i] = assignees[i].task.cycles;
    out.f = allocate_compute(cycles, config.f_mec_max);

    out.p.resize(assignees.size());
    for (std::size_t i = 0; i < assignees.size(); ++i)
        out.p[i] = optimize_power(assignees[i].task, assignees[i].gain, config);

    out.cost = allocation_cost(assignees, out.f, out.p, config);
    return out;
}

MecAllocation brute_force_alloc(const std::vector<Assignee>& assignees,
                                const sysmodel::SystemConfig& config,
                                const GridResolution& resolution) {
    const std::size_t k = assignees.size();
    if (k > 3) throw OracleScale("brute-force allocation oracle caps at 3 assignees");

    MecAllocation best;
    if (k == 0) return best;

    // Power terms are additive across assignees, so a per-assignee sweep over
    // the power grid is exhaustive for the joint power choice.
    std::vector<double> p_best(k);
    std::vector<double> tx_cost(k);  // (phi_t + phi_e p) D / r at the best grid power
    for (std::size_t i = 0; i < k; ++i) {
        double best_val = std::numeric_limits<double>::infinity();
        for (double p = resolution.p_step; p <= config.p_iotd_max + 1e-15;
             p += resolution.p_step) {
            const double val = power_objective(p, assignees[i].task, assignees[i].gain, config);
            if (val < best_val) {
                best_val = val;
                p_best[i] = p;
            }
        }
        tx_cost[i] = best_val;
    }

    const double tx_total = tx_cost[0] + (k > 1 ? tx_cost[1] : 0.0) + (k > 2 ? tx_cost[2] : 0.0);

    // Enumerate the compute split on the capacity simplex.
    const std::size_t g = resolution.f_points;
    const double unit = config.f_mec_max / static_cast<double>(g);
    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> f_best(k);

    auto compute_cost = [&](const std::vector<double>& f) {
        double c = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (f[i] <= 0.0) return std::numeric_limits<double>::infinity();
            c += config.phi_t * assignees[i].task.cycles / f[i];
        }
        return c;
    };

    std::vector<double> f(k);
    if (k == 1) {
        f[0] = config.f_mec_max;
        best_cost = compute_cost(f);
        f_best = f;
    } else if (k == 2) {
        for (std::size_t a = 1; a < g; ++a) {
            f[0] = unit * static_cast<double>(a);
            f[1] = config.f_mec_max - f[0];
            const double c = compute_cost(f);
            if (c < best_cost) {
                best_cost = c;
                f_best = f;
            }
        }
    } else {
        for (std::size_t a = 1; a + 1 < g; ++a) {
            for (std::size_t b = 1; a + b < g; ++b) {
                f[0] = unit * static_cast<double>(a);
                f[1] = unit * static_cast<double>(b);
                f[2] = config.f_mec_max - f[0] - f[1];
                const double c = compute_cost(f);
                if (c < best_cost) {
                    best_cost = c;
                    f_best = f;
                }
            }
        }
    }

    best.f = f_best;
    best.p = p_best;
    best.cost = tx_total + best_cost;
    return best;
}

sysmodel::GlobalDecision assemble_decision(const std::vector<int>& assign,
                                           const std::vector<sysmodel::Task>& tasks,
                                           const sysmodel::ChannelState& channel,
                                           const sysmodel::SystemConfig& config) {
    const std::size_t n = assign.size();
    if (tasks.size() != n) throw DimensionMismatch("assignment/task sizes disagree");

    sysmodel::GlobalDecision decision;
    decision.assign = assign;
    decision.f_alloc.assign(n, config.f_local);
    decision.p_alloc.assign(n, sysmodel::local_exec_power(config));

    for (std::size_t j = 0; j < config.n_mec; ++j) {
        std::vector<Assignee> assignees;
        std::vector<std::size_t> devices;
        for (std::size_t i = 0; i < n; ++i) {
            if (assign[i] == static_cast<int>(j) + 1) {
                assignees.push_back({tasks[i], channel.gains(i, j)});
                devices.push_back(i);
            }
        }
        const MecAllocation sol = solve_mec_subproblem(assignees, config);
        for (std::size_t k = 0; k < devices.size(); ++k) {
            decision.f_alloc[devices[k]] = sol.f[k];
            decision.p_alloc[devices[k]] = sol.p[k];
        }
    }
    return decision;
}

}  // namespace dirs::alloc
