#include "dirs/levy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dirs::levy {

namespace {

constexpr double kDenominatorGuard = 1e-300;

double clamp(double v, double lo, double hi) {
    return std::min(std::max(v, lo), hi);
}

}  // namespace

void LevyParams::validate() const {
    // beta = 2 degenerates the printed sigma_u to zero, so the open interval.
    if (!(beta > 1.0 && beta < 2.0)) throw ConfigError("beta must lie in (1, 2)");
    if (!(th >= 0.0 && th <= 1.0)) throw ConfigError("th must lie in [0, 1]");
    if (g_max < 0) throw ConfigError("g_max must be non-negative");
    if (!(eta > 0.0)) throw ConfigError("eta must be positive");
}

double mantegna_sigma(double beta, bool standard) {
    const double exponent = standard ? (beta - 1.0) / 2.0 : (1.0 + beta) / 2.0;
    const double num = std::tgamma(1.0 + beta) * std::sin(std::numbers::pi * beta / 2.0);
    const double den = std::tgamma((1.0 + beta) / 2.0) * beta * std::pow(2.0, exponent);
    return std::pow(num / den, 1.0 / beta);
}

StepSampler::StepSampler(double beta, bool standard)
    : sigma_u_(mantegna_sigma(beta, standard)), inv_beta_(1.0 / beta) {}

double StepSampler::operator()(std::mt19937_64& rng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double u = sigma_u_ * gauss(rng);
    double v = gauss(rng);
    while (std::abs(v) < kDenominatorGuard) v = gauss(rng);
    return u / std::pow(std::abs(v), inv_beta_);
}

double sample_levy_step(double beta, std::mt19937_64& rng, bool standard) {
    return StepSampler(beta, standard)(rng);
}

double gamma_weight(int g, int g_max) {
    return 2.0 - 2.0 * static_cast<double>(g) / static_cast<double>(g_max);
}

SearchSolution h_mutation(const SearchSolution& target, const sysmodel::ChannelState& channel,
                          double gamma, const LevyParams& params,
                          const sysmodel::SystemConfig& config, std::mt19937_64& rng) {
    const std::size_t n = target.decision.size();
    const std::size_t m = config.n_mec;
    const StepSampler step(params.beta, params.standard_mantegna);
    std::uniform_int_distribution<int> random_place(0, static_cast<int>(m));
    const double eta_f = params.eta * config.f_mec_max;
    const double eta_p = params.eta * config.p_iotd_max;

    SearchSolution mutant = target;
    for (std::size_t i = 0; i < n; ++i) {
        double stability = 1.0;
        if (m > 0) {
            double row_sum = 0.0;
            for (std::size_t j = 0; j < m; ++j) row_sum += channel.gains(i, j);
            const int a = target.decision.assign[i];
            stability = a == 0 ? 1.0 / static_cast<double>(m)
                               : channel.gains(i, static_cast<std::size_t>(a) - 1) / row_sum;
        }
        if (gamma * step(rng) > stability)
            mutant.decision.assign[i] = random_place(rng);

        mutant.decision.f_alloc[i] =
            clamp(target.decision.f_alloc[i] + eta_f * step(rng), kComputeFloor,
                  config.f_mec_max);
        mutant.decision.p_alloc[i] =
            clamp(target.decision.p_alloc[i] + eta_p * step(rng), kPowerFloor,
                  config.p_iotd_max);
    }
    return mutant;
}

SearchSolution levy_crossover(const SearchSolution& mutant, const SearchSolution& target,
                              double gamma, const LevyParams& params, std::mt19937_64& rng) {
    const std::size_t n = target.decision.size();
    if (mutant.decision.size() != n) throw DimensionMismatch("mutant/target sizes disagree");
    const StepSampler step(params.beta, params.standard_mantegna);

    SearchSolution candidate = target;
    for (std::size_t i = 0; i < n; ++i) {
        if (gamma * step(rng) > params.th)
            candidate.decision.assign[i] = mutant.decision.assign[i];
        if (gamma * step(rng) > params.th)
            candidate.decision.f_alloc[i] = mutant.decision.f_alloc[i];
        if (gamma * step(rng) > params.th)
            candidate.decision.p_alloc[i] = mutant.decision.p_alloc[i];
    }
    return candidate;
}

const SearchSolution& greedy_select(const SearchSolution& candidate,
                                    const SearchSolution& target) {
    return candidate.fitness < target.fitness ? candidate : target;
}

sysmodel::GlobalDecision repair(sysmodel::GlobalDecision decision,
                                const sysmodel::SystemConfig& config) {
    const std::size_t n = decision.size();
    const double p_exec = sysmodel::local_exec_power(config);

    std::vector<double> mec_load(config.n_mec, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (decision.assign[i] == 0) {
            decision.f_alloc[i] = config.f_local;
            decision.p_alloc[i] = p_exec;
        } else {
            decision.f_alloc[i] = clamp(decision.f_alloc[i], kComputeFloor, config.f_mec_max);
            decision.p_alloc[i] = clamp(decision.p_alloc[i], kPowerFloor, config.p_iotd_max);
            mec_load[static_cast<std::size_t>(decision.assign[i]) - 1] += decision.f_alloc[i];
        }
    }
    for (std::size_t j = 0; j < config.n_mec; ++j) {
        if (mec_load[j] > config.f_mec_max) {
            const double scale = config.f_mec_max / mec_load[j];
            for (std::size_t i = 0; i < n; ++i)
                if (decision.assign[i] == static_cast<int>(j) + 1) decision.f_alloc[i] *= scale;
        }
    }
    return decision;
}

SearchSolution levy_search(const std::vector<int>& a_init,
                           const sysmodel::ChannelState& channel,
                           const std::vector<sysmodel::Task>& tasks,
                           const sysmodel::SystemConfig& config, const LevyParams& params) {
    params.validate();
    std::mt19937_64 rng(params.rng_seed);

    SearchSolution current;
    current.decision.assign = a_init;
    current.decision.f_alloc.resize(a_init.size());
    current.decision.p_alloc.resize(a_init.size());
    std::uniform_real_distribution<double> f_init(kComputeFloor, config.f_mec_max);
    std::uniform_real_distribution<double> p_init(kPowerFloor, config.p_iotd_max);
    for (std::size_t i = 0; i < a_init.size(); ++i) {
        current.decision.f_alloc[i] = f_init(rng);
        current.decision.p_alloc[i] = p_init(rng);
    }
    current.decision = repair(std::move(current.decision), config);
    current.fitness = sysmodel::evaluate(current.decision, tasks, channel, config).total;

    for (int g = 0; g < params.g_max; ++g) {
        const double gamma = gamma_weight(g, params.g_max);
        SearchSolution mutant = h_mutation(current, channel, gamma, params, config, rng);
        SearchSolution candidate = levy_crossover(mutant, current, gamma, params, rng);
        candidate.decision = repair(std::move(candidate.decision), config);
        candidate.fitness = sysmodel::evaluate(candidate.decision, tasks, channel, config).total;
        current = greedy_select(candidate, current);
    }
    return current;
}

}  // namespace dirs::levy
