#include "dirs/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <future>
#include <numeric>
#include <sstream>

#include "dirs/alloc.hpp"
#include "dirs/rng.hpp"

namespace dirs::harness {

namespace {

// Seed-stream tags for the independent RNGs of one run.
enum Stream : std::uint64_t {
    kAgentInit = 100,  // + agent index
    kDemoGen = 200,
    kPretrain = 300,
    kFading = 400,
    kTraining = 500,
    kBenchEval = 600,
    kBenchRandom = 700,
    kSweepPoint = 9000,  // + sweep value
};

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) /
                                 static_cast<double>(v.size());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Reverts assignees of over-subscribed MECs to local execution until every
// remaining share clears the compute floor. `pick` chooses the next device to
// revert among an MEC's assignees.
template <typename Pick>
void enforce_compute_floor(std::vector<int>& assign,
                           const std::vector<sysmodel::Task>& tasks,
                           const sysmodel::SystemConfig& config, Pick&& pick) {
    for (std::size_t j = 0; j < config.n_mec; ++j) {
        while (true) {
            std::vector<std::size_t> devices;
            std::vector<double> cycles;
            for (std::size_t i = 0; i < assign.size(); ++i) {
                if (assign[i] == static_cast<int>(j) + 1) {
                    devices.push_back(i);
                    cycles.push_back(tasks[i].cycles);
                }
            }
            if (devices.empty()) break;
            const auto shares = alloc::allocate_compute(cycles, config.f_mec_max);
            if (*std::min_element(shares.begin(), shares.end()) >= levy::kComputeFloor) break;
            assign[pick(devices)] = 0;
        }
    }
}

}  // namespace

Decision infer_once(const std::vector<neural::AgentNet>& agents,
                    const sysmodel::ChannelState& channel,
                    const std::vector<sysmodel::Task>& tasks,
                    const sysmodel::SystemConfig& config) {
    const auto parts = marl::partition_state(channel);
    std::vector<std::vector<double>> outputs(agents.size());
    for (std::size_t j = 0; j < agents.size(); ++j)
        outputs[j] = neural::forward(agents[j], marl::state_features(parts[j], config));
    const auto vote = marl::ensemble_vote(outputs);
    auto decision = alloc::assemble_decision(vote, tasks, channel, config);
    auto cost = sysmodel::evaluate(decision, tasks, channel, config);
    return {std::move(decision), std::move(cost)};
}

RunResult run_dirs(const ScenarioSpec& spec, const imitation::DemoSet* preloaded_demos) {
    spec.validate();
    const auto& config = spec.config;
    const auto tasks = spec.make_tasks();

    RunResult result{
        .metrics = {},
        .agents = {},
        .buffer = marl::PrioritizedBuffer(spec.buffer_capacity, spec.tau, spec.eps_agent,
                                          spec.eps_demo),
        .topology = sysmodel::make_topology(config, spec.topology_seed),
    };
    result.metrics.n_agents = config.n_mec;

    result.agents.reserve(config.n_mec);
    for (std::size_t j = 0; j < config.n_mec; ++j) {
        auto rng = make_rng(spec.seed, kAgentInit + j);
        result.agents.push_back(neural::make_agent(config.n_iotd, rng));
    }

    if (spec.demo_quantity > 0 || preloaded_demos) {
        const auto t0 = std::chrono::steady_clock::now();
        imitation::DemoSet generated;
        const imitation::DemoSet* demos = preloaded_demos;
        if (!demos) {
            generated = imitation::generate_demonstrations(
                spec.demo_quantity, config, result.topology, tasks, spec.demo_levy(),
                derive_seed(spec.seed, kDemoGen), spec.scenario_hash());
            demos = &generated;
        } else if (demos->scenario_hash != spec.scenario_hash()) {
            throw ConfigError("demonstration set was generated for a different scenario");
        }
        result.metrics.wall_demogen_s = seconds_since(t0);

        const auto t1 = std::chrono::steady_clock::now();
        auto rng = make_rng(spec.seed, kPretrain);
        result.metrics.pretrain =
            imitation::pretrain(result.agents, result.buffer, *demos, spec.t_d,
                                spec.batch_size, spec.lambda1, spec.learning_rate, config, rng);
        result.metrics.wall_pretrain_s = seconds_since(t1);
    }

    const auto t2 = std::chrono::steady_clock::now();
    auto fading_rng = make_rng(spec.seed, kFading);
    auto train_rng = make_rng(spec.seed, kTraining);
    marl::TrainStepConfig train_config{
        .batch_size = spec.batch_size,
        .lambda1 = spec.lambda1,
        .lambda2 = spec.lambda2,
        .learning_rate = spec.learning_rate,
    };
    sysmodel::Topology& topology = result.topology;

    result.metrics.slots.reserve(spec.t_drl);
    for (std::size_t t = 1; t <= spec.t_drl; ++t) {
        sysmodel::redraw_fading(topology, fading_rng);
        const auto channel = sysmodel::compute_channel(topology, config);

        const auto [decision, cost] = infer_once(result.agents, channel, tasks, config);
        result.metrics.slots.push_back({
            .slot = t,
            .objective = cost.total,
            .reward = sysmodel::reward(cost),
            .avg_time_s = mean(cost.per_device_time),
            .avg_energy_j = mean(cost.per_device_energy),
        });

        if (t % spec.train_interval == 0) {
            const auto step = marl::train_step(result.agents, result.buffer, channel, tasks,
                                               config, spec.online_levy(), train_config,
                                               train_rng);
            result.metrics.train_events.push_back({
                .slot = t,
                .agent_loss = step.agent_loss,
                .objective = step.objective,
                .reward = step.reward,
            });
        }
    }
    result.metrics.wall_online_s = seconds_since(t2);
    return result;
}

std::string metrics_csv(const RunMetrics& metrics) {
    std::ostringstream os;
    os << "slot,objective,reward,avg_time_s,avg_energy_j";
    for (std::size_t j = 1; j <= metrics.n_agents; ++j) os << ",loss_agent_" << j;
    os << "\n";

    std::size_t next_event = 0;
    for (const auto& slot : metrics.slots) {
        os << slot.slot << ',' << fmt(slot.objective) << ',' << fmt(slot.reward) << ','
           << fmt(slot.avg_time_s) << ',' << fmt(slot.avg_energy_j);
        if (next_event < metrics.train_events.size() &&
            metrics.train_events[next_event].slot == slot.slot) {
            for (double loss : metrics.train_events[next_event].agent_loss)
                os << ',' << fmt(loss);
            ++next_event;
        } else {
            for (std::size_t j = 0; j < metrics.n_agents; ++j) os << ',';
        }
        os << "\n";
    }
    return os.str();
}

Decision baseline_random(const sysmodel::ChannelState& channel,
                         const std::vector<sysmodel::Task>& tasks,
                         const sysmodel::SystemConfig& config, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> place(0, static_cast<int>(config.n_mec));
    std::vector<int> assign(tasks.size());
    for (auto& a : assign) a = place(rng);

    enforce_compute_floor(assign, tasks, config, [&](const std::vector<std::size_t>& devices) {
        std::uniform_int_distribution<std::size_t> pick(0, devices.size() - 1);
        return devices[pick(rng)];
    });

    auto decision = alloc::assemble_decision(assign, tasks, channel, config);
    auto cost = sysmodel::evaluate(decision, tasks, channel, config);
    return {std::move(decision), std::move(cost)};
}

Decision baseline_greedy(const sysmodel::Topology& topology,
                         const sysmodel::ChannelState& channel,
                         const std::vector<sysmodel::Task>& tasks,
                         const sysmodel::SystemConfig& config) {
    std::vector<int> assign(tasks.size(), 0);
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < config.n_mec; ++j) {
            const double dx = topology.mec_pos[j][0] - topology.iotd_pos[i][0];
            const double dy = topology.mec_pos[j][1] - topology.iotd_pos[i][1];
            const double d_sq = dx * dx + dy * dy;
            if (d_sq < best) {  // strict: equidistant ties keep the lowest index
                best = d_sq;
                assign[i] = static_cast<int>(j) + 1;
            }
        }
    }

    // The hungriest tasks go back to local execution first.
    enforce_compute_floor(assign, tasks, config, [&](const std::vector<std::size_t>& devices) {
        std::size_t fattest = devices.front();
        for (std::size_t i : devices)
            if (tasks[i].cycles > tasks[fattest].cycles) fattest = i;
        return fattest;
    });

    auto decision = alloc::assemble_decision(assign, tasks, channel, config);
    auto cost = sysmodel::evaluate(decision, tasks, channel, config);
    return {std::move(decision), std::move(cost)};
}

Decision baseline_local(const std::vector<sysmodel::Task>& tasks,
                        const sysmodel::SystemConfig& config) {
    const std::vector<int> assign(tasks.size(), 0);
    // The local branch never reads gains; a unit channel keeps dimensions valid.
    const sysmodel::ChannelState channel{Matrix::ones(tasks.size(), config.n_mec)};
    auto decision = alloc::assemble_decision(assign, tasks, channel, config);
    auto cost = sysmodel::evaluate(decision, tasks, channel, config);
    return {std::move(decision), std::move(cost)};
}

std::vector<BenchRow> bench_sweep(const ScenarioSpec& base, const std::string& param,
                                  const std::vector<std::size_t>& values,
                                  std::size_t draws) {
    if (param != "n_iotd" && param != "n_mec")
        throw ConfigError("sweep parameter must be n_iotd or n_mec");

    auto run_point = [&](std::size_t value) {
        ScenarioSpec spec = base;
        if (param == "n_iotd")
            spec.config.n_iotd = value;
        else
            spec.config.n_mec = value;
        spec.seed = derive_seed(base.seed, kSweepPoint + value);
        spec.topology_seed = derive_seed(base.topology_seed, kSweepPoint + value);
        spec.validate();

        auto trained = run_dirs(spec);
        const auto tasks = spec.make_tasks();
        auto fading_rng = make_rng(spec.seed, kBenchEval);
        auto random_rng = make_rng(spec.seed, kBenchRandom);

        const std::vector<std::string> methods = {"dirs", "random", "greedy", "local"};
        std::vector<BenchRow> rows(methods.size());
        for (std::size_t m = 0; m < methods.size(); ++m)
            rows[m] = {param, value, methods[m], 0.0, 0.0, 0.0};

        for (std::size_t d = 0; d < draws; ++d) {
            sysmodel::redraw_fading(trained.topology, fading_rng);
            const auto channel = sysmodel::compute_channel(trained.topology, spec.config);
            const Decision outcomes[] = {
                infer_once(trained.agents, channel, tasks, spec.config),
                baseline_random(channel, tasks, spec.config, random_rng),
                baseline_greedy(trained.topology, channel, tasks, spec.config),
                baseline_local(tasks, spec.config),
            };
            for (std::size_t m = 0; m < methods.size(); ++m) {
                const auto& cost = outcomes[m].second;
                rows[m].mean_objective += cost.total;
                rows[m].mean_time_s += mean(cost.per_device_time);
                rows[m].mean_energy_j += mean(cost.per_device_energy);
            }
        }
        for (auto& row : rows) {
            row.mean_objective /= static_cast<double>(draws);
            row.mean_time_s /= static_cast<double>(draws);
            row.mean_energy_j /= static_cast<double>(draws);
        }
        return rows;
    };

    // Points are independent; overlap their training runs.
    std::vector<std::future<std::vector<BenchRow>>> futures;
    futures.reserve(values.size());
    for (std::size_t value : values)
        futures.push_back(std::async(std::launch::async, run_point, value));

    std::vector<BenchRow> table;
    for (auto& f : futures)
        for (auto& row : f.get()) table.push_back(std::move(row));
    return table;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream os;
    os << "param,value,method,mean_objective,mean_time_s,mean_energy_j\n";
    for (const auto& row : rows)
        os << row.param << ',' << row.value << ',' << row.method << ','
           << fmt(row.mean_objective) << ',' << fmt(row.mean_time_s) << ','
           << fmt(row.mean_energy_j) << "\n";
    return os.str();
}

}  // namespace dirs::harness
