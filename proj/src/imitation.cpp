#include "dirs/imitation.hpp"

#include <cmath>

#include "dirs/alloc.hpp"
#include "dirs/io.hpp"
#include "dirs/rng.hpp"

namespace dirs::imitation {

namespace {

double entry_objective(const DemoEntry& entry, const std::vector<sysmodel::Task>& tasks,
                       const sysmodel::SystemConfig& config) {
    const auto solved = alloc::assemble_decision(entry.action, tasks, entry.channel, config);
    return sysmodel::evaluate(solved, tasks, entry.channel, config).total;
}

neural::Batch demo_batch_for_agent(const DemoSet& demos, std::size_t agent_index,
                                   const sysmodel::SystemConfig& config) {
    neural::Batch batch;
    for (const auto& entry : demos.entries) {
        const std::size_t n = entry.channel.n_iotd();
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = entry.channel.gains(i, agent_index);
        batch.states.push_back(marl::state_features(column, config));
        std::vector<double> target(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            target[i] = entry.action[i] == static_cast<int>(agent_index) + 1 ? 1.0 : 0.0;
        batch.targets.push_back(std::move(target));
        batch.is_demo.push_back(1);
    }
    return batch;
}

}  // namespace

DemoSet generate_demonstrations(std::size_t count, const sysmodel::SystemConfig& config,
                                const sysmodel::Topology& topology,
                                const std::vector<sysmodel::Task>& tasks,
                                const levy::LevyParams& params, std::uint64_t seed,
                                std::uint64_t scenario_hash) {
    if (count == 0) throw ConfigError("demonstration count must be at least 1");

    DemoSet demos;
    demos.generator_params = params;
    demos.scenario_hash = scenario_hash;
    demos.entries.resize(count);

    const std::vector<int> all_local(config.n_iotd, 0);
    sysmodel::Topology working = topology;
    for (std::size_t e = 0; e < count; ++e) {
        auto fading_rng = make_rng(seed, 2 * e);
        sysmodel::redraw_fading(working, fading_rng);
        DemoEntry& entry = demos.entries[e];
        entry.channel = sysmodel::compute_channel(working, config);

        levy::LevyParams entry_params = params;
        entry_params.rng_seed = derive_seed(seed, 2 * e + 1);
        const auto best =
            levy::levy_search(all_local, entry.channel, tasks, config, entry_params);
        entry.action = best.decision.assign;
        entry.objective = entry_objective(entry, tasks, config);
    }
    return demos;
}

void save_demos(const std::filesystem::path& path, const DemoSet& demos) {
    auto os = io::open_out(path);
    io::write_tag(os, "DDEM", 1);
    io::write_pod<std::uint64_t>(os, demos.scenario_hash);
    io::write_pod<double>(os, demos.generator_params.beta);
    io::write_pod<double>(os, demos.generator_params.th);
    io::write_pod<std::int32_t>(os, demos.generator_params.g_max);
    io::write_pod<double>(os, demos.generator_params.eta);
    io::write_pod<std::uint8_t>(os, demos.generator_params.standard_mantegna ? 1 : 0);
    io::write_pod<std::uint64_t>(os, demos.entries.size());
    if (demos.entries.empty()) return;
    io::write_pod<std::uint64_t>(os, demos.entries.front().channel.gains.rows());
    io::write_pod<std::uint64_t>(os, demos.entries.front().channel.gains.cols());
    for (const auto& entry : demos.entries) {
        io::write_f64_span(os, entry.channel.gains.data());
        io::write_i32_span(os, entry.action);
    }
}

DemoSet load_demos(const std::filesystem::path& path) {
    auto is = io::open_in(path);
    const auto version = io::read_tag(is, "DDEM");
    if (version != 1) throw IoError("unsupported demonstration container version");
    DemoSet demos;
    demos.scenario_hash = io::read_pod<std::uint64_t>(is);
    demos.generator_params.beta = io::read_pod<double>(is);
    demos.generator_params.th = io::read_pod<double>(is);
    demos.generator_params.g_max = io::read_pod<std::int32_t>(is);
    demos.generator_params.eta = io::read_pod<double>(is);
    demos.generator_params.standard_mantegna = io::read_pod<std::uint8_t>(is) != 0;
    const auto count = io::read_pod<std::uint64_t>(is);
    if (count == 0) return demos;
    const auto rows = io::read_pod<std::uint64_t>(is);
    const auto cols = io::read_pod<std::uint64_t>(is);
    demos.entries.resize(count);
    for (auto& entry : demos.entries) {
        entry.channel.gains = Matrix(rows, cols);
        entry.channel.gains.data() = io::read_f64_span(is);
        if (entry.channel.gains.data().size() != rows * cols)
            throw IoError("demonstration channel size mismatch");
        entry.action = io::read_i32_span(is);
        if (entry.action.size() != rows) throw IoError("demonstration action size mismatch");
    }
    return demos;
}

void refresh_objectives(DemoSet& demos, const std::vector<sysmodel::Task>& tasks,
                        const sysmodel::SystemConfig& config) {
    for (auto& entry : demos.entries) entry.objective = entry_objective(entry, tasks, config);
}

PretrainReport pretrain(std::vector<neural::AgentNet>& agents, marl::PrioritizedBuffer& buffer,
                        const DemoSet& demos, std::size_t t_d, std::size_t batch_size,
                        double lambda1, double learning_rate,
                        const sysmodel::SystemConfig& config, std::mt19937_64& rng) {
    if (demos.entries.empty()) throw ConfigError("pretraining needs demonstrations");

    for (const auto& entry : demos.entries)
        buffer.push(entry.channel, entry.action, /*is_demo=*/true);

    PretrainReport report;
    report.initial_demo_loss = demo_loss(agents, demos, lambda1, config);
    report.agent_final_loss.assign(agents.size(), 0.0);

    std::vector<double> mean_row_loss;
    for (std::size_t step = 0; step < t_d; ++step) {
        const auto ids = buffer.sample_batch(batch_size, rng);
        mean_row_loss.assign(ids.size(), 0.0);
        for (std::size_t j = 0; j < agents.size(); ++j) {
            const auto batch = marl::agent_batch(buffer, ids, j, config);
            // Offline loss: demonstration term plus regularizer only.
            auto lg = neural::loss_and_grad(agents[j], batch, lambda1, /*lambda2=*/0.0);
            neural::adam_step(agents[j], lg.grad, learning_rate);
            report.agent_final_loss[j] = lg.loss.total;
            for (std::size_t k = 0; k < ids.size(); ++k)
                mean_row_loss[k] += lg.row_loss[k] / static_cast<double>(agents.size());
        }
        buffer.update_priorities(ids, mean_row_loss);
    }

    report.final_demo_loss = demo_loss(agents, demos, lambda1, config);
    report.agent_accuracy.assign(agents.size(), 0.0);
    const std::size_t n = config.n_iotd;
    for (std::size_t j = 0; j < agents.size(); ++j) {
        const auto batch = demo_batch_for_agent(demos, j, config);
        std::size_t hits = 0;
        for (std::size_t k = 0; k < batch.size(); ++k) {
            const auto bits =
                neural::threshold_action(neural::forward(agents[j], batch.states[k]));
            for (std::size_t i = 0; i < n; ++i)
                hits += bits[i] == static_cast<int>(batch.targets[k][i]) ? 1 : 0;
        }
        report.agent_accuracy[j] =
            static_cast<double>(hits) / static_cast<double>(demos.size() * n);
    }
    report.ensemble_accuracy = accuracy(agents, demos, config);
    return report;
}

double accuracy(const std::vector<neural::AgentNet>& agents, const DemoSet& demos,
                const sysmodel::SystemConfig& config) {
    if (demos.entries.empty()) return 0.0;
    std::size_t hits = 0, total = 0;
    std::vector<std::vector<double>> outputs(agents.size());
    for (const auto& entry : demos.entries) {
        const auto parts = marl::partition_state(entry.channel);
        for (std::size_t j = 0; j < agents.size(); ++j)
            outputs[j] = neural::forward(agents[j], marl::state_features(parts[j], config));
        const auto vote = marl::ensemble_vote(outputs);
        for (std::size_t i = 0; i < vote.size(); ++i) {
            hits += vote[i] == entry.action[i] ? 1 : 0;
            ++total;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(total);
}

double demo_loss(const std::vector<neural::AgentNet>& agents, const DemoSet& demos,
                 double lambda1, const sysmodel::SystemConfig& config) {
    double sum = 0.0;
    for (std::size_t j = 0; j < agents.size(); ++j) {
        const auto batch = demo_batch_for_agent(demos, j, config);
        // Gradient unused; the loss terms are what we are after.
        const auto lg = neural::loss_and_grad(agents[j], batch, lambda1, 0.0);
        sum += lg.loss.total;
    }
    return sum / static_cast<double>(agents.size());
}

}  // namespace dirs::imitation
