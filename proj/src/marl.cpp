#include "dirs/marl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirs/alloc.hpp"
#include "dirs/io.hpp"

namespace dirs::marl {

std::vector<std::vector<double>> partition_state(const sysmodel::ChannelState& channel) {
    std::vector<std::vector<double>> parts(channel.n_mec());
    for (std::size_t j = 0; j < channel.n_mec(); ++j) {
        parts[j].resize(channel.n_iotd());
        for (std::size_t i = 0; i < channel.n_iotd(); ++i) parts[j][i] = channel.gains(i, j);
    }
    return parts;
}

std::vector<double> state_features(const std::vector<double>& h_column,
                                   const sysmodel::SystemConfig& config) {
    std::vector<double> features(h_column.size());
    const double scale = config.p_iotd_max / config.noise_power();
    for (std::size_t i = 0; i < h_column.size(); ++i)
        features[i] = std::log2(1.0 + h_column[i] * scale);
    return features;
}

std::vector<int> ensemble_vote(const std::vector<std::vector<double>>& agent_outputs) {
    if (agent_outputs.empty()) return {};
    const std::size_t n = agent_outputs.front().size();
    for (const auto& out : agent_outputs)
        if (out.size() != n) throw DimensionMismatch("agent output widths disagree");

    std::vector<int> action(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        double best = -std::numeric_limits<double>::infinity();
        int best_j = 0;
        for (std::size_t j = 0; j < agent_outputs.size(); ++j) {
            if (agent_outputs[j][i] > best) {  // strict: ties keep the lowest index
                best = agent_outputs[j][i];
                best_j = static_cast<int>(j) + 1;
            }
        }
        action[i] = best >= 0.5 ? best_j : 0;
    }
    return action;
}

PrioritizedBuffer::PrioritizedBuffer(std::size_t capacity, double tau, double eps_agent,
                                     double eps_demo)
    : capacity_(capacity), tau_(tau), eps_agent_(eps_agent), eps_demo_(eps_demo) {
    if (capacity == 0) throw ConfigError("buffer capacity must be positive");
    if (tau < 0) throw ConfigError("prioritization exponent must be non-negative");
    if (eps_agent <= 0 || eps_demo <= 0) throw ConfigError("priority floors must be positive");
    transitions_.reserve(capacity);
}

void PrioritizedBuffer::push(sysmodel::ChannelState state, std::vector<int> target,
                             bool is_demo) {
    if (is_demo && demo_count_ + 1 >= capacity_)
        throw BufferSaturated("demonstrations may not fill the replay buffer");

    // Current maximum priority, so the newcomer is sampled at least once.
    double w = transitions_.empty() ? 1.0 : 0.0;
    for (const auto& t : transitions_) w = std::max(w, t.weight);

    Transition incoming;
    incoming.state = std::move(state);
    incoming.target = std::move(target);
    incoming.is_demo = is_demo;
    incoming.weight = w;
    incoming.seq = next_seq_++;

    if (transitions_.size() < capacity_) {
        transitions_.push_back(std::move(incoming));
    } else {
        // Overwrite the oldest agent-generated slot.
        std::size_t victim = transitions_.size();
        std::uint64_t oldest = std::numeric_limits<std::uint64_t>::max();
        for (std::size_t k = 0; k < transitions_.size(); ++k) {
            if (!transitions_[k].is_demo && transitions_[k].seq < oldest) {
                oldest = transitions_[k].seq;
                victim = k;
            }
        }
        if (victim == transitions_.size())
            throw BufferSaturated("replay buffer full of demonstrations");
        transitions_[victim] = std::move(incoming);
    }
    if (is_demo) ++demo_count_;
}

std::vector<double> PrioritizedBuffer::sampling_probabilities() const {
    std::vector<double> probs(transitions_.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < transitions_.size(); ++k) {
        probs[k] = std::pow(transitions_[k].weight, tau_);
        sum += probs[k];
    }
    for (auto& p : probs) p /= sum;
    return probs;
}

std::vector<std::size_t> PrioritizedBuffer::sample_batch(std::size_t batch_size,
                                                         std::mt19937_64& rng) const {
    if (transitions_.empty()) throw Error("cannot sample from an empty buffer");
    const auto probs = sampling_probabilities();
    std::discrete_distribution<std::size_t> pick(probs.begin(), probs.end());
    std::vector<std::size_t> ids(batch_size);
    for (auto& id : ids) id = pick(rng);
    return ids;
}

void PrioritizedBuffer::update_priorities(const std::vector<std::size_t>& ids,
                                          const std::vector<double>& mean_row_loss) {
    if (ids.size() != mean_row_loss.size())
        throw DimensionMismatch("ids/losses length mismatch");
    std::vector<bool> seen(transitions_.size(), false);
    for (std::size_t k = 0; k < ids.size(); ++k) {
        const std::size_t id = ids[k];
        if (seen[id]) continue;
        seen[id] = true;
        Transition& t = transitions_[id];
        const double delta = t.visited ? mean_row_loss[k] - t.last_row_loss : mean_row_loss[k];
        const double eps = t.is_demo ? eps_demo_ : eps_agent_;
        t.weight = std::abs(delta) + eps;
        t.last_row_loss = mean_row_loss[k];
        t.visited = true;
    }
}

void PrioritizedBuffer::save(std::ostream& os) const {
    io::write_tag(os, "DBUF", 1);
    io::write_pod<std::uint64_t>(os, capacity_);
    io::write_pod<double>(os, tau_);
    io::write_pod<double>(os, eps_agent_);
    io::write_pod<double>(os, eps_demo_);
    io::write_pod<std::uint64_t>(os, next_seq_);
    io::write_pod<std::uint64_t>(os, transitions_.size());
    for (const auto& t : transitions_) {
        io::write_pod<std::uint64_t>(os, t.state.gains.rows());
        io::write_pod<std::uint64_t>(os, t.state.gains.cols());
        io::write_f64_span(os, t.state.gains.data());
        io::write_i32_span(os, t.target);
        io::write_pod<std::uint8_t>(os, t.is_demo ? 1 : 0);
        io::write_pod<double>(os, t.weight);
        io::write_pod<double>(os, t.last_row_loss);
        io::write_pod<std::uint8_t>(os, t.visited ? 1 : 0);
        io::write_pod<std::uint64_t>(os, t.seq);
    }
}

PrioritizedBuffer PrioritizedBuffer::load(std::istream& is) {
    const auto version = io::read_tag(is, "DBUF");
    if (version != 1) throw IoError("unsupported buffer container version");
    const auto capacity = io::read_pod<std::uint64_t>(is);
    const double tau = io::read_pod<double>(is);
    const double eps_agent = io::read_pod<double>(is);
    const double eps_demo = io::read_pod<double>(is);
    PrioritizedBuffer buffer(capacity, tau, eps_agent, eps_demo);
    buffer.next_seq_ = io::read_pod<std::uint64_t>(is);
    const auto count = io::read_pod<std::uint64_t>(is);
    for (std::uint64_t k = 0; k < count; ++k) {
        Transition t;
        const auto rows = io::read_pod<std::uint64_t>(is);
        const auto cols = io::read_pod<std::uint64_t>(is);
        t.state.gains = Matrix(rows, cols);
        t.state.gains.data() = io::read_f64_span(is);
        if (t.state.gains.data().size() != rows * cols)
            throw IoError("buffer container state size mismatch");
        t.target = io::read_i32_span(is);
        t.is_demo = io::read_pod<std::uint8_t>(is) != 0;
        t.weight = io::read_pod<double>(is);
        t.last_row_loss = io::read_pod<double>(is);
        t.visited = io::read_pod<std::uint8_t>(is) != 0;
        t.seq = io::read_pod<std::uint64_t>(is);
        if (t.is_demo) ++buffer.demo_count_;
        buffer.transitions_.push_back(std::move(t));
    }
    return buffer;
}

neural::Batch agent_batch(const PrioritizedBuffer& buffer,
                          const std::vector<std::size_t>& ids, std::size_t agent_index,
                          const sysmodel::SystemConfig& config) {
    neural::Batch batch;
    batch.states.reserve(ids.size());
    batch.targets.reserve(ids.size());
    batch.is_demo.reserve(ids.size());
    for (std::size_t id : ids) {
        const Transition& t = buffer.transition(id);
        const std::size_t n = t.state.n_iotd();
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = t.state.gains(i, agent_index);
        batch.states.push_back(state_features(column, config));
        std::vector<double> target(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            target[i] = t.target[i] == static_cast<int>(agent_index) + 1 ? 1.0 : 0.0;
        batch.targets.push_back(std::move(target));
        batch.is_demo.push_back(t.is_demo ? 1 : 0);
    }
    return batch;
}

TrainStepMetrics train_step(std::vector<neural::AgentNet>& agents, PrioritizedBuffer& buffer,
                            const sysmodel::ChannelState& channel,
                            const std::vector<sysmodel::Task>& tasks,
                            const sysmodel::SystemConfig& config,
                            const levy::LevyParams& levy_params,
                            const TrainStepConfig& train_config, std::mt19937_64& rng) {
    // Local inferences and the consolidated vote.
    const auto parts = partition_state(channel);
    std::vector<std::vector<double>> outputs(agents.size());
    for (std::size_t j = 0; j < agents.size(); ++j)
        outputs[j] = neural::forward(agents[j], state_features(parts[j], config));
    const std::vector<int> vote = ensemble_vote(outputs);

    // Action refinement from the vote; each step gets its own search stream.
    levy::LevyParams search_params = levy_params;
    search_params.rng_seed = rng();
    const levy::SearchSolution refined =
        levy::levy_search(vote, channel, tasks, config, search_params);

    buffer.push(channel, refined.decision.assign, /*is_demo=*/false);

    TrainStepMetrics metrics;
    metrics.stored_action = refined.decision.assign;
    const auto solved =
        alloc::assemble_decision(refined.decision.assign, tasks, channel, config);
    metrics.objective = sysmodel::evaluate(solved, tasks, channel, config).total;
    metrics.reward = 1.0 / metrics.objective;

    // One prioritized batch shared by all agents, each seeing its own view.
    const auto ids = buffer.sample_batch(train_config.batch_size, rng);
    metrics.agent_loss.resize(agents.size());
    std::vector<double> mean_row_loss(ids.size(), 0.0);
    for (std::size_t j = 0; j < agents.size(); ++j) {
        const auto batch = agent_batch(buffer, ids, j, config);
        auto lg = neural::loss_and_grad(agents[j], batch, train_config.lambda1,
                                        train_config.lambda2);
        neural::adam_step(agents[j], lg.grad, train_config.learning_rate,
                          train_config.adam_beta1, train_config.adam_beta2,
                          train_config.adam_eps);
        metrics.agent_loss[j] = lg.loss.total;
        for (std::size_t k = 0; k < ids.size(); ++k)
            mean_row_loss[k] += lg.row_loss[k] / static_cast<double>(agents.size());
    }
    buffer.update_priorities(ids, mean_row_loss);
    return metrics;
}

}  // namespace dirs::marl
