#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "dirs/levy.hpp"
#include "dirs/neural.hpp"
#include "dirs/sysmodel.hpp"

// Multi-agent ensemble machinery: each agent sees only its own channel
// column, a maximum vote consolidates the per-agent sigmoid outputs into one
// global placement, and a prioritized replay buffer feeds the shared
// centralized training step.

namespace dirs::marl {

// Agent j's observation: column j of the gain matrix.
std::vector<std::vector<double>> partition_state(const sysmodel::ChannelState& channel);

// Network inputs: per-device spectral efficiency at full power,
// log2(1 + h * P_max / noise). Monotone per element, so locality and the
// information content of the raw column are preserved while the magnitudes
// land in a trainable range.
std::vector<double> state_features(const std::vector<double>& h_column,
                                   const sysmodel::SystemConfig& config);

// Per device: the agent with the highest output wins if it clears 0.5,
// otherwise the device runs locally. Ties go to the lowest MEC index.
std::vector<int> ensemble_vote(const std::vector<std::vector<double>>& agent_outputs);

struct Transition {
    sysmodel::ChannelState state;
    std::vector<int> target;  // global placement a*
    bool is_demo = false;
    double weight = 0.0;      // sampling priority w
    double last_row_loss = 0.0;
    bool visited = false;     // whether last_row_loss holds a recorded value
    std::uint64_t seq = 0;    // insertion order, for FIFO overwrite
};

class PrioritizedBuffer {
public:
    explicit PrioritizedBuffer(std::size_t capacity = 1024, double tau = 0.6,
                               double eps_agent = 0.08, double eps_demo = 0.02);

    // New transitions enter at the current maximum priority. A full buffer
    // overwrites its oldest agent-generated slot; demonstrations are never
    // evicted, and may not occupy every slot.
    void push(sysmodel::ChannelState state, std::vector<int> target, bool is_demo);

    // P_i = w_i^tau / sum_k w_k^tau over the stored transitions.
    std::vector<double> sampling_probabilities() const;

    // batch_size indices drawn with replacement by priority.
    std::vector<std::size_t> sample_batch(std::size_t batch_size, std::mt19937_64& rng) const;

    // w_i <- |loss - previous recorded loss| + eps (eps per provenance);
    // first visit uses the raw loss. Duplicate ids are applied once.
    void update_priorities(const std::vector<std::size_t>& ids,
                           const std::vector<double>& mean_row_loss);

    std::size_t size() const { return transitions_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t demo_count() const { return demo_count_; }
    double tau() const { return tau_; }
    double eps_agent() const { return eps_agent_; }
    double eps_demo() const { return eps_demo_; }
    const Transition& transition(std::size_t i) const { return transitions_[i]; }

    void save(std::ostream& os) const;
    static PrioritizedBuffer load(std::istream& is);

private:
    std::size_t capacity_;
    double tau_, eps_agent_, eps_demo_;
    std::vector<Transition> transitions_;
    std::size_t demo_count_ = 0;
    std::uint64_t next_seq_ = 0;
};

// The per-agent supervised view of sampled transitions: featurized own
// column, indicator targets (bit i set iff the stored placement sends device
// i to this agent's MEC), original demo/agent provenance.
neural::Batch agent_batch(const PrioritizedBuffer& buffer,
                          const std::vector<std::size_t>& ids, std::size_t agent_index,
                          const sysmodel::SystemConfig& config);

struct TrainStepConfig {
    std::size_t batch_size = 256;
    double lambda1 = 1e-4;
    double lambda2 = 0.5;
    double learning_rate = 1e-3;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainStepMetrics {
    std::vector<double> agent_loss;  // composite loss per agent at this step
    std::vector<int> stored_action;  // a* pushed to the buffer
    double objective = 0.0;          // objective of a* with solved continuous parts
    double reward = 0.0;             // reciprocal objective
};

// One centralized round: vote over local inferences, refine by Lévy search,
// store the pair, sample by priority, update every agent, refresh priorities.
TrainStepMetrics train_step(std::vector<neural::AgentNet>& agents, PrioritizedBuffer& buffer,
                            const sysmodel::ChannelState& channel,
                            const std::vector<sysmodel::Task>& tasks,
                            const sysmodel::SystemConfig& config,
                            const levy::LevyParams& levy_params,
                            const TrainStepConfig& train_config, std::mt19937_64& rng);

}  // namespace dirs::marl
