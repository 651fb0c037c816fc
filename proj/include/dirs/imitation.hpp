#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "dirs/marl.hpp"

// Demonstration generation and offline pretraining. Demonstrations are
// near-optimal (channel, placement) pairs produced by a wide Lévy search;
// pretraining clones them into every agent before any online interaction.

namespace dirs::imitation {

struct DemoEntry {
    sysmodel::ChannelState channel;
    std::vector<int> action;
    // Objective of the stored placement with solved continuous parts. Derived
    // data: recomputed on load rather than serialized.
    double objective = 0.0;
};

struct DemoSet {
    std::vector<DemoEntry> entries;
    levy::LevyParams generator_params;
    std::uint64_t scenario_hash = 0;

    std::size_t size() const { return entries.size(); }
};

// Each entry draws a fresh fading realization and runs the search from an
// all-local start. Entries use independent seed streams derived from `seed`.
DemoSet generate_demonstrations(std::size_t count, const sysmodel::SystemConfig& config,
                                const sysmodel::Topology& topology,
                                const std::vector<sysmodel::Task>& tasks,
                                const levy::LevyParams& params, std::uint64_t seed,
                                std::uint64_t scenario_hash = 0);

void save_demos(const std::filesystem::path& path, const DemoSet& demos);
// Loads entries; objectives are left unset until refresh_objectives.
DemoSet load_demos(const std::filesystem::path& path);
void refresh_objectives(DemoSet& demos, const std::vector<sysmodel::Task>& tasks,
                        const sysmodel::SystemConfig& config);

struct PretrainReport {
    std::vector<double> agent_accuracy;   // thresholded per-agent bit accuracy
    double ensemble_accuracy = 0.0;       // vote reproduces the stored placement
    std::vector<double> agent_final_loss;
    double initial_demo_loss = 0.0;  // mean demonstration loss before training
    double final_demo_loss = 0.0;    // and after
};

// Loads the demonstrations into the buffer (as persistent demo transitions)
// and runs t_d prioritized minibatch steps on the demonstration loss; the
// agent-data term is absent offline.
PretrainReport pretrain(std::vector<neural::AgentNet>& agents, marl::PrioritizedBuffer& buffer,
                        const DemoSet& demos, std::size_t t_d, std::size_t batch_size,
                        double lambda1, double learning_rate,
                        const sysmodel::SystemConfig& config, std::mt19937_64& rng);

// Fraction of (entry, device) placements where the ensemble vote matches the
// stored action.
double accuracy(const std::vector<neural::AgentNet>& agents, const DemoSet& demos,
                const sysmodel::SystemConfig& config);

// Mean demonstration loss (cross-entropy + lambda1 * L2, averaged over
// agents) over the full demo set; the pretraining progress metric.
double demo_loss(const std::vector<neural::AgentNet>& agents, const DemoSet& demos,
                 double lambda1, const sysmodel::SystemConfig& config);

}  // namespace dirs::imitation
