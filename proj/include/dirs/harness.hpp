#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dirs/imitation.hpp"
#include "dirs/scenario.hpp"

// End-to-end orchestration: imitation pretraining, the online
// training/inference loop, the benchmark baselines and parameter sweeps, and
// the metrics CSV export.

namespace dirs::harness {

struct SlotRecord {
    std::size_t slot = 0;      // 1-based
    double objective = 0.0;    // total weighted cost of the inference decision
    double reward = 0.0;
    double avg_time_s = 0.0;   // mean per-device latency
    double avg_energy_j = 0.0; // mean per-device energy
};

struct TrainRecord {
    std::size_t slot = 0;
    std::vector<double> agent_loss;
    double objective = 0.0;  // of the refined action stored at this step
    double reward = 0.0;
};

struct RunMetrics {
    std::vector<SlotRecord> slots;
    std::vector<TrainRecord> train_events;
    imitation::PretrainReport pretrain;
    std::size_t n_agents = 0;
    double wall_demogen_s = 0.0;
    double wall_pretrain_s = 0.0;
    double wall_online_s = 0.0;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<neural::AgentNet> agents;
    marl::PrioritizedBuffer buffer;
    sysmodel::Topology topology;
};

// The full pipeline: agent/buffer initialization, demonstration generation
// (unless a pre-generated set is supplied) and pretraining, then the online
// loop with decentralized inference every slot and centralized training every
// train_interval slots. demo_quantity = 0 skips the imitation stage.
RunResult run_dirs(const ScenarioSpec& spec,
                   const imitation::DemoSet* preloaded_demos = nullptr);

// Header plus one row per slot; training-event loss columns are filled on the
// slots where training ran and left empty elsewhere.
std::string metrics_csv(const RunMetrics& metrics);

using Decision = std::pair<sysmodel::GlobalDecision, sysmodel::CostBreakdown>;

// Decentralized path only: per-agent local inference, vote, per-MEC
// continuous solve. No search, no global state.
Decision infer_once(const std::vector<neural::AgentNet>& agents,
                    const sysmodel::ChannelState& channel,
                    const std::vector<sysmodel::Task>& tasks,
                    const sysmodel::SystemConfig& config);

// Uniform placements; devices revert to local (picked at random) while an
// MEC's share would fall below the compute floor.
Decision baseline_random(const sysmodel::ChannelState& channel,
                         const std::vector<sysmodel::Task>& tasks,
                         const sysmodel::SystemConfig& config, std::mt19937_64& rng);

// Nearest MEC per device (ties to the lowest index); the largest tasks revert
// to local first while a floor violation remains.
Decision baseline_greedy(const sysmodel::Topology& topology,
                         const sysmodel::ChannelState& channel,
                         const std::vector<sysmodel::Task>& tasks,
                         const sysmodel::SystemConfig& config);

// Everything executes locally.
Decision baseline_local(const std::vector<sysmodel::Task>& tasks,
                        const sysmodel::SystemConfig& config);

struct BenchRow {
    std::string param;
    std::size_t value = 0;
    std::string method;
    double mean_objective = 0.0;
    double mean_time_s = 0.0;
    double mean_energy_j = 0.0;
};

// For each sweep value: train the pipeline on that scenario, then evaluate
// the trained policy and the three baselines on `draws` fresh channel
// realizations shared across methods. param is "n_iotd" or "n_mec".
std::vector<BenchRow> bench_sweep(const ScenarioSpec& base, const std::string& param,
                                  const std::vector<std::size_t>& values,
                                  std::size_t draws = 100);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace dirs::harness
