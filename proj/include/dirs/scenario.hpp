#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dirs/levy.hpp"
#include "dirs/sysmodel.hpp"

// Scenario configuration: every physical constant and pipeline hyperparameter
// in one validated record, loadable from a key = value file with environment
// overrides (DIRS_<KEY>).

namespace dirs::harness {

struct ScenarioSpec {
    sysmodel::SystemConfig config;

    double task_cycles = 1e9;     // F_i
    double task_data_bits = 8e5;  // D_i (100 kB)

    std::uint64_t topology_seed = 1;
    std::uint64_t seed = 1;  // master seed for everything else

    std::size_t t_drl = 3000;         // online slots
    std::size_t train_interval = 10;  // training every this many slots
    std::size_t t_d = 1000;           // pretraining minibatch steps
    std::size_t demo_quantity = 256;  // 0 skips the imitation stage

    double lambda1 = 1e-4;  // L2 weight
    double lambda2 = 0.5;   // agent-data loss weight
    double eps_agent = 0.08;
    double eps_demo = 0.02;
    double tau = 0.6;

    double beta_online = 1.5;
    double beta_demo = 1.1;
    double th = 0.5;
    int g_max_online = 100;  // 0 disables online action refinement
    int g_max_demo = 400;
    double eta = 0.05;
    bool standard_mantegna = false;

    double learning_rate = 1e-3;
    std::size_t batch_size = 256;
    std::size_t buffer_capacity = 1024;

    void validate() const;  // throws ConfigError

    std::vector<sysmodel::Task> make_tasks() const;
    levy::LevyParams online_levy() const;
    levy::LevyParams demo_levy() const;

    // Fingerprint of the instance-defining fields (physical constants, task
    // shape, topology seed); embedded in demonstration files.
    std::uint64_t scenario_hash() const;
};

// Defaults overlaid with the file's keys, then environment overrides.
// Unknown or malformed keys raise ConfigError.
ScenarioSpec load_scenario(const std::filesystem::path& path);

// Defaults plus environment overrides only.
ScenarioSpec scenario_defaults();

// Applies DIRS_<KEY> environment variables in place.
void apply_env_overrides(ScenarioSpec& spec);

// The accepted key names, for documentation and the CLI.
std::vector<std::string> scenario_keys();

}  // namespace dirs::harness
