// Command-line front end: demonstration generation, full training runs,
// single-shot inference with trained weights, and benchmark sweeps.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dirs/alloc.hpp"
#include "dirs/harness.hpp"
#include "dirs/io.hpp"
#include "dirs/rng.hpp"

namespace fs = std::filesystem;
using namespace dirs;

namespace {

harness::ScenarioSpec load_spec(const std::string& config_path,
                                std::optional<std::uint64_t> seed) {
    auto spec = config_path.empty() ? harness::scenario_defaults()
                                    : harness::load_scenario(config_path);
    if (seed) {
        spec.seed = *seed;
        spec.validate();
    }
    return spec;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path.string());
    os << text;
}

void print_breakdown(const sysmodel::GlobalDecision& decision,
                     const sysmodel::CostBreakdown& cost) {
    std::printf("%6s %9s %12s %12s %12s %12s\n", "device", "placement", "f_cycles_s", "p_watt",
                "time_s", "energy_j");
    for (std::size_t i = 0; i < decision.size(); ++i) {
        std::printf("%6zu %9d %12.4g %12.4g %12.6f %12.6f\n", i, decision.assign[i],
                    decision.f_alloc[i], decision.p_alloc[i], cost.per_device_time[i],
                    cost.per_device_energy[i]);
    }
    std::printf("total objective: %.6f   reward: %.6f\n", cost.total,
                sysmodel::reward(cost));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed intelligent resource scheduling for multi-server MEC"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    app.add_option("--config", config_path, "scenario file (key = value)")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "override the master seed");
    app.add_option("--out", out_dir, "output directory");

    auto* demo_gen = app.add_subcommand("demo-gen", "generate a demonstration set");
    std::size_t demo_count = 0;
    demo_gen->add_option("--count", demo_count, "entries to generate (default: demo_quantity)");

    auto* train = app.add_subcommand("train", "run the full pipeline, write weights + metrics");
    std::string demos_path;
    train->add_option("--demos", demos_path, "pre-generated demonstration file")
        ->check(CLI::ExistingFile);

    auto* infer = app.add_subcommand("infer", "one decentralized decision from trained weights");
    std::string weights_path;
    infer->add_option("--weights", weights_path, "agent weights file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* bench = app.add_subcommand("bench", "baseline comparison sweep, write CSV");
    std::string sweep_param = "n_iotd";
    std::vector<std::size_t> sweep_values = {30};
    std::size_t draws = 100;
    bench->add_option("--param", sweep_param, "sweep parameter: n_iotd or n_mec");
    bench->add_option("--values", sweep_values, "sweep values")->delimiter(',');
    bench->add_option("--draws", draws, "channel draws per point");

    CLI11_PARSE(app, argc, argv);

    try {
        const auto spec = load_spec(config_path, seed);
        fs::create_directories(out_dir);

        if (*demo_gen) {
            const auto count = demo_count ? demo_count : spec.demo_quantity;
            const auto topology = sysmodel::make_topology(spec.config, spec.topology_seed);
            const auto demos = imitation::generate_demonstrations(
                count, spec.config, topology, spec.make_tasks(), spec.demo_levy(),
                derive_seed(spec.seed, 200), spec.scenario_hash());
            const auto path = fs::path(out_dir) / "demos.bin";
            imitation::save_demos(path, demos);
            std::printf("wrote %zu demonstrations to %s\n", demos.size(),
                        path.string().c_str());
        } else if (*train) {
            std::optional<imitation::DemoSet> demos;
            if (!demos_path.empty()) demos = imitation::load_demos(demos_path);
            const auto result = harness::run_dirs(spec, demos ? &*demos : nullptr);
            const auto weights = fs::path(out_dir) / "weights.bin";
            const auto metrics = fs::path(out_dir) / "metrics.csv";
            neural::save_agents(weights, result.agents);
            write_text(metrics, harness::metrics_csv(result.metrics));
            std::printf("pretrain accuracy: %.4f\n", result.metrics.pretrain.ensemble_accuracy);
            if (!result.metrics.slots.empty())
                std::printf("final objective: %.6f\n",
                            result.metrics.slots.back().objective);
            std::printf("wrote %s and %s\n", weights.string().c_str(),
                        metrics.string().c_str());
        } else if (*infer) {
            const auto agents = neural::load_agents(weights_path);
            if (agents.size() != spec.config.n_mec)
                throw ConfigError("weights file holds a different number of agents");
            auto topology = sysmodel::make_topology(spec.config, spec.topology_seed);
            auto rng = make_rng(spec.seed, 400);
            sysmodel::redraw_fading(topology, rng);
            const auto channel = sysmodel::compute_channel(topology, spec.config);
            const auto [decision, cost] =
                harness::infer_once(agents, channel, spec.make_tasks(), spec.config);
            print_breakdown(decision, cost);
        } else if (*bench) {
            const auto rows = harness::bench_sweep(spec, sweep_param, sweep_values, draws);
            const auto path = fs::path(out_dir) / "bench.csv";
            write_text(path, harness::bench_csv(rows));
            std::printf("%s", harness::bench_csv(rows).c_str());
            std::printf("wrote %s\n", path.string().c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
