#include "dirs/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "dirs/io.hpp"

namespace dirs::harness {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse number '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': cannot parse integer '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    std::string v = value;
    std::transform(v.begin(), v.end(), v.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key '" + key + "': cannot parse boolean '" + value + "'");
}

using Setter = std::function<void(ScenarioSpec&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"n_iotd", [](ScenarioSpec& s, auto& k, auto& v) { s.config.n_iotd = parse_u64(k, v); }},
        {"n_mec", [](ScenarioSpec& s, auto& k, auto& v) { s.config.n_mec = parse_u64(k, v); }},
        {"bandwidth", [](ScenarioSpec& s, auto& k, auto& v) { s.config.bandwidth = parse_double(k, v); }},
        {"noise_density", [](ScenarioSpec& s, auto& k, auto& v) { s.config.noise_density = parse_double(k, v); }},
        {"beta0", [](ScenarioSpec& s, auto& k, auto& v) { s.config.beta0 = parse_double(k, v); }},
        {"f_local", [](ScenarioSpec& s, auto& k, auto& v) { s.config.f_local = parse_double(k, v); }},
        {"kappa", [](ScenarioSpec& s, auto& k, auto& v) { s.config.kappa = parse_double(k, v); }},
        {"v_exp", [](ScenarioSpec& s, auto& k, auto& v) { s.config.v_exp = parse_double(k, v); }},
        {"f_mec_max", [](ScenarioSpec& s, auto& k, auto& v) { s.config.f_mec_max = parse_double(k, v); }},
        {"p_iotd_max", [](ScenarioSpec& s, auto& k, auto& v) { s.config.p_iotd_max = parse_double(k, v); }},
        {"phi_t", [](ScenarioSpec& s, auto& k, auto& v) { s.config.phi_t = parse_double(k, v); }},
        {"phi_e", [](ScenarioSpec& s, auto& k, auto& v) { s.config.phi_e = parse_double(k, v); }},
        {"area_side", [](ScenarioSpec& s, auto& k, auto& v) { s.config.area_side = parse_double(k, v); }},
        {"min_distance", [](ScenarioSpec& s, auto& k, auto& v) { s.config.min_distance = parse_double(k, v); }},
        {"task_cycles", [](ScenarioSpec& s, auto& k, auto& v) { s.task_cycles = parse_double(k, v); }},
        {"task_data_bits", [](ScenarioSpec& s, auto& k, auto& v) { s.task_data_bits = parse_double(k, v); }},
        {"topology_seed", [](ScenarioSpec& s, auto& k, auto& v) { s.topology_seed = parse_u64(k, v); }},
        {"seed", [](ScenarioSpec& s, auto& k, auto& v) { s.seed = parse_u64(k, v); }},
        {"t_drl", [](ScenarioSpec& s, auto& k, auto& v) { s.t_drl = parse_u64(k, v); }},
        {"train_interval", [](ScenarioSpec& s, auto& k, auto& v) { s.train_interval = parse_u64(k, v); }},
        {"t_d", [](ScenarioSpec& s, auto& k, auto& v) { s.t_d = parse_u64(k, v); }},
        {"demo_quantity", [](ScenarioSpec& s, auto& k, auto& v) { s.demo_quantity = parse_u64(k, v); }},
        {"lambda1", [](ScenarioSpec& s, auto& k, auto& v) { s.lambda1 = parse_double(k, v); }},
        {"lambda2", [](ScenarioSpec& s, auto& k, auto& v) { s.lambda2 = parse_double(k, v); }},
        {"eps_agent", [](ScenarioSpec& s, auto& k, auto& v) { s.eps_agent = parse_double(k, v); }},
        {"eps_demo", [](ScenarioSpec& s, auto& k, auto& v) { s.eps_demo = parse_double(k, v); }},
        {"tau", [](ScenarioSpec& s, auto& k, auto& v) { s.tau = parse_double(k, v); }},
        {"beta_online", [](ScenarioSpec& s, auto& k, auto& v) { s.beta_online = parse_double(k, v); }},
        {"beta_demo", [](ScenarioSpec& s, auto& k, auto& v) { s.beta_demo = parse_double(k, v); }},
        {"th", [](ScenarioSpec& s, auto& k, auto& v) { s.th = parse_double(k, v); }},
        {"g_max_online", [](ScenarioSpec& s, auto& k, auto& v) { s.g_max_online = static_cast<int>(parse_u64(k, v)); }},
        {"g_max_demo", [](ScenarioSpec& s, auto& k, auto& v) { s.g_max_demo = static_cast<int>(parse_u64(k, v)); }},
        {"eta", [](ScenarioSpec& s, auto& k, auto& v) { s.eta = parse_double(k, v); }},
        {"standard_mantegna", [](ScenarioSpec& s, auto& k, auto& v) { s.standard_mantegna = parse_bool(k, v); }},
        {"learning_rate", [](ScenarioSpec& s, auto& k, auto& v) { s.learning_rate = parse_double(k, v); }},
        {"batch_size", [](ScenarioSpec& s, auto& k, auto& v) { s.batch_size = parse_u64(k, v); }},
        {"buffer_capacity", [](ScenarioSpec& s, auto& k, auto& v) { s.buffer_capacity = parse_u64(k, v); }},
    };
    return table;
}

}  // namespace

void ScenarioSpec::validate() const {
    config.validate();
    if (task_cycles <= 0 || task_data_bits <= 0)
        throw ConfigError("task size fields must be positive");
    if (train_interval == 0) throw ConfigError("train_interval must be at least 1");
    if (batch_size == 0) throw ConfigError("batch_size must be at least 1");
    if (buffer_capacity == 0) throw ConfigError("buffer_capacity must be at least 1");
    if (demo_quantity + 1 >= buffer_capacity && demo_quantity > 0)
        throw ConfigError("demonstrations may not fill the replay buffer");
    if (lambda1 < 0 || lambda2 < 0) throw ConfigError("loss weights must be non-negative");
    if (eps_agent <= 0 || eps_demo <= 0) throw ConfigError("priority floors must be positive");
    if (tau < 0) throw ConfigError("tau must be non-negative");
    if (learning_rate <= 0) throw ConfigError("learning_rate must be positive");
    online_levy().validate();
    demo_levy().validate();
}

std::vector<sysmodel::Task> ScenarioSpec::make_tasks() const {
    return std::vector<sysmodel::Task>(config.n_iotd, {task_cycles, task_data_bits});
}

levy::LevyParams ScenarioSpec::online_levy() const {
    levy::LevyParams p;
    p.beta = beta_online;
    p.th = th;
    p.g_max = g_max_online;
    p.eta = eta;
    p.standard_mantegna = standard_mantegna;
    return p;
}

levy::LevyParams ScenarioSpec::demo_levy() const {
    levy::LevyParams p;
    p.beta = beta_demo;
    p.th = th;
    p.g_max = g_max_demo;
    p.eta = eta;
    p.standard_mantegna = standard_mantegna;
    return p;
}

std::uint64_t ScenarioSpec::scenario_hash() const {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "n=%zu;m=%zu;B=%.17g;sd=%.17g;b0=%.17g;fl=%.17g;k=%.17g;v=%.17g;"
                  "Fm=%.17g;Pm=%.17g;pt=%.17g;pe=%.17g;a=%.17g;md=%.17g;Fc=%.17g;Db=%.17g;ts=%llu",
                  config.n_iotd, config.n_mec, config.bandwidth, config.noise_density,
                  config.beta0, config.f_local, config.kappa, config.v_exp, config.f_mec_max,
                  config.p_iotd_max, config.phi_t, config.phi_e, config.area_side,
                  config.min_distance, task_cycles, task_data_bits,
                  static_cast<unsigned long long>(topology_seed));
    return io::fnv1a(buf);
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open scenario file: " + path.string());

    ScenarioSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end())
            throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        it->second(spec, key, value);
    }
    apply_env_overrides(spec);
    spec.validate();
    return spec;
}

ScenarioSpec scenario_defaults() {
    ScenarioSpec spec;
    apply_env_overrides(spec);
    spec.validate();
    return spec;
}

void apply_env_overrides(ScenarioSpec& spec) {
    for (const auto& [key, setter] : setters()) {
        std::string env_name = "DIRS_" + key;
        std::transform(env_name.begin(), env_name.end(), env_name.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (const char* value = std::getenv(env_name.c_str()))
            setter(spec, key, value);
    }
}

std::vector<std::string> scenario_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, setter] : setters()) keys.push_back(key);
    return keys;
}

}  // namespace dirs::harness
