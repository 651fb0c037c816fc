#include "dirs/neural.hpp"

#include <cmath>
#include <fstream>

#include "dirs/errors.hpp"
#include "dirs/io.hpp"

namespace dirs::neural {

namespace {

constexpr double kProbClip = 1e-7;

double sigmoid(double z) {
    return 1.0 / (1.0 + std::exp(-z));
}

// z = W*x + b
void affine(const Matrix& w, const std::vector<double>& b, const std::vector<double>& x,
            std::vector<double>& z) {
    z.assign(w.rows(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
        double acc = b[r];
        const double* row = w.data().data() + r * w.cols();
        for (std::size_t c = 0; c < w.cols(); ++c) acc += row[c] * x[c];
        z[r] = acc;
    }
}

// Layer activations for one input; the last entry holds output probabilities.
std::vector<std::vector<double>> run_layers(const AgentNet& net,
                                            const std::vector<double>& state) {
    if (state.size() != net.input_dim())
        throw DimensionMismatch("state length does not match network input");
    std::vector<std::vector<double>> acts(net.weights.size() + 1);
    acts[0] = state;
    std::vector<double> z;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        affine(net.weights[l], net.biases[l], acts[l], z);
        acts[l + 1].resize(z.size());
        const bool last = l + 1 == net.weights.size();
        for (std::size_t r = 0; r < z.size(); ++r)
            acts[l + 1][r] = last ? sigmoid(z[r]) : std::max(0.0, z[r]);
    }
    return acts;
}

Gradient zero_gradient(const AgentNet& net) {
    Gradient g;
    g.weights.reserve(net.weights.size());
    g.biases.reserve(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.weights.emplace_back(net.weights[l].rows(), net.weights[l].cols());
        g.biases.emplace_back(net.biases[l].size(), 0.0);
    }
    return g;
}

void adam_update(std::vector<double>& param, std::vector<double>& m, std::vector<double>& v,
                 const std::vector<double>& g, double lr, double beta1, double beta2,
                 double eps, double bc1, double bc2) {
    for (std::size_t i = 0; i < param.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
        param[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
}

}  // namespace

std::size_t AgentNet::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += weights[l].size() + biases[l].size();
    return n;
}

AgentNet make_net(const std::vector<std::size_t>& dims, std::mt19937_64& rng) {
    if (dims.size() < 2) throw ConfigError("network needs at least input and output layers");
    AgentNet net;
    net.layer_dims = dims;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l], fan_out = dims[l + 1];
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Matrix w(fan_out, fan_in);
        for (auto& x : w.data()) x = dist(rng);
        net.weights.push_back(std::move(w));
        net.biases.emplace_back(fan_out, 0.0);
        net.adam.m_w.emplace_back(fan_out, fan_in);
        net.adam.v_w.emplace_back(fan_out, fan_in);
        net.adam.m_b.emplace_back(fan_out, 0.0);
        net.adam.v_b.emplace_back(fan_out, 0.0);
    }
    return net;
}

AgentNet make_agent(std::size_t n_iotd, std::mt19937_64& rng) {
    return make_net({n_iotd, 30, 80, 60, n_iotd}, rng);
}

std::vector<double> forward(const AgentNet& net, const std::vector<double>& state) {
    return run_layers(net, state).back();
}

LossGrad loss_and_grad(const AgentNet& net, const Batch& batch, double lambda1,
                       double lambda2) {
    if (batch.size() == 0) throw Error("loss_and_grad needs a non-empty batch");
    if (batch.targets.size() != batch.size() || batch.is_demo.size() != batch.size())
        throw DimensionMismatch("batch rows disagree");

    std::size_t n_demo = 0;
    for (auto flag : batch.is_demo) n_demo += flag ? 1 : 0;
    const std::size_t n_agent = batch.size() - n_demo;
    const double demo_scale = n_demo ? 1.0 / static_cast<double>(n_demo) : 0.0;
    const double agent_scale = n_agent ? lambda2 / static_cast<double>(n_agent) : 0.0;

    LossGrad out;
    out.grad = zero_gradient(net);
    out.row_loss.resize(batch.size());

    const std::size_t n_layers = net.weights.size();
    std::vector<double> delta, prev_delta;
    for (std::size_t row = 0; row < batch.size(); ++row) {
        const auto acts = run_layers(net, batch.states[row]);
        const auto& probs = acts.back();
        const auto& target = batch.targets[row];
        if (target.size() != probs.size())
            throw DimensionMismatch("target width does not match network output");

        double bce = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            const double p = std::min(std::max(probs[i], kProbClip), 1.0 - kProbClip);
            bce -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
        }
        out.row_loss[row] = bce;
        const double row_scale = batch.is_demo[row] ? demo_scale : agent_scale;
        if (batch.is_demo[row])
            out.loss.demo += bce * demo_scale;
        else
            out.loss.agent += bce * (n_agent ? 1.0 / static_cast<double>(n_agent) : 0.0);
        if (row_scale == 0.0) continue;

        // Sigmoid + cross-entropy collapses to probs - target at the output.
        delta.resize(probs.size());
        for (std::size_t i = 0; i < probs.size(); ++i)
            delta[i] = (probs[i] - target[i]) * row_scale;

        for (std::size_t l = n_layers; l-- > 0;) {
            const auto& input = acts[l];
            auto& dw = out.grad.weights[l];
            auto& db = out.grad.biases[l];
            for (std::size_t r = 0; r < delta.size(); ++r) {
                db[r] += delta[r];
                double* dw_row = dw.data().data() + r * dw.cols();
                for (std::size_t c = 0; c < input.size(); ++c)
                    dw_row[c] += delta[r] * input[c];
            }
            if (l == 0) break;
            prev_delta.assign(net.weights[l].cols(), 0.0);
            for (std::size_t r = 0; r < delta.size(); ++r) {
                const double* w_row = net.weights[l].data().data() + r * net.weights[l].cols();
                for (std::size_t c = 0; c < prev_delta.size(); ++c)
                    prev_delta[c] += w_row[c] * delta[r];
            }
            // Rectifier derivative gates on the layer's activation.
            for (std::size_t c = 0; c < prev_delta.size(); ++c)
                if (acts[l][c] <= 0.0) prev_delta[c] = 0.0;
            delta = prev_delta;
        }
    }

    for (std::size_t l = 0; l < n_layers; ++l) {
        for (double w : net.weights[l].data()) out.loss.l2 += w * w;
        for (double b : net.biases[l]) out.loss.l2 += b * b;
        if (lambda1 != 0.0) {
            for (std::size_t k = 0; k < net.weights[l].size(); ++k)
                out.grad.weights[l].data()[k] += 2.0 * lambda1 * net.weights[l].data()[k];
            for (std::size_t k = 0; k < net.biases[l].size(); ++k)
                out.grad.biases[l][k] += 2.0 * lambda1 * net.biases[l][k];
        }
    }

    out.loss.total = out.loss.demo + lambda1 * out.loss.l2 + lambda2 * out.loss.agent;
    return out;
}

void adam_step(AgentNet& net, const Gradient& grad, double lr, double beta1, double beta2,
               double eps) {
    net.adam.step += 1;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(net.adam.step));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(net.adam.step));
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        adam_update(net.weights[l].data(), net.adam.m_w[l].data(), net.adam.v_w[l].data(),
                    grad.weights[l].data(), lr, beta1, beta2, eps, bc1, bc2);
        adam_update(net.biases[l], net.adam.m_b[l], net.adam.v_b[l], grad.biases[l], lr,
                    beta1, beta2, eps, bc1, bc2);
    }
}

std::vector<double> predict_action(const AgentNet& net, const std::vector<double>& state) {
    return forward(net, state);
}

std::vector<int> threshold_action(const std::vector<double>& probabilities) {
    std::vector<int> bits(probabilities.size());
    for (std::size_t i = 0; i < probabilities.size(); ++i)
        bits[i] = probabilities[i] >= 0.5 ? 1 : 0;
    return bits;
}

void save_net(std::ostream& os, const AgentNet& net) {
    io::write_tag(os, "DNET", 1);
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(net.layer_dims.size()));
    for (auto d : net.layer_dims) io::write_pod<std::uint64_t>(os, d);
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        io::write_f64_span(os, net.weights[l].data());
        io::write_f64_span(os, net.biases[l]);
    }
}

AgentNet load_net(std::istream& is) {
    const auto version = io::read_tag(is, "DNET");
    if (version != 1) throw IoError("unsupported network container version");
    const auto n_dims = io::read_pod<std::uint32_t>(is);
    std::vector<std::size_t> dims(n_dims);
    for (auto& d : dims) d = io::read_pod<std::uint64_t>(is);
    // Build shapes (and fresh optimizer state), then overwrite the parameters.
    std::mt19937_64 rng(0);
    AgentNet net = make_net(dims, rng);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        auto w = io::read_f64_span(is);
        auto b = io::read_f64_span(is);
        if (w.size() != net.weights[l].size() || b.size() != net.biases[l].size())
            throw IoError("network container shape mismatch");
        net.weights[l].data() = std::move(w);
        net.biases[l] = std::move(b);
    }
    return net;
}

void save_agents(const std::filesystem::path& path, const std::vector<AgentNet>& agents) {
    auto os = io::open_out(path);
    io::write_tag(os, "DAGT", 1);
    io::write_pod<std::uint32_t>(os, static_cast<std::uint32_t>(agents.size()));
    for (const auto& net : agents) save_net(os, net);
}

std::vector<AgentNet> load_agents(const std::filesystem::path& path) {
    auto is = io::open_in(path);
    const auto version = io::read_tag(is, "DAGT");
    if (version != 1) throw IoError("unsupported agent container version");
    const auto count = io::read_pod<std::uint32_t>(is);
    std::vector<AgentNet> agents;
    agents.reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) agents.push_back(load_net(is));
    return agents;
}

}  // namespace dirs::neural
