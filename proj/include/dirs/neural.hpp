#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <vector>

#include "dirs/matrix.hpp"

// The per-agent network: a fully-connected stack with rectifier hidden
// layers and a sigmoid output per device, trained with hand-derived
// gradients of the demonstration/agent cross-entropy composite and Adam.

namespace dirs::neural {

struct AdamState {
    std::vector<Matrix> m_w, v_w;
    std::vector<std::vector<double>> m_b, v_b;
    long step = 0;
};

struct AgentNet {
    std::vector<std::size_t> layer_dims;         // [input, hidden..., output]
    std::vector<Matrix> weights;                 // weights[l]: dims[l+1] x dims[l]
    std::vector<std::vector<double>> biases;
    AdamState adam;

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    std::size_t parameter_count() const;
};

// Glorot-uniform initialization, seeded.
AgentNet make_net(const std::vector<std::size_t>& dims, std::mt19937_64& rng);

// The agent stack: hidden widths 30/80/60 with input and output sized to the
// device count.
AgentNet make_agent(std::size_t n_iotd, std::mt19937_64& rng);

struct Batch {
    std::vector<std::vector<double>> states;   // one feature row per transition
    std::vector<std::vector<double>> targets;  // binary rows, same width as the output
    std::vector<std::uint8_t> is_demo;

    std::size_t size() const { return states.size(); }
};

// Probabilities in (0,1) per output.
std::vector<double> forward(const AgentNet& net, const std::vector<double>& state);

struct Gradient {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;
};

struct LossTerms {
    double total = 0.0;
    double demo = 0.0;   // mean demonstration-row cross-entropy
    double agent = 0.0;  // mean agent-row cross-entropy
    double l2 = 0.0;     // squared parameter norm
};

struct LossGrad {
    LossTerms loss;
    Gradient grad;
    std::vector<double> row_loss;  // raw per-row cross-entropy, for priorities
};

// total = demo + lambda1 * l2 + lambda2 * agent; the gradient is exact for
// this composite. Probabilities are clipped to [1e-7, 1 - 1e-7] inside the
// logs only.
LossGrad loss_and_grad(const AgentNet& net, const Batch& batch, double lambda1,
                       double lambda2);

void adam_step(AgentNet& net, const Gradient& grad, double lr = 1e-3, double beta1 = 0.9,
               double beta2 = 0.999, double eps = 1e-8);

// Raw output probabilities; thresholding belongs to the ensemble vote.
std::vector<double> predict_action(const AgentNet& net, const std::vector<double>& state);

// Convenience binarization, probability >= 0.5 maps to 1.
std::vector<int> threshold_action(const std::vector<double>& probabilities);

// Versioned flat container: layer dims then row-major weights and biases per
// layer, little-endian doubles. Round-trips bit-identically.
void save_net(std::ostream& os, const AgentNet& net);
AgentNet load_net(std::istream& is);
void save_agents(const std::filesystem::path& path, const std::vector<AgentNet>& agents);
std::vector<AgentNet> load_agents(const std::filesystem::path& path);

}  // namespace dirs::neural
