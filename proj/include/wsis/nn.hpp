#pragma once

#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "wsis/rng.hpp"

namespace wsis::nn {

// Output-layer squashing.  `bounded` maps through a sigmoid onto [lo, hi]
// per dimension; `symmetric_bounded` maps through tanh onto the same
// interval (centred, so lo = -hi gives the classic tanh-scaled actor head).
enum class OutputActivation { identity, bounded, symmetric_bounded };

// Fully-connected ReLU network, 64-bit floats throughout.  Value-like: copy
// freely, no shared state.
struct MlpNetwork {
    std::vector<int> layer_sizes;              // input, hidden..., output
    std::vector<Eigen::MatrixXd> weights;      // [l]: (size[l+1] x size[l])
    std::vector<Eigen::VectorXd> biases;       // [l]: (size[l+1])
    OutputActivation output_activation = OutputActivation::identity;
    Eigen::VectorXd out_lo, out_hi;            // used by bounded activations

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    void validate() const;
};

// Pre- and post-activation values retained by forward for exact backprop.
// Columns are batch samples.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;  // z_l per layer
    std::vector<Eigen::MatrixXd> post; // post[0] = input, post[l+1] = act(z_l)
};

struct Gradients {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_biases;

    static Gradients zeros_like(const MlpNetwork& net);
    void scale(double factor);
    void axpy(double factor, const Gradients& other); // this += factor * other
};

// Adaptive-moment optimizer state; one per network.
struct OptimizerState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    long step = 0;
    std::vector<Eigen::MatrixXd> m_weights, v_weights;
    std::vector<Eigen::VectorXd> m_biases, v_biases;

    static OptimizerState for_network(const MlpNetwork& net, double learning_rate);
};

// Uniform +-1/sqrt(fan_in) init; the final layer's parameters are multiplied
// by final_layer_scale (1e-3 for actors keeps the initial policy near zero).
MlpNetwork make_mlp(const std::vector<int>& layer_sizes, OutputActivation activation,
                    const Eigen::VectorXd& out_lo, const Eigen::VectorXd& out_hi,
                    Rng& init_rng, double final_layer_scale = 1.0);

// Batched forward pass; columns of `input` are samples.  Pass a cache to
// enable backward.
Eigen::MatrixXd forward(const MlpNetwork& net, const Eigen::MatrixXd& input,
                        ForwardCache* cache = nullptr);
Eigen::VectorXd forward1(const MlpNetwork& net, const Eigen::VectorXd& input,
                         ForwardCache* cache = nullptr);

// Exact reverse-mode gradients for dL/d(output).  Returns dL/d(input) and
// fills `grads` (summed over the batch; divide by batch size for means).
Eigen::MatrixXd backward(const MlpNetwork& net, const ForwardCache& cache,
                         const Eigen::MatrixXd& output_gradient, Gradients& grads);

// One adaptive-moment step; maximize=true ascends instead of descending.
void apply_gradients(MlpNetwork& net, OptimizerState& opt, const Gradients& grads,
                     bool maximize = false);

// target <- tau * source + (1 - tau) * target, parameter-wise.
void soft_update(MlpNetwork& target, const MlpNetwork& source, double tau);

// Exact-round-trip text checkpoint (hex floats).
void save_network(const MlpNetwork& net, const std::filesystem::path& path);
MlpNetwork load_network(const std::filesystem::path& path);

} // namespace wsis::nn
