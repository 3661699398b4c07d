#include "wsis/nn.hpp"

#include <cmath>
#include <string>

#include "wsis/errors.hpp"
#include "wsis/textio.hpp"

namespace wsis::nn {

namespace {

void check_finite_sizes(const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw ConfigError("network needs at least input and output layers");
    for (int s : sizes)
        if (s < 1) throw ConfigError("layer sizes must be positive");
}

// Output activation value and its derivative w.r.t. the pre-activation,
// both elementwise over (dim x batch) matrices.
Eigen::MatrixXd squash(const MlpNetwork& net, const Eigen::MatrixXd& z) {
    switch (net.output_activation) {
        case OutputActivation::identity:
            return z;
        case OutputActivation::bounded: {
            Eigen::MatrixXd y(z.rows(), z.cols());
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r) {
                    const double s = 1.0 / (1.0 + std::exp(-z(r, c)));
                    y(r, c) = net.out_lo[r] + (net.out_hi[r] - net.out_lo[r]) * s;
                }
            return y;
        }
        case OutputActivation::symmetric_bounded: {
            Eigen::MatrixXd y(z.rows(), z.cols());
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r) {
                    const double centre = 0.5 * (net.out_hi[r] + net.out_lo[r]);
                    const double radius = 0.5 * (net.out_hi[r] - net.out_lo[r]);
                    y(r, c) = centre + radius * std::tanh(z(r, c));
                }
            return y;
        }
    }
    throw ContractError("unreachable activation");
}

Eigen::MatrixXd squash_derivative(const MlpNetwork& net, const Eigen::MatrixXd& z) {
    switch (net.output_activation) {
        case OutputActivation::identity:
            return Eigen::MatrixXd::Ones(z.rows(), z.cols());
        case OutputActivation::bounded: {
            Eigen::MatrixXd d(z.rows(), z.cols());
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r) {
                    const double s = 1.0 / (1.0 + std::exp(-z(r, c)));
                    d(r, c) = (net.out_hi[r] - net.out_lo[r]) * s * (1.0 - s);
                }
            return d;
        }
        case OutputActivation::symmetric_bounded: {
            Eigen::MatrixXd d(z.rows(), z.cols());
            for (Eigen::Index c = 0; c < z.cols(); ++c)
                for (Eigen::Index r = 0; r < z.rows(); ++r) {
                    const double radius = 0.5 * (net.out_hi[r] - net.out_lo[r]);
                    const double t = std::tanh(z(r, c));
                    d(r, c) = radius * (1.0 - t * t);
                }
            return d;
        }
    }
    throw ContractError("unreachable activation");
}

} // namespace

void MlpNetwork::validate() const {
    check_finite_sizes(layer_sizes);
    const std::size_t layers = layer_sizes.size() - 1;
    if (weights.size() != layers || biases.size() != layers)
        throw ContractError("network parameter count does not match layer sizes");
    for (std::size_t l = 0; l < layers; ++l) {
        if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l])
            throw ContractError("weight shape mismatch at layer " + std::to_string(l));
        if (biases[l].size() != layer_sizes[l + 1])
            throw ContractError("bias shape mismatch at layer " + std::to_string(l));
    }
    if (output_activation != OutputActivation::identity) {
        if (out_lo.size() != layer_sizes.back() || out_hi.size() != layer_sizes.back())
            throw ConfigError("bounded activation needs lo/hi per output dimension");
        for (Eigen::Index i = 0; i < out_lo.size(); ++i)
            if (!(out_lo[i] < out_hi[i]))
                throw ConfigError("bounded activation needs lo < hi per dimension");
    }
}

Gradients Gradients::zeros_like(const MlpNetwork& net) {
    Gradients g;
    g.d_weights.reserve(net.weights.size());
    g.d_biases.reserve(net.biases.size());
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        g.d_weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        g.d_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    return g;
}

void Gradients::scale(double factor) {
    for (auto& w : d_weights) w *= factor;
    for (auto& b : d_biases) b *= factor;
}

void Gradients::axpy(double factor, const Gradients& other) {
    if (other.d_weights.size() != d_weights.size())
        throw ContractError("gradient shape mismatch");
    for (std::size_t l = 0; l < d_weights.size(); ++l) {
        d_weights[l] += factor * other.d_weights[l];
        d_biases[l] += factor * other.d_biases[l];
    }
}

OptimizerState OptimizerState::for_network(const MlpNetwork& net, double learning_rate) {
    OptimizerState opt;
    opt.learning_rate = learning_rate;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        opt.m_weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        opt.v_weights.emplace_back(Eigen::MatrixXd::Zero(net.weights[l].rows(), net.weights[l].cols()));
        opt.m_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
        opt.v_biases.emplace_back(Eigen::VectorXd::Zero(net.biases[l].size()));
    }
    return opt;
}

MlpNetwork make_mlp(const std::vector<int>& layer_sizes, OutputActivation activation,
                    const Eigen::VectorXd& out_lo, const Eigen::VectorXd& out_hi,
                    Rng& init_rng, double final_layer_scale) {
    check_finite_sizes(layer_sizes);
    MlpNetwork net;
    net.layer_sizes = layer_sizes;
    net.output_activation = activation;
    net.out_lo = out_lo;
    net.out_hi = out_hi;
    const std::size_t layers = layer_sizes.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        const double scale = (l + 1 == layers) ? final_layer_scale : 1.0;
        Eigen::MatrixXd w(fan_out, fan_in);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) w(r, c) = scale * init_rng.uniform(-bound, bound);
        Eigen::VectorXd b(fan_out);
        for (int r = 0; r < fan_out; ++r) b[r] = scale * init_rng.uniform(-bound, bound);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    net.validate();
    return net;
}

Eigen::MatrixXd forward(const MlpNetwork& net, const Eigen::MatrixXd& input,
                        ForwardCache* cache) {
    if (input.rows() != net.input_size())
        throw ContractError("forward input dimension mismatch");
    const std::size_t layers = net.weights.size();
    if (cache) {
        cache->pre.assign(layers, {});
        cache->post.assign(layers + 1, {});
        cache->post[0] = input;
    }
    Eigen::MatrixXd a = input;
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd z = (net.weights[l] * a).colwise() + net.biases[l];
        if (cache) cache->pre[l] = z;
        if (l + 1 < layers) {
            a = z.cwiseMax(0.0); // ReLU hidden layers
        } else {
            a = squash(net, z);
        }
        if (cache) cache->post[l + 1] = a;
    }
    return a;
}

Eigen::VectorXd forward1(const MlpNetwork& net, const Eigen::VectorXd& input,
                         ForwardCache* cache) {
    return forward(net, input, cache).col(0);
}

Eigen::MatrixXd backward(const MlpNetwork& net, const ForwardCache& cache,
                         const Eigen::MatrixXd& output_gradient, Gradients& grads) {
    const std::size_t layers = net.weights.size();
    if (cache.pre.size() != layers || cache.post.size() != layers + 1)
        throw ContractError("stale or mismatched forward cache");
    if (output_gradient.rows() != net.output_size() ||
        output_gradient.cols() != cache.post[0].cols())
        throw ContractError("output gradient shape mismatch");
    if (grads.d_weights.size() != layers) grads = Gradients::zeros_like(net);

    // dL/dz at the output layer through the squashing function.
    Eigen::MatrixXd delta =
        output_gradient.cwiseProduct(squash_derivative(net, cache.pre[layers - 1]));
    for (std::size_t l = layers; l-- > 0;) {
        grads.d_weights[l] = delta * cache.post[l].transpose();
        grads.d_biases[l] = delta.rowwise().sum();
        Eigen::MatrixXd upstream = net.weights[l].transpose() * delta;
        if (l == 0) return upstream;
        // Chain through the hidden ReLU: derivative 1 where z > 0, else 0.
        delta = upstream.cwiseProduct(
            (cache.pre[l - 1].array() > 0.0).cast<double>().matrix());
    }
    throw ContractError("unreachable");
}

void apply_gradients(MlpNetwork& net, OptimizerState& opt, const Gradients& grads,
                     bool maximize) {
    if (opt.m_weights.size() != net.weights.size() ||
        grads.d_weights.size() != net.weights.size())
        throw ContractError("optimizer/gradient shape mismatch");
    opt.step += 1;
    const double bias1 = 1.0 - std::pow(opt.beta1, static_cast<double>(opt.step));
    const double bias2 = 1.0 - std::pow(opt.beta2, static_cast<double>(opt.step));
    const double sign = maximize ? -1.0 : 1.0;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        if (grads.d_weights[l].rows() != net.weights[l].rows() ||
            grads.d_weights[l].cols() != net.weights[l].cols() ||
            grads.d_biases[l].size() != net.biases[l].size())
            throw ContractError("gradient shape mismatch at layer " + std::to_string(l));
        const Eigen::ArrayXXd gw = sign * grads.d_weights[l].array();
        opt.m_weights[l] = (opt.beta1 * opt.m_weights[l].array() + (1.0 - opt.beta1) * gw).matrix();
        opt.v_weights[l] =
            (opt.beta2 * opt.v_weights[l].array() + (1.0 - opt.beta2) * gw.square()).matrix();
        net.weights[l].array() -= opt.learning_rate * (opt.m_weights[l].array() / bias1) /
                                  ((opt.v_weights[l].array() / bias2).sqrt() + opt.epsilon);
        const Eigen::ArrayXd gb = sign * grads.d_biases[l].array();
        opt.m_biases[l] = (opt.beta1 * opt.m_biases[l].array() + (1.0 - opt.beta1) * gb).matrix();
        opt.v_biases[l] =
            (opt.beta2 * opt.v_biases[l].array() + (1.0 - opt.beta2) * gb.square()).matrix();
        net.biases[l].array() -= opt.learning_rate * (opt.m_biases[l].array() / bias1) /
                                 ((opt.v_biases[l].array() / bias2).sqrt() + opt.epsilon);
    }
}

void soft_update(MlpNetwork& target, const MlpNetwork& source, double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ContractError("tau must lie in (0, 1]");
    if (target.layer_sizes != source.layer_sizes)
        throw ContractError("soft update across different architectures");
    for (std::size_t l = 0; l < target.weights.size(); ++l) {
        target.weights[l] = tau * source.weights[l] + (1.0 - tau) * target.weights[l];
        target.biases[l] = tau * source.biases[l] + (1.0 - tau) * target.biases[l];
    }
}

void save_network(const MlpNetwork& net, const std::filesystem::path& path) {
    net.validate();
    std::string out = "wsisnet v1\n";
    switch (net.output_activation) {
        case OutputActivation::identity: out += "activation identity\n"; break;
        case OutputActivation::bounded: out += "activation bounded\n"; break;
        case OutputActivation::symmetric_bounded: out += "activation symmetric\n"; break;
    }
    out += "sizes";
    for (int s : net.layer_sizes) out += " " + std::to_string(s);
    out += '\n';
    if (net.output_activation != OutputActivation::identity) {
        out += "lo";
        for (Eigen::Index i = 0; i < net.out_lo.size(); ++i)
            out += " " + textio::format_hex(net.out_lo[i]);
        out += "\nhi";
        for (Eigen::Index i = 0; i < net.out_hi.size(); ++i)
            out += " " + textio::format_hex(net.out_hi[i]);
        out += '\n';
    }
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        out += "layer " + std::to_string(l) + " " + std::to_string(net.weights[l].rows()) +
               " " + std::to_string(net.weights[l].cols()) + "\n";
        for (Eigen::Index r = 0; r < net.weights[l].rows(); ++r) {
            for (Eigen::Index c = 0; c < net.weights[l].cols(); ++c) {
                out += textio::format_hex(net.weights[l](r, c));
                out += (c + 1 == net.weights[l].cols()) ? '\n' : ' ';
            }
        }
        out += "bias";
        for (Eigen::Index r = 0; r < net.biases[l].size(); ++r)
            out += " " + textio::format_hex(net.biases[l][r]);
        out += '\n';
    }
    textio::write_file(path, out);
}

MlpNetwork load_network(const std::filesystem::path& path) {
    const std::string content = textio::read_file(path);
    const auto ls = textio::lines(content);
    std::size_t i = 0;
    auto next_line = [&]() -> std::string_view {
        if (i >= ls.size()) throw IngestionError("truncated checkpoint " + path.string());
        return ls[i++];
    };
    if (next_line() != "wsisnet v1") throw IngestionError("unknown checkpoint format");

    MlpNetwork net;
    auto act_tokens = textio::split(next_line(), ' ');
    if (act_tokens.size() != 2 || act_tokens[0] != "activation")
        throw IngestionError("bad activation line");
    if (act_tokens[1] == "identity") net.output_activation = OutputActivation::identity;
    else if (act_tokens[1] == "bounded") net.output_activation = OutputActivation::bounded;
    else if (act_tokens[1] == "symmetric") net.output_activation = OutputActivation::symmetric_bounded;
    else throw IngestionError("unknown activation in checkpoint");

    auto size_tokens = textio::split(next_line(), ' ');
    if (size_tokens.size() < 3 || size_tokens[0] != "sizes")
        throw IngestionError("bad sizes line");
    for (std::size_t k = 1; k < size_tokens.size(); ++k)
        net.layer_sizes.push_back(static_cast<int>(textio::parse_int(size_tokens[k])));

    if (net.output_activation != OutputActivation::identity) {
        auto lo_tokens = textio::split(next_line(), ' ');
        auto hi_tokens = textio::split(next_line(), ' ');
        if (lo_tokens[0] != "lo" || hi_tokens[0] != "hi")
            throw IngestionError("bad bound lines");
        net.out_lo.resize(static_cast<Eigen::Index>(lo_tokens.size()) - 1);
        net.out_hi.resize(static_cast<Eigen::Index>(hi_tokens.size()) - 1);
        for (std::size_t k = 1; k < lo_tokens.size(); ++k)
            net.out_lo[static_cast<Eigen::Index>(k - 1)] = textio::parse_hex(lo_tokens[k]);
        for (std::size_t k = 1; k < hi_tokens.size(); ++k)
            net.out_hi[static_cast<Eigen::Index>(k - 1)] = textio::parse_hex(hi_tokens[k]);
    }

    const std::size_t layers = net.layer_sizes.size() - 1;
    for (std::size_t l = 0; l < layers; ++l) {
        auto head = textio::split(next_line(), ' ');
        if (head.size() != 4 || head[0] != "layer")
            throw IngestionError("bad layer header");
        const auto rows = textio::parse_int(head[2]);
        const auto cols = textio::parse_int(head[3]);
        Eigen::MatrixXd w(rows, cols);
        for (long long r = 0; r < rows; ++r) {
            auto row_tokens = textio::split(next_line(), ' ');
            if (static_cast<long long>(row_tokens.size()) != cols)
                throw IngestionError("bad weight row length");
            for (long long c = 0; c < cols; ++c) w(r, c) = textio::parse_hex(row_tokens[c]);
        }
        auto bias_tokens = textio::split(next_line(), ' ');
        if (bias_tokens[0] != "bias" || static_cast<long long>(bias_tokens.size()) != rows + 1)
            throw IngestionError("bad bias line");
        Eigen::VectorXd b(rows);
        for (long long r = 0; r < rows; ++r) b[r] = textio::parse_hex(bias_tokens[r + 1]);
        net.weights.push_back(std::move(w));
        net.biases.push_back(std::move(b));
    }
    net.validate();
    return net;
}

} // namespace wsis::nn
