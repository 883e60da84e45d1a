#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dsflsim/idx.hpp"
#include "dsflsim/rng.hpp"

namespace dsfl {

// Dense feed-forward network in double precision. The output layer is
// linear; softmax and the cross-entropy loss live together in
// softmax_cross_entropy so the backward pass starts from the usual
// (softmax - onehot) / batch residual.

enum class Activation { relu, softmax_output };

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd biases;   // out
    Activation activation = Activation::relu;
};

struct Mlp {
    std::vector<DenseLayer> layers;

    int num_layers() const { return static_cast<int>(layers.size()); }
    int input_dim() const { return static_cast<int>(layers.front().weights.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().weights.rows()); }
    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers)
            n += static_cast<std::size_t>(l.weights.size()) + l.biases.size();
        return n;
    }
};

inline bool same_architecture(const Mlp& a, const Mlp& b) {
    if (a.num_layers() != b.num_layers()) return false;
    for (int i = 0; i < a.num_layers(); ++i) {
        if (a.layers[i].weights.rows() != b.layers[i].weights.rows() ||
            a.layers[i].weights.cols() != b.layers[i].weights.cols() ||
            a.layers[i].activation != b.layers[i].activation)
            return false;
    }
    return true;
}

// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init, filled in a fixed order
inline Mlp make_mlp(const std::vector<int>& dims, Rng& rng) {
    if (dims.size() < 2)
        throw std::invalid_argument("make_mlp: need at least input and output dims");
    Mlp m;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        DenseLayer layer;
        const int in = dims[i];
        const int out = dims[i + 1];
        const double lim = 1.0 / std::sqrt(static_cast<double>(in));
        layer.weights.resize(out, in);
        layer.biases.resize(out);
        for (int r = 0; r < out; ++r)
            for (int c = 0; c < in; ++c) layer.weights(r, c) = rng.uniform(-lim, lim);
        for (int r = 0; r < out; ++r) layer.biases(r) = rng.uniform(-lim, lim);
        layer.activation = (i + 2 == dims.size()) ? Activation::softmax_output
                                                  : Activation::relu;
        m.layers.push_back(std::move(layer));
    }
    return m;
}

// Device-side and server-side halves of a network cut at cut_index:
// layers [0, cut) run on the device, [cut, L) on the server. Concatenating
// the parts reproduces the monolithic network.
struct SplitModel {
    Mlp device_part;
    Mlp server_part;
};

inline SplitModel split_model(const Mlp& m, int cut_index) {
    if (cut_index < 1 || cut_index >= m.num_layers())
        throw std::invalid_argument("split_model: cut_index must be in [1, layers)");
    SplitModel sm;
    sm.device_part.layers.assign(m.layers.begin(), m.layers.begin() + cut_index);
    sm.server_part.layers.assign(m.layers.begin() + cut_index, m.layers.end());
    return sm;
}

inline Mlp concat_model(const Mlp& device_part, const Mlp& server_part) {
    Mlp m;
    m.layers = device_part.layers;
    m.layers.insert(m.layers.end(), server_part.layers.begin(),
                    server_part.layers.end());
    return m;
}

struct ForwardCache {
    std::vector<Eigen::MatrixXd> pre;  // z of each layer
    std::vector<Eigen::MatrixXd> act;  // act[0] = input, act[i+1] = output of layer i
};

inline const Eigen::MatrixXd& forward(const Mlp& m, const Eigen::MatrixXd& x,
                                      ForwardCache& cache) {
    if (x.rows() != m.input_dim())
        throw std::invalid_argument("forward: input dimension mismatch");
    cache.pre.clear();
    cache.act.clear();
    cache.act.push_back(x);
    for (const auto& layer : m.layers) {
        Eigen::MatrixXd z = layer.weights * cache.act.back();
        z.colwise() += layer.biases;
        cache.pre.push_back(z);
        if (layer.activation == Activation::relu)
            cache.act.push_back(z.cwiseMax(0.0));
        else
            cache.act.push_back(std::move(z));
    }
    return cache.act.back();
}

inline Eigen::MatrixXd forward(const Mlp& m, const Eigen::MatrixXd& x) {
    ForwardCache cache;
    forward(m, x, cache);
    return cache.act.back();
}

// mean cross-entropy of softmax(logits) against integer labels;
// optionally emits d(loss)/d(logits)
inline double softmax_cross_entropy(const Eigen::MatrixXd& logits,
                                    const std::vector<std::uint8_t>& labels,
                                    Eigen::MatrixXd* dlogits = nullptr) {
    const int batch = static_cast<int>(logits.cols());
    if (batch != static_cast<int>(labels.size()))
        throw std::invalid_argument("softmax_cross_entropy: batch size mismatch");
    Eigen::MatrixXd probs = logits;
    double loss = 0.0;
    for (int i = 0; i < batch; ++i) {
        const double zmax = probs.col(i).maxCoeff();
        probs.col(i) = (probs.col(i).array() - zmax).exp();
        const double sum = probs.col(i).sum();
        probs.col(i) /= sum;
        loss -= std::log(std::max(probs(labels[i], i), 1e-300));
    }
    loss /= batch;
    if (dlogits) {
        for (int i = 0; i < batch; ++i) probs(labels[i], i) -= 1.0;
        *dlogits = probs / batch;
    }
    return loss;
}

struct Gradients {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
};

// Backpropagate d(loss)/d(output) through the part; returns
// d(loss)/d(input) when requested (the cut gradient for a server part).
// The relu derivative is taken as 0 at exactly 0.
inline Eigen::MatrixXd backward(const Mlp& m, const ForwardCache& cache,
                                const Eigen::MatrixXd& dout, Gradients& grads,
                                bool need_input_grad = true) {
    const int L = m.num_layers();
    grads.weights.resize(L);
    grads.biases.resize(L);
    Eigen::MatrixXd delta = dout;
    for (int i = L - 1; i >= 0; --i) {
        const auto& layer = m.layers[i];
        if (layer.activation == Activation::relu)
            delta = delta.cwiseProduct(
                (cache.pre[i].array() > 0.0).cast<double>().matrix());
        grads.weights[i] = delta * cache.act[i].transpose();
        grads.biases[i] = delta.rowwise().sum();
        if (i > 0 || need_input_grad) delta = layer.weights.transpose() * delta;
    }
    return delta;
}

inline void apply_sgd(Mlp& m, const Gradients& grads, double learning_rate) {
    for (int i = 0; i < m.num_layers(); ++i) {
        m.layers[i].weights.noalias() -= learning_rate * grads.weights[i];
        m.layers[i].biases.noalias() -= learning_rate * grads.biases[i];
    }
}

// One SGD step of split training: device-side forward to the cut, server
// -side forward to the loss, server backward producing the cut gradient,
// device backward, then both parts update. Equivalent to one SGD step on
// the concatenated network with the same batch and rate.
inline double split_training_step(Mlp& device_part, Mlp& server_part,
                                  const Eigen::MatrixXd& batch,
                                  const std::vector<std::uint8_t>& labels,
                                  double learning_rate) {
    if (batch.cols() == 0)
        throw std::invalid_argument("split_training_step: empty batch");
    if (device_part.output_dim() != server_part.input_dim())
        throw std::invalid_argument(
            "split_training_step: cut dimensions do not chain");
    ForwardCache dev_cache, srv_cache;
    forward(device_part, batch, dev_cache);
    const Eigen::MatrixXd& logits = forward(server_part, dev_cache.act.back(), srv_cache);

    Eigen::MatrixXd dlogits;
    const double loss = softmax_cross_entropy(logits, labels, &dlogits);

    Gradients srv_grads, dev_grads;
    const Eigen::MatrixXd dcut = backward(server_part, srv_cache, dlogits, srv_grads);
    backward(device_part, dev_cache, dcut, dev_grads, /*need_input_grad=*/false);

    apply_sgd(server_part, srv_grads, learning_rate);
    apply_sgd(device_part, dev_grads, learning_rate);
    return loss;
}

struct EvalResult {
    double accuracy = 0.0;
    double loss = 0.0;
};

inline Eigen::MatrixXd batch_matrix(const Dataset& ds, const std::vector<int>& idx,
                                    int begin, int end) {
    const int dim = ds.image_dim();
    Eigen::MatrixXd x(dim, end - begin);
    for (int i = begin; i < end; ++i) {
        const std::uint8_t* px = ds.image_bytes(idx[i]);
        for (int j = 0; j < dim; ++j) x(j, i - begin) = px[j] / 255.0;
    }
    return x;
}

inline EvalResult evaluate(const Mlp& m, const Dataset& ds, int chunk = 2048) {
    EvalResult res;
    std::vector<int> idx(ds.count());
    for (int i = 0; i < ds.count(); ++i) idx[i] = i;
    int correct = 0;
    double loss_sum = 0.0;
    for (int begin = 0; begin < ds.count(); begin += chunk) {
        const int end = std::min(ds.count(), begin + chunk);
        const Eigen::MatrixXd x = batch_matrix(ds, idx, begin, end);
        const Eigen::MatrixXd logits = forward(m, x);
        std::vector<std::uint8_t> labels(ds.labels.begin() + begin,
                                         ds.labels.begin() + end);
        loss_sum += softmax_cross_entropy(logits, labels) * (end - begin);
        for (int i = 0; i < end - begin; ++i) {
            Eigen::Index arg;
            logits.col(i).maxCoeff(&arg);
            if (arg == labels[i]) ++correct;
        }
    }
    res.accuracy = static_cast<double>(correct) / ds.count();
    res.loss = loss_sum / ds.count();
    return res;
}

}  // namespace dsfl
