#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "dsflsim/nn.hpp"
#include "dsflsim/sharding.hpp"

namespace dsfl {

struct RoundMetrics {
    int round = 0;  // 1-based
    double test_accuracy = 0.0;
    double train_loss = 0.0;
    long long edge_aggregations_performed = 0;    // cumulative barriers
    long long global_aggregations_performed = 0;  // cumulative merges
    long long bits_uplinked = 0;                  // this round
};

struct TrainHyper {
    int rounds = 50;
    int edge_agg_period = 1;       // rounds between edge aggregation barriers
    int edge_aggs_per_global = 2;  // k: barriers between global merges
    int batch_size = 32;
    double learning_rate = 0.05;
    int cut_index = 1;
    std::vector<int> hidden = {128};
    int num_classes = 10;
    std::uint64_t seed = 0;

    std::vector<int> layer_dims(int input_dim) const {
        std::vector<int> dims;
        dims.push_back(input_dim);
        dims.insert(dims.end(), hidden.begin(), hidden.end());
        dims.push_back(num_classes);
        return dims;
    }

    void validate() const {
        if (rounds < 1) throw std::invalid_argument("hyper: rounds must be >= 1");
        if (edge_agg_period < 1)
            throw std::invalid_argument("hyper: edge_agg_period must be >= 1");
        if (edge_aggs_per_global < 1)
            throw std::invalid_argument("hyper: edge_aggs_per_global must be >= 1");
        if (batch_size < 1) throw std::invalid_argument("hyper: batch_size must be >= 1");
        if (learning_rate < 0)
            throw std::invalid_argument("hyper: learning_rate must be >= 0");
        if (hidden.empty())
            throw std::invalid_argument("hyper: need at least one hidden layer");
        for (int hu : hidden)
            if (hu < 1) throw std::invalid_argument("hyper: hidden sizes must be >= 1");
        const int num_layers = static_cast<int>(hidden.size()) + 1;
        if (cut_index < 1 || cut_index >= num_layers)
            throw std::invalid_argument("hyper: cut_index must be in [1, layers)");
    }
};

// Sample-count-weighted parameter average. Computed as
//   M_0 + sum_i (w_i / W) (M_i - M_0)
// which is exact (bitwise) on identical inputs and for a single model.
inline Mlp fedavg(const std::vector<const Mlp*>& models,
                  const std::vector<double>& weights) {
    if (models.empty())
        throw std::invalid_argument("fedavg: no models");
    if (models.size() != weights.size())
        throw std::invalid_argument("fedavg: models/weights size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0) throw std::invalid_argument("fedavg: negative weight");
        total += w;
    }
    if (total <= 0) throw std::invalid_argument("fedavg: all weights zero");
    for (const Mlp* m : models)
        if (!same_architecture(*models.front(), *m))
            throw std::invalid_argument("fedavg: architecture mismatch");

    Mlp out = *models.front();
    for (std::size_t i = 1; i < models.size(); ++i) {
        const double f = weights[i] / total;
        for (int l = 0; l < out.num_layers(); ++l) {
            out.layers[l].weights.noalias() +=
                f * (models[i]->layers[l].weights - models.front()->layers[l].weights);
            out.layers[l].biases.noalias() +=
                f * (models[i]->layers[l].biases - models.front()->layers[l].biases);
        }
    }
    return out;
}

inline Mlp fedavg(const std::vector<Mlp>& models, const std::vector<double>& weights) {
    std::vector<const Mlp*> ptrs;
    ptrs.reserve(models.size());
    for (const auto& m : models) ptrs.push_back(&m);
    return fedavg(ptrs, weights);
}

// round-robin device -> edge map used by the experiment drivers
inline std::vector<int> round_robin_edge_map(int devices, int edges) {
    std::vector<int> map(devices);
    for (int d = 0; d < devices; ++d) map[d] = d % edges;
    return map;
}

namespace detail {

// One local epoch of split training for one device. The batch order is
// derived from (seed, round, device) only, so it does not depend on the
// aggregation topology.
inline double local_epoch(Mlp& device_part, Mlp& server_part, const Dataset& train,
                          const std::vector<int>& shard, const TrainHyper& h,
                          int round, int device, double& loss_sum,
                          long long& samples_seen) {
    std::vector<int> order = shard;
    Rng rng(derive_seed(h.seed, 0xBA7C, static_cast<std::uint64_t>(round),
                        static_cast<std::uint64_t>(device)));
    rng.shuffle(order);
    const int n = static_cast<int>(order.size());
    for (int lo = 0; lo < n; lo += h.batch_size) {
        const int hi = std::min(n, lo + h.batch_size);
        const Eigen::MatrixXd x = batch_matrix(train, order, lo, hi);
        std::vector<std::uint8_t> labels(hi - lo);
        for (int i = lo; i < hi; ++i) labels[i - lo] = train.labels[order[i]];
        const double loss =
            split_training_step(device_part, server_part, x, labels, h.learning_rate);
        loss_sum += loss * (hi - lo);
        samples_seen += hi - lo;
    }
    return loss_sum;
}

inline long long param_bits(const Mlp& m) {
    return static_cast<long long>(m.parameter_count()) * 64;
}

inline long long activation_bits(const std::vector<int>& shard, int cut_dim) {
    // forward activations plus the labels the server needs for the loss
    return static_cast<long long>(shard.size()) * (cut_dim * 64 + 8);
}

}  // namespace detail

// Distributed split federated learning: devices train their device-side
// part against their edge server's server-part replica; device parts are
// averaged within each edge group at every barrier (every edge_agg_period
// rounds), and after every edge_aggs_per_global barriers all edge-level
// device parts and server-part replicas merge into one global model that is
// redistributed everywhere. Metrics are evaluated each round on the test
// set with the latest aggregated model (the global one right after a merge,
// otherwise the sample-weighted average of the current parts).
inline std::vector<RoundMetrics> run_dsfl(const std::vector<int>& device_to_edge,
                                          const Dataset& train, const Dataset& test,
                                          const ShardedDataset& shards,
                                          const TrainHyper& h) {
    h.validate();
    const int devices = shards.num_devices();
    if (static_cast<int>(device_to_edge.size()) != devices)
        throw std::invalid_argument("run_dsfl: device/edge map size mismatch");
    int edges = 0;
    for (int d = 0; d < devices; ++d) {
        if (device_to_edge[d] < 0)
            throw std::invalid_argument("run_dsfl: device " + std::to_string(d) +
                                        " is not mapped to an edge server");
        edges = std::max(edges, device_to_edge[d] + 1);
    }
    std::vector<std::vector<int>> groups(edges);
    for (int d = 0; d < devices; ++d) groups[device_to_edge[d]].push_back(d);

    Rng init_rng(derive_seed(h.seed, 0x171));
    const Mlp global = make_mlp(h.layer_dims(train.image_dim()), init_rng);
    const SplitModel sm = split_model(global, h.cut_index);
    std::vector<Mlp> device_parts(devices, sm.device_part);
    std::vector<Mlp> server_parts(edges, sm.server_part);

    std::vector<double> device_weight(devices);
    std::vector<double> group_weight(edges, 0.0);
    for (int d = 0; d < devices; ++d) {
        device_weight[d] = static_cast<double>(shards.shard_of_device(d).size());
        group_weight[device_to_edge[d]] += device_weight[d];
    }

    std::vector<RoundMetrics> metrics;
    long long edge_aggs = 0, global_aggs = 0;
    int barriers_since_global = 0;

    for (int round = 1; round <= h.rounds; ++round) {
        RoundMetrics rm;
        rm.round = round;
        double loss_sum = 0.0;
        long long samples = 0;

        for (int e = 0; e < edges; ++e) {
            for (int d : groups[e]) {
                const auto& shard = shards.shard_of_device(d);
                detail::local_epoch(device_parts[d], server_parts[e], train, shard,
                                    h, round, d, loss_sum, samples);
                rm.bits_uplinked += detail::activation_bits(
                    shard, device_parts[d].output_dim());
            }
        }

        bool merged_this_round = false;
        if (round % h.edge_agg_period == 0) {
            for (int e = 0; e < edges; ++e) {
                if (groups[e].empty()) continue;
                std::vector<const Mlp*> parts;
                std::vector<double> w;
                for (int d : groups[e]) {
                    parts.push_back(&device_parts[d]);
                    w.push_back(device_weight[d]);
                }
                const Mlp agg = fedavg(parts, w);
                for (int d : groups[e]) device_parts[d] = agg;
                rm.bits_uplinked +=
                    static_cast<long long>(groups[e].size()) *
                    detail::param_bits(device_parts[groups[e].front()]);
            }
            edge_aggs += 1;
            barriers_since_global += 1;

            if (barriers_since_global == h.edge_aggs_per_global) {
                std::vector<const Mlp*> dev_parts, srv_parts;
                std::vector<double> w;
                for (int e = 0; e < edges; ++e) {
                    if (groups[e].empty()) continue;
                    dev_parts.push_back(&device_parts[groups[e].front()]);
                    srv_parts.push_back(&server_parts[e]);
                    w.push_back(group_weight[e]);
                }
                const Mlp dev_global = fedavg(dev_parts, w);
                const Mlp srv_global = fedavg(srv_parts, w);
                for (int d = 0; d < devices; ++d) device_parts[d] = dev_global;
                for (int e = 0; e < edges; ++e) server_parts[e] = srv_global;
                for (std::size_t i = 0; i < dev_parts.size(); ++i)
                    rm.bits_uplinked +=
                        detail::param_bits(*dev_parts[i]) +
                        detail::param_bits(*srv_parts[i]);
                global_aggs += 1;
                barriers_since_global = 0;
                merged_this_round = true;
            }
        }

        Mlp eval_model;
        if (merged_this_round) {
            eval_model = concat_model(device_parts[0], server_parts[device_to_edge[0]]);
        } else {
            std::vector<const Mlp*> dev_parts, srv_parts;
            std::vector<double> dw, sw;
            for (int d = 0; d < devices; ++d) {
                dev_parts.push_back(&device_parts[d]);
                dw.push_back(device_weight[d]);
            }
            for (int e = 0; e < edges; ++e) {
                if (groups[e].empty()) continue;
                srv_parts.push_back(&server_parts[e]);
                sw.push_back(group_weight[e]);
            }
            eval_model = concat_model(fedavg(dev_parts, dw), fedavg(srv_parts, sw));
        }
        const EvalResult ev = evaluate(eval_model, test);
        rm.test_accuracy = ev.accuracy;
        rm.train_loss = samples > 0 ? loss_sum / samples : 0.0;
        rm.edge_aggregations_performed = edge_aggs;
        rm.global_aggregations_performed = global_aggs;
        metrics.push_back(rm);
    }
    return metrics;
}

// Split federated learning with a single aggregation level: one shared
// server part trained by all devices in device-id order, device parts
// averaged at the server every round.
inline std::vector<RoundMetrics> run_sfl(const Dataset& train, const Dataset& test,
                                         const ShardedDataset& shards,
                                         const TrainHyper& h) {
    h.validate();
    const int devices = shards.num_devices();

    Rng init_rng(derive_seed(h.seed, 0x171));
    const Mlp global = make_mlp(h.layer_dims(train.image_dim()), init_rng);
    const SplitModel sm = split_model(global, h.cut_index);
    std::vector<Mlp> device_parts(devices, sm.device_part);
    Mlp server_part = sm.server_part;

    std::vector<double> device_weight(devices);
    for (int d = 0; d < devices; ++d)
        device_weight[d] = static_cast<double>(shards.shard_of_device(d).size());

    std::vector<RoundMetrics> metrics;
    for (int round = 1; round <= h.rounds; ++round) {
        RoundMetrics rm;
        rm.round = round;
        double loss_sum = 0.0;
        long long samples = 0;

        for (int d = 0; d < devices; ++d) {
            const auto& shard = shards.shard_of_device(d);
            detail::local_epoch(device_parts[d], server_part, train, shard, h,
                                round, d, loss_sum, samples);
            rm.bits_uplinked +=
                detail::activation_bits(shard, device_parts[d].output_dim());
        }

        std::vector<const Mlp*> parts;
        for (int d = 0; d < devices; ++d) parts.push_back(&device_parts[d]);
        const Mlp agg = fedavg(parts, device_weight);
        for (int d = 0; d < devices; ++d) device_parts[d] = agg;
        rm.bits_uplinked += static_cast<long long>(devices) * detail::param_bits(agg);

        const EvalResult ev = evaluate(concat_model(agg, server_part), test);
        rm.test_accuracy = ev.accuracy;
        rm.train_loss = samples > 0 ? loss_sum / samples : 0.0;
        rm.edge_aggregations_performed = round;
        rm.global_aggregations_performed = round;
        metrics.push_back(rm);
    }
    return metrics;
}

}  // namespace dsfl
