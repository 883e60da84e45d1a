#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dsflsim/idx.hpp"
#include "dsflsim/rng.hpp"

namespace dsfl {

// Label-sorted sharding: the dataset is stable-sorted by label and sliced
// into consecutive shards, so each shard is label-skewed (at most two
// distinct labels when every class holds at least a shard's worth of
// samples). Each device draws one distinct shard at random.
struct ShardedDataset {
    int shard_size = 0;
    std::vector<std::vector<int>> shards;  // sample indices into the dataset
    std::vector<int> device_shard;         // device id -> shard id

    int num_shards() const { return static_cast<int>(shards.size()); }
    int num_devices() const { return static_cast<int>(device_shard.size()); }
    const std::vector<int>& shard_of_device(int device) const {
        return shards[device_shard[device]];
    }
};

inline ShardedDataset shard_non_iid(const Dataset& ds, int num_shards,
                                    int shard_size, int devices,
                                    std::uint64_t seed) {
    if (num_shards < 1 || shard_size < 1)
        throw std::invalid_argument("shard_non_iid: shard counts must be >= 1");
    if (static_cast<long long>(num_shards) * shard_size > ds.count())
        throw std::invalid_argument(
            "shard_non_iid: num_shards * shard_size exceeds dataset size");
    if (devices > num_shards)
        throw std::invalid_argument("shard_non_iid: more devices than shards");

    std::vector<int> order(ds.count());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return ds.labels[a] < ds.labels[b]; });

    ShardedDataset out;
    out.shard_size = shard_size;
    out.shards.resize(num_shards);
    for (int j = 0; j < num_shards; ++j)
        out.shards[j].assign(order.begin() + static_cast<std::ptrdiff_t>(j) * shard_size,
                             order.begin() + static_cast<std::ptrdiff_t>(j + 1) * shard_size);

    std::vector<int> shard_ids(num_shards);
    std::iota(shard_ids.begin(), shard_ids.end(), 0);
    Rng rng(derive_seed(seed, 0x5A4D));
    rng.shuffle(shard_ids);
    out.device_shard.assign(shard_ids.begin(), shard_ids.begin() + devices);
    return out;
}

}  // namespace dsfl
