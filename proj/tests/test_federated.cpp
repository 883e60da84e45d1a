#include <catch_amalgamated.hpp>
#include <cmath>

#include "dsflsim/federated.hpp"
#include "dsflsim/synth.hpp"

using namespace dsfl;
using Catch::Approx;

namespace {

// small, fast dataset shared by every test in this file
const SynthDataset& fixture() {
    static const SynthDataset ds = [] {
        SynthConfig cfg;
        cfg.train_count = 6000;
        cfg.test_count = 1000;
        return make_synthetic_dataset(cfg, 1234);
    }();
    return ds;
}

TrainHyper small_hyper(int rounds, std::uint64_t seed) {
    TrainHyper h;
    h.rounds = rounds;
    h.seed = seed;
    h.hidden = {32};
    return h;
}

}  // namespace

TEST_CASE("dsfl with one edge and k=1 degenerates to sfl") {
    const auto& ds = fixture();
    const ShardedDataset shards = shard_non_iid(ds.train, 20, 300, 6, 3);
    TrainHyper h = small_hyper(4, 5);
    h.edge_aggs_per_global = 1;

    const auto sfl = run_sfl(ds.train, ds.test, shards, h);
    const auto dsfl = run_dsfl(std::vector<int>(6, 0), ds.train, ds.test, shards, h);

    REQUIRE(sfl.size() == dsfl.size());
    for (std::size_t r = 0; r < sfl.size(); ++r) {
        CHECK(dsfl[r].round == sfl[r].round);
        CHECK(dsfl[r].test_accuracy == sfl[r].test_accuracy);
        CHECK(dsfl[r].train_loss == sfl[r].train_loss);
        CHECK(dsfl[r].edge_aggregations_performed ==
              sfl[r].edge_aggregations_performed);
        CHECK(dsfl[r].global_aggregations_performed ==
              sfl[r].global_aggregations_performed);
    }
}

TEST_CASE("training runs are deterministic per seed") {
    const auto& ds = fixture();
    const ShardedDataset shards = shard_non_iid(ds.train, 20, 300, 8, 1);
    TrainHyper h = small_hyper(3, 9);
    const auto map = round_robin_edge_map(8, 2);

    const auto a = run_dsfl(map, ds.train, ds.test, shards, h);
    const auto b = run_dsfl(map, ds.train, ds.test, shards, h);
    REQUIRE(a.size() == b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
        CHECK(a[r].test_accuracy == b[r].test_accuracy);
        CHECK(a[r].train_loss == b[r].train_loss);
        CHECK(a[r].bits_uplinked == b[r].bits_uplinked);
    }

    h.seed = 10;
    const auto c = run_dsfl(map, ds.train, ds.test, shards, h);
    bool differs = false;
    for (std::size_t r = 0; r < a.size(); ++r)
        if (a[r].test_accuracy != c[r].test_accuracy ||
            a[r].train_loss != c[r].train_loss)
            differs = true;
    CHECK(differs);
}

TEST_CASE("metrics are well formed") {
    const auto& ds = fixture();
    const ShardedDataset shards = shard_non_iid(ds.train, 20, 300, 6, 2);
    TrainHyper h = small_hyper(5, 4);
    h.edge_aggs_per_global = 2;
    const auto rows = run_dsfl(round_robin_edge_map(6, 3), ds.train, ds.test,
                               shards, h);
    REQUIRE(rows.size() == 5u);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        CHECK(rows[r].round == static_cast<int>(r) + 1);
        CHECK(rows[r].test_accuracy >= 0.0);
        CHECK(rows[r].test_accuracy <= 1.0);
        CHECK(rows[r].train_loss >= 0.0);
        CHECK(rows[r].bits_uplinked > 0);
    }
    // k=2: a global merge lands on every second edge barrier
    CHECK(rows[0].global_aggregations_performed == 0);
    CHECK(rows[1].global_aggregations_performed == 1);
    CHECK(rows[4].global_aggregations_performed == 2);
    CHECK(rows[4].edge_aggregations_performed == 5);
}

TEST_CASE("single-device sfl equals plain split training") {
    const auto& ds = fixture();
    const ShardedDataset shards = shard_non_iid(ds.train, 20, 300, 1, 6);
    TrainHyper h = small_hyper(3, 11);
    const auto metrics = run_sfl(ds.train, ds.test, shards, h);

    // oracle: drive split_training_step directly with the same derived
    // streams (FedAvg of one model must be the identity)
    Rng init(derive_seed(h.seed, 0x171));
    const Mlp model = make_mlp(h.layer_dims(ds.train.image_dim()), init);
    SplitModel sm = split_model(model, h.cut_index);
    for (int round = 1; round <= h.rounds; ++round) {
        std::vector<int> order = shards.shard_of_device(0);
        Rng rng(derive_seed(h.seed, 0xBA7C, round, 0));
        rng.shuffle(order);
        for (int lo = 0; lo < static_cast<int>(order.size()); lo += h.batch_size) {
            const int hi = std::min<int>(order.size(), lo + h.batch_size);
            const Eigen::MatrixXd x = batch_matrix(ds.train, order, lo, hi);
            std::vector<std::uint8_t> y(hi - lo);
            for (int i = lo; i < hi; ++i) y[i - lo] = ds.train.labels[order[i]];
            split_training_step(sm.device_part, sm.server_part, x, y,
                                h.learning_rate);
        }
        const EvalResult ev =
            evaluate(concat_model(sm.device_part, sm.server_part), ds.test);
        CHECK(metrics[round - 1].test_accuracy == ev.accuracy);
    }
}

TEST_CASE("dsfl validates the device map and hyper parameters") {
    const auto& ds = fixture();
    const ShardedDataset shards = shard_non_iid(ds.train, 20, 300, 4, 0);
    TrainHyper h = small_hyper(1, 0);
    CHECK_THROWS_AS(run_dsfl({0, 1}, ds.train, ds.test, shards, h),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_dsfl({0, -1, 0, 0}, ds.train, ds.test, shards, h),
                    std::invalid_argument);
    h.rounds = 0;
    CHECK_THROWS_AS(run_dsfl({0, 0, 0, 0}, ds.train, ds.test, shards, h),
                    std::invalid_argument);
    h = small_hyper(1, 0);
    h.cut_index = 2;  // only one hidden layer: layers = 2, cut must be 1
    CHECK_THROWS_AS(run_sfl(ds.train, ds.test, shards, h), std::invalid_argument);
}

TEST_CASE("untrained model sits near chance accuracy") {
    const auto& ds = fixture();
    double mean = 0.0;
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        Rng init(derive_seed(seed, 0x171));
        const Mlp m = make_mlp({ds.test.image_dim(), 32, 10}, init);
        mean += evaluate(m, ds.test).accuracy;
    }
    mean /= 3.0;
    CHECK(mean == Approx(0.1).margin(0.05));
}

TEST_CASE("edge aggregation period defers barriers") {
    const auto& ds = fixture();
    const ShardedDataset shards = shard_non_iid(ds.train, 20, 300, 4, 12);
    TrainHyper h = small_hyper(4, 13);
    h.edge_agg_period = 2;
    h.edge_aggs_per_global = 1;
    const auto rows = run_dsfl(round_robin_edge_map(4, 2), ds.train, ds.test,
                               shards, h);
    CHECK(rows[0].edge_aggregations_performed == 0);
    CHECK(rows[1].edge_aggregations_performed == 1);
    CHECK(rows[3].edge_aggregations_performed == 2);
    CHECK(rows[3].global_aggregations_performed == 2);
}
