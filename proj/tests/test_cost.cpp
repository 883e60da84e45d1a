#include <catch_amalgamated.hpp>
#include <cmath>

#include "dsflsim/bsum.hpp"
#include "dsflsim/cost.hpp"
#include "dsflsim/units.hpp"

using namespace dsfl;
using Catch::Approx;

TEST_CASE("transmission latency is payload over rate") {
    CHECK(transmission_latency(1e6, 1e6) == Approx(1.0));
    CHECK(std::isinf(transmission_latency(1e6, 0.0)));
    CHECK_THROWS_AS(transmission_latency(1e6, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(transmission_latency(0.0, 1e6), std::invalid_argument);
}

TEST_CASE("latency composed with the Shannon rate at sinr 1") {
    const double rate = achievable_rate(1.0, 180e3);
    CHECK(transmission_latency(180000.0, rate) == Approx(1.0));
}

TEST_CASE("transmission energy is power times airtime") {
    CHECK(transmission_energy(0.1, 2.0) == Approx(0.2));
    CHECK(transmission_energy(0.0, 123.0) == 0.0);
    const double lat = transmission_latency(180000.0, achievable_rate(1.0, 180e3));
    CHECK(transmission_energy(0.2, lat) == Approx(0.2));
    CHECK(std::isinf(transmission_energy(0.2, transmission_latency(1e6, 0.0))));
    // the infeasible marker dominates even at zero power
    CHECK(std::isinf(transmission_energy(0.0, transmission_latency(1e6, 0.0))));
    CHECK_THROWS_AS(transmission_energy(-0.1, 1.0), std::invalid_argument);
}

TEST_CASE("local iteration count") {
    CHECK(local_iterations(1.0, 10.0) == 0);
    CHECK(local_iterations(0.1, 10.0) == 24);   // ceil(10 ln 10) = ceil(23.026)
    CHECK(local_iterations(0.5, 10.0) == 7);    // ceil(10 ln 2) = ceil(6.931)
    CHECK_THROWS_AS(local_iterations(0.0, 10.0), std::domain_error);
    CHECK_THROWS_AS(local_iterations(1.5, 10.0), std::domain_error);
    // nonincreasing in theta
    int prev = local_iterations(0.05, 10.0);
    for (double th = 0.1; th <= 1.0; th += 0.05) {
        const int it = local_iterations(th, 10.0);
        CHECK(it <= prev);
        prev = it;
    }
}

TEST_CASE("local compute time") {
    CHECK(local_compute_time(300, 1e6, 1e9, 1) == Approx(0.3));
    CHECK(local_compute_time(12345, 1e7, 1e9, 0) == 0.0);
    CHECK(local_compute_time(600, 1e6, 1e9, 10) == Approx(6.0));
    CHECK_THROWS_AS(local_compute_time(300, 1e6, 0.0, 1), std::invalid_argument);
}

TEST_CASE("device cost composes the (1 + theta) weighted sum") {
    CostParams p;
    CHECK(device_cost(0.0, 2.0, 1.0, p) == Approx(1.5));
    CHECK(device_cost(1.0, 2.0, 1.0, p) == Approx(3.0));
    CHECK(device_cost(0.5, 1.0, 1.0, p) == Approx(1.5));
    CHECK(std::isinf(device_cost(0.5, transmission_latency(1e6, 0.0), 1.0, p)));
    CHECK_THROWS_AS(device_cost(-0.1, 1.0, 1.0, p), std::domain_error);
}

TEST_CASE("cost params are validated") {
    CostParams p;
    p.weight_latency = 0.7;
    CHECK_THROWS_AS(validate_cost_params(p), std::invalid_argument);
    p = CostParams{};
    p.theta_min = 0.9;
    p.theta_max = 0.2;
    CHECK_THROWS_AS(validate_cost_params(p), std::invalid_argument);
    p = CostParams{};
    p.upload_size_bits = 0;
    CHECK_THROWS_AS(validate_cost_params(p), std::invalid_argument);
}

namespace {

Scenario two_device_scenario() {
    Scenario s;
    s.area_side_m = 1000.0;
    s.carrier_freq_hz = 2e9;
    s.noise_psd_w_per_hz = dbm_to_watts(-174.0);
    s.min_distance_m = 1.0;
    s.devices.push_back({0, {300.0, 500.0}, dbm_to_watts(23.0), 1e9, 300});
    s.devices.push_back({1, {700.0, 500.0}, dbm_to_watts(23.0), 1e9, 300});
    s.edge_servers.push_back({0, {500.0, 500.0}, 2});
    s.resource_blocks.push_back({0, 180e3, {100.0, 100.0}, dbm_to_watts(46.0)});
    s.resource_blocks.push_back({1, 180e3, {900.0, 900.0}, dbm_to_watts(46.0)});
    return s;
}

AllocationSolution covered_solution(const Scenario& s) {
    AllocationSolution sol = AllocationSolution::empty(s.num_devices(), 0.05, 0.1);
    for (int d = 0; d < s.num_devices(); ++d) {
        sol.rb_of[d] = d;
        sol.server_of[d] = 0;
    }
    return sol;
}

}  // namespace

TEST_CASE("total cost equals the hand-composed per-device chain") {
    const Scenario s = two_device_scenario();
    const ChannelState ch = build_channel_state(s);
    CostParams p;
    AllocationSolution sol = covered_solution(s);
    sol.theta = {0.1, 0.4};
    sol.power_w = {0.05, 0.12};

    const CostBreakdown bd = total_cost(sol, s, ch, p);
    REQUIRE(bd.rows.size() == 2);
    double expect_total = 0.0;
    for (int d = 0; d < 2; ++d) {
        const double snr = sinr(d, sol.rb_of[d], 0, sol.power_w[d], s, ch);
        const double rate = achievable_rate(snr, 180e3);
        const double lat = transmission_latency(p.upload_size_bits, rate);
        const double en = transmission_energy(sol.power_w[d], lat);
        const double cost = (1.0 + sol.theta[d]) * (0.5 * lat + 0.5 * en);
        CHECK(bd.rows[d].latency_s == Approx(lat));
        CHECK(bd.rows[d].energy_j == Approx(en));
        CHECK(bd.rows[d].cost == Approx(cost));
        expect_total += cost;
    }
    CHECK(bd.total_cost == Approx(expect_total));
    CHECK(bd.feasible);

    const CostBreakdown again = total_cost(sol, s, ch, p);
    CHECK(again.total_cost == bd.total_cost);
}

TEST_CASE("total cost decreases when one device's interference falls") {
    Scenario s = two_device_scenario();
    CostParams p;
    AllocationSolution sol = covered_solution(s);
    const CostBreakdown before = total_cost(sol, s, build_channel_state(s), p);
    // move device 0's interferer far away, all else fixed
    s.resource_blocks[0].cellular_pos = {10000.0, 10000.0};
    const CostBreakdown after = total_cost(sol, s, build_channel_state(s), p);
    CHECK(after.total_cost < before.total_cost);
    CHECK(after.rows[1].cost == Approx(before.rows[1].cost));
}

TEST_CASE("total cost is strictly increasing in any theta") {
    const Scenario s = two_device_scenario();
    const ChannelState ch = build_channel_state(s);
    CostParams p;
    AllocationSolution sol = covered_solution(s);
    const double base = total_cost(sol, s, ch, p).total_cost;
    for (int d = 0; d < 2; ++d) {
        AllocationSolution bumped = sol;
        bumped.theta[d] += 0.2;
        CHECK(total_cost(bumped, s, ch, p).total_cost > base);
    }
}

TEST_CASE("total cost is additive over devices") {
    const Scenario s = two_device_scenario();
    const ChannelState ch = build_channel_state(s);
    CostParams p;
    const AllocationSolution sol = covered_solution(s);
    const CostBreakdown bd = total_cost(sol, s, ch, p);
    CHECK(bd.total_cost == Approx(bd.rows[0].cost + bd.rows[1].cost));

    // removing a device's assignment removes exactly its contribution
    AllocationSolution partial = sol;
    partial.rb_of[1] = -1;
    const CostBreakdown pb = total_cost(partial, s, ch, p);
    CHECK(pb.covered_cost == Approx(bd.rows[0].cost));
    CHECK(pb.uncovered_count == 1);
    CHECK(std::isinf(pb.total_cost));
    CHECK_FALSE(pb.feasible);
}

TEST_CASE("doubling the payload doubles latency, energy and cost") {
    const Scenario s = two_device_scenario();
    const ChannelState ch = build_channel_state(s);
    CostParams p;
    const AllocationSolution sol = covered_solution(s);
    const CostBreakdown base = total_cost(sol, s, ch, p);
    CostParams doubled = p;
    doubled.upload_size_bits = 2.0 * p.upload_size_bits;
    const CostBreakdown twice = total_cost(sol, s, ch, doubled);
    for (int d = 0; d < 2; ++d) {
        CHECK(twice.rows[d].latency_s == Approx(2.0 * base.rows[d].latency_s));
        CHECK(twice.rows[d].energy_j == Approx(2.0 * base.rows[d].energy_j));
        CHECK(twice.rows[d].cost == Approx(2.0 * base.rows[d].cost));
    }
}

TEST_CASE("total cost rejects shape mismatches") {
    const Scenario s = two_device_scenario();
    const ChannelState ch = build_channel_state(s);
    AllocationSolution sol = AllocationSolution::empty(3, 0.05, 0.1);
    CHECK_THROWS_AS(total_cost(sol, s, ch, CostParams{}), std::invalid_argument);
}

TEST_CASE("extended mode adds the compute tradeoff") {
    CostParams p;
    p.include_local_compute = true;
    p.cycles_per_sample = 1e6;
    DeviceCompute dc{300.0, 1e9};
    // the compute term shrinks as theta grows, pulling against (1 + theta)
    const double lo = device_cost(0.1, 0.01, 0.001, p, dc);
    const double hi = device_cost(0.9, 0.01, 0.001, p, dc);
    const double iters_lo = 10.0 * std::log(1.0 / 0.1);
    const double t_lo = iters_lo * 300.0 * 1e6 / 1e9;
    const double e_lo = 1e-28 * iters_lo * 300.0 * 1e6 * 1e9 * 1e9;
    CHECK(lo == Approx((1.1) * (0.5 * (0.01 + t_lo) + 0.5 * (0.001 + e_lo))));
    CHECK(hi < lo);  // compute dominates at these magnitudes
    CHECK_THROWS_AS(device_cost(0.0, 0.01, 0.001, p, dc), std::domain_error);
}
