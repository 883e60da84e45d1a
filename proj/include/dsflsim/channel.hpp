#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dsflsim/scenario.hpp"

namespace dsfl {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

// Free-space path loss in dB. Distances below the clamp floor are treated
// as the floor so the gain stays bounded.
inline double path_loss_db(double distance_m, double carrier_freq_hz,
                           double min_distance_m = 1.0) {
    if (carrier_freq_hz <= 0.0)
        throw std::invalid_argument("path_loss_db: carrier_freq_hz must be > 0");
    const double d = std::max(distance_m, min_distance_m);
    return 20.0 * std::log10(d) + 20.0 * std::log10(carrier_freq_hz) +
           20.0 * std::log10(4.0 * M_PI / kSpeedOfLight);
}

// Linear channel power gain, capped at 1.
inline double channel_gain(double distance_m, double carrier_freq_hz,
                           double min_distance_m = 1.0) {
    const double pl = path_loss_db(distance_m, carrier_freq_hz, min_distance_m);
    return std::min(1.0, std::pow(10.0, -pl / 10.0));
}

// Precomputed link gains and per-(server, RB) interference powers for one
// scenario. Derived purely from geometry and the carrier frequency.
struct ChannelState {
    int num_devices = 0;
    int num_servers = 0;
    int num_rbs = 0;
    std::vector<double> gain_;          // device x server, row-major
    std::vector<double> interference_;  // server x RB, row-major

    double gain(int device, int server) const {
        return gain_[static_cast<std::size_t>(device) * num_servers + server];
    }
    // received cellular interference power (watts) at `server` on `rb`
    double interference(int server, int rb) const {
        return interference_[static_cast<std::size_t>(server) * num_rbs + rb];
    }
};

inline ChannelState build_channel_state(const Scenario& s) {
    ChannelState ch;
    ch.num_devices = s.num_devices();
    ch.num_servers = s.num_servers();
    ch.num_rbs = s.num_rbs();
    ch.gain_.resize(static_cast<std::size_t>(ch.num_devices) * ch.num_servers);
    ch.interference_.resize(static_cast<std::size_t>(ch.num_servers) * ch.num_rbs);
    for (int d = 0; d < ch.num_devices; ++d) {
        for (int e = 0; e < ch.num_servers; ++e) {
            const double dist = distance(s.devices[d].pos, s.edge_servers[e].pos);
            ch.gain_[static_cast<std::size_t>(d) * ch.num_servers + e] =
                channel_gain(dist, s.carrier_freq_hz, s.min_distance_m);
        }
    }
    for (int e = 0; e < ch.num_servers; ++e) {
        for (int r = 0; r < ch.num_rbs; ++r) {
            const auto& rb = s.resource_blocks[r];
            const double dist = distance(rb.cellular_pos, s.edge_servers[e].pos);
            ch.interference_[static_cast<std::size_t>(e) * ch.num_rbs + r] =
                rb.cellular_tx_power_w *
                channel_gain(dist, s.carrier_freq_hz, s.min_distance_m);
        }
    }
    return ch;
}

// Uplink SINR of `device` transmitting to `server` on `rb`. The only
// interference source is the resource block's cellular user; learning
// devices never interfere with each other (exclusive RB use).
inline double sinr(int device, int rb, int server, double tx_power_w,
                   const Scenario& s, const ChannelState& ch) {
    if (device < 0 || device >= s.num_devices())
        throw std::out_of_range("sinr: unknown device id");
    if (rb < 0 || rb >= s.num_rbs())
        throw std::out_of_range("sinr: unknown resource block id");
    if (server < 0 || server >= s.num_servers())
        throw std::out_of_range("sinr: unknown server id");
    const double noise =
        s.noise_psd_w_per_hz * s.resource_blocks[rb].bandwidth_hz;
    return tx_power_w * ch.gain(device, server) /
           (noise + ch.interference(server, rb));
}

// Shannon rate over the block bandwidth.
inline double achievable_rate(double sinr_ratio, double bandwidth_hz) {
    if (sinr_ratio < 0.0)
        throw std::invalid_argument("achievable_rate: sinr must be >= 0");
    if (bandwidth_hz <= 0.0)
        throw std::invalid_argument("achievable_rate: bandwidth must be > 0");
    return bandwidth_hz * std::log2(1.0 + sinr_ratio);
}

}  // namespace dsfl
