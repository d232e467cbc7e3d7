#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ldpc_relax/code.hpp"

namespace ldpc_relax {

/// Received values x_i for antipodal signalling; snr is the linear s^2 of the
/// density exp(-s^2 (x - sigma)^2 / 2) / sqrt(2 pi / s^2).
struct ChannelOutput {
    std::vector<double> received;
    double snr = 1.0;
};

/// Half log-likelihood ratios, h_i = (1/2) ln p(x_i|+1) / p(x_i|-1).
struct LlrVector {
    std::vector<double> h;

    std::size_t size() const { return h.size(); }
};

using RandomStream = std::mt19937_64;

/// Independent stream for one trial, a pure function of (master_seed, trial_index).
RandomStream trial_stream(std::uint64_t master_seed, std::uint64_t trial_index);

/// x_i = sigma_i + z_i with z_i ~ N(0, 1/snr). Throws std::invalid_argument unless snr > 0.
ChannelOutput transmit_awgn(const HardWord &word, double snr, RandomStream &rng);

/// h_i = snr * x_i.
LlrVector llr_from_channel(const ChannelOutput &out);

}  // namespace ldpc_relax
