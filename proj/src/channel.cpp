#include "ldpc_relax/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace ldpc_relax {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RandomStream trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
    const std::uint64_t a = splitmix64(master_seed);
    const std::uint64_t b = splitmix64(a ^ splitmix64(trial_index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return RandomStream(seq);
}

ChannelOutput transmit_awgn(const HardWord &word, double snr, RandomStream &rng) {
    if (!(snr > 0.0) || !std::isfinite(snr)) throw std::invalid_argument("snr must be a positive finite value");
    std::normal_distribution<double> noise(0.0, 1.0 / std::sqrt(snr));
    ChannelOutput out;
    out.snr = snr;
    out.received.reserve(word.size());
    for (auto s : word.bits) out.received.push_back(static_cast<double>(s) + noise(rng));
    return out;
}

LlrVector llr_from_channel(const ChannelOutput &out) {
    LlrVector llr;
    llr.h.reserve(out.received.size());
    for (double x : out.received) llr.h.push_back(out.snr * x);
    return llr;
}

}  // namespace ldpc_relax
