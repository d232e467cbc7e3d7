#include "ldpc_relax/bethe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

namespace ldpc_relax {

namespace {

constexpr double zero_factor_tolerance = 1e-12;

double entropy_term(double b) { return b > 0.0 ? b * std::log(b) : 0.0; }

// Spin of the j-th neighbor in table index idx.
double spin_at(std::size_t idx, std::size_t j) { return ((idx >> j) & 1U) ? -1.0 : 1.0; }

bool even_parity(std::size_t idx) { return std::popcount(idx) % 2 == 0; }

}  // namespace

Beliefs beliefs_from_messages(const ParityCheckCode &code, const LlrVector &h, const Messages &messages,
                              Variant variant) {
    if (h.size() != code.n_bits()) throw std::invalid_argument("llr length does not match code length");
    const auto incoming = check_to_bit_all(code, variant, messages);

    Beliefs beliefs;
    beliefs.bit.resize(code.n_bits());
    for (std::size_t i = 0; i < code.n_bits(); ++i) {
        double field = h.h[i];
        const std::size_t begin = code.bit_edge_begin(i);
        for (std::size_t e = begin; e < begin + code.bit_degree(i); ++e) field += incoming[e];
        beliefs.bit[i] = {1.0 / (1.0 + std::exp(-2.0 * field)), 1.0 / (1.0 + std::exp(2.0 * field))};
    }

    beliefs.check.resize(code.n_checks());
    std::vector<double> fields;
    std::vector<double> log_weight;
    for (std::size_t a = 0; a < code.n_checks(); ++a) {
        auto bits = code.check_neighbors(a);
        const std::size_t k = bits.size();
        fields.assign(k, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t i = bits[j];
            const std::size_t begin = code.bit_edge_begin(i);
            const std::size_t own = code.check_edges(a)[j];
            double field = h.h[i];
            for (std::size_t e = begin; e < begin + code.bit_degree(i); ++e)
                if (e != own) field += incoming[e];
            fields[j] = field;
        }

        const std::size_t size = std::size_t{1} << k;
        log_weight.assign(size, -std::numeric_limits<double>::infinity());
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t idx = 0; idx < size; ++idx) {
            if (!even_parity(idx)) continue;
            double w = 0.0;
            for (std::size_t j = 0; j < k; ++j) w += spin_at(idx, j) * fields[j];
            log_weight[idx] = w;
            peak = std::max(peak, w);
        }
        auto &table = beliefs.check[a];
        table.assign(size, 0.0);
        double total = 0.0;
        for (std::size_t idx = 0; idx < size; ++idx) {
            if (!even_parity(idx)) continue;
            table[idx] = std::exp(log_weight[idx] - peak);
            total += table[idx];
        }
        for (auto &b : table) b /= total;
    }
    return beliefs;
}

double consistency_residual(const ParityCheckCode &code, const Beliefs &beliefs) {
    double worst = 0.0;
    for (std::size_t a = 0; a < code.n_checks(); ++a) {
        auto bits = code.check_neighbors(a);
        const auto &table = beliefs.check[a];
        for (std::size_t j = 0; j < bits.size(); ++j) {
            double plus = 0.0, minus = 0.0;
            for (std::size_t idx = 0; idx < table.size(); ++idx) ((idx >> j) & 1U ? minus : plus) += table[idx];
            const auto &b = beliefs.bit[bits[j]];
            worst = std::max({worst, std::fabs(plus - b[0]), std::fabs(minus - b[1])});
        }
    }
    return worst;
}

FreeEnergyReport bethe_free_energy(const ParityCheckCode &code, const LlrVector &h, const Beliefs &beliefs) {
    if (h.size() != code.n_bits() || beliefs.bit.size() != code.n_bits() || beliefs.check.size() != code.n_checks())
        throw std::invalid_argument("beliefs do not match the code");

    FreeEnergyReport report;
    double check_entropy_sum = 0.0;  // sum b ln b over check tables
    for (std::size_t a = 0; a < code.n_checks(); ++a) {
        auto bits = code.check_neighbors(a);
        const auto &table = beliefs.check[a];
        if (table.size() != (std::size_t{1} << bits.size()))
            throw std::invalid_argument("check table " + std::to_string(a) + " has the wrong size");
        for (std::size_t idx = 0; idx < table.size(); ++idx) {
            const double b = table[idx];
            check_entropy_sum += entropy_term(b);
            if (b <= 0.0) continue;
            if (!even_parity(idx)) {
                if (b > zero_factor_tolerance)
                    throw infinite_energy_error("check " + std::to_string(a) +
                                                " puts mass on an odd-parity configuration");
                continue;
            }
            double log_factor = 0.0;
            for (std::size_t j = 0; j < bits.size(); ++j)
                log_factor += spin_at(idx, j) * h.h[bits[j]] / static_cast<double>(code.bit_degree(bits[j]));
            report.u_bethe -= b * log_factor;
        }
    }

    double bit_entropy_sum = 0.0;  // sum (q_i - 1) sum b ln b
    for (std::size_t i = 0; i < code.n_bits(); ++i) {
        const auto &b = beliefs.bit[i];
        const auto q = static_cast<double>(code.bit_degree(i));
        bit_entropy_sum += (q - 1.0) * (entropy_term(b[0]) + entropy_term(b[1]));
        if (code.bit_degree(i) == 0) report.u_bethe -= (b[0] - b[1]) * h.h[i];
    }

    report.h_bethe = -check_entropy_sum + bit_entropy_sum;
    report.f_bethe = report.u_bethe - report.h_bethe;
    report.consistency_residual = consistency_residual(code, beliefs);
    return report;
}

ExactSolution brute_force(const ParityCheckCode &code, const LlrVector &h) {
    const std::size_t n = code.n_bits();
    if (n > brute_force_max_bits)
        throw std::invalid_argument("brute force limited to " + std::to_string(brute_force_max_bits) + " bits, got " +
                                    std::to_string(n));
    if (h.size() != n) throw std::invalid_argument("llr length does not match code length");

    std::vector<std::uint32_t> masks(code.n_checks(), 0);
    for (std::size_t a = 0; a < code.n_checks(); ++a)
        for (auto i : code.check_neighbors(a)) masks[a] |= std::uint32_t{1} << i;

    double h_total = 0.0;
    for (double v : h.h) h_total += v;

    // Bit i set in x means spin -1; log weight = sum_i h_i s_i on valid configurations.
    auto valid = [&](std::uint32_t x) {
        return std::all_of(masks.begin(), masks.end(), [x](std::uint32_t m) { return std::popcount(x & m) % 2 == 0; });
    };
    auto log_weight = [&](std::uint32_t x) {
        double w = h_total;
        for (std::size_t i = 0; i < n; ++i)
            if ((x >> i) & 1U) w -= 2.0 * h.h[i];
        return w;
    };

    const std::uint64_t count = std::uint64_t{1} << n;
    double peak = -std::numeric_limits<double>::infinity();
    for (std::uint64_t x = 0; x < count; ++x) {
        const auto c = static_cast<std::uint32_t>(x);
        if (valid(c)) peak = std::max(peak, log_weight(c));
    }

    double z = 0.0;
    std::vector<double> plus(n, 0.0), minus(n, 0.0);
    for (std::uint64_t x = 0; x < count; ++x) {
        const auto c = static_cast<std::uint32_t>(x);
        if (!valid(c)) continue;
        const double w = std::exp(log_weight(c) - peak);
        z += w;
        for (std::size_t i = 0; i < n; ++i) ((c >> i) & 1U ? minus : plus)[i] += w;
    }

    ExactSolution out;
    out.log_z = peak + std::log(z);
    out.marginals.resize(n);
    out.marginal_llr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.marginals[i] = {plus[i] / z, minus[i] / z};
        out.marginal_llr[i] = 0.5 * (std::log(plus[i]) - std::log(minus[i]));
    }
    return out;
}

}  // namespace ldpc_relax
