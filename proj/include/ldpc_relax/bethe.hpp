#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ldpc_relax/channel.hpp"
#include "ldpc_relax/code.hpp"
#include "ldpc_relax/decoder.hpp"

namespace ldpc_relax {

/// Bit beliefs as (b(+1), b(-1)). Check tables have 2^k entries for a check of
/// degree k; bit j of the table index refers to the j-th entry of
/// check_neighbors(check), with 0 meaning spin +1.
struct Beliefs {
    std::vector<std::array<double, 2>> bit;
    std::vector<std::vector<double>> check;
};

struct FreeEnergyReport {
    double u_bethe = 0.0;
    double h_bethe = 0.0;
    double f_bethe = 0.0;
    double consistency_residual = 0.0;
};

class infinite_energy_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Beliefs implied by the current messages. With C the check-to-bit values of
/// the chosen variant:
///   b_i(s)  ~ exp(s (h_i + sum_{a in i} C(a -> i)))
///   b_a(s)  ~ [prod s = +1] prod_{i in a} exp(s_i (h_i + sum_{b in i, b != a} C(b -> i)))
/// The check-side field of bit i is h_i / q_i from the factor plus the log-ratio
/// of prod_{b != a} mu_{ib} with each mu_{ib} normalized to sum 1.
Beliefs beliefs_from_messages(const ParityCheckCode &code, const LlrVector &h, const Messages &messages,
                              Variant variant = Variant::sum_product);

/// U, H and F = U - H for the factors f_a = exp(sum_{i in a} h_i s_i / q_i) [prod s = +1],
/// plus a direct evidence factor exp(h_i s_i) for bits attached to no check.
/// Throws infinite_energy_error when a check table puts more than 1e-12 on an odd-parity
/// configuration.
FreeEnergyReport bethe_free_energy(const ParityCheckCode &code, const LlrVector &h, const Beliefs &beliefs);

/// max over (check, bit in check, spin) of |sum_{rest} b_a - b_i|.
double consistency_residual(const ParityCheckCode &code, const Beliefs &beliefs);

struct ExactSolution {
    std::vector<std::array<double, 2>> marginals;
    std::vector<double> marginal_llr;  // (1/2) ln p(+1)/p(-1)
    double log_z = 0.0;
};

inline constexpr std::size_t brute_force_max_bits = 25;

/// Exact marginals and ln Z by enumerating all 2^N configurations.
ExactSolution brute_force(const ParityCheckCode &code, const LlrVector &h);

}  // namespace ldpc_relax
