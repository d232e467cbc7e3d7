#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "ldpc_relax/channel.hpp"
#include "ldpc_relax/code.hpp"

namespace ldpc_relax {

/// Bound on |eta| after every update.
inline constexpr double message_clamp = 19.0;
/// Bound on |prod tanh| before atanh.
inline constexpr double tanh_product_limit = 1.0 - 1e-12;

enum class Variant { sum_product, min_sum };

std::string to_string(Variant v);

/// The relaxation parameter Delta, held as 1/Delta so that Delta = infinity is exactly 0.
class Relaxation {
public:
    static Relaxation infinite() { return Relaxation(0.0); }
    /// Throws std::invalid_argument unless delta > 0. An infinite delta maps to infinite().
    static Relaxation finite(double delta);

    double inverse() const { return inverse_; }
    bool is_infinite() const { return inverse_ == 0.0; }
    double delta() const { return is_infinite() ? std::numeric_limits<double>::infinity() : 1.0 / inverse_; }

    bool operator==(const Relaxation &) const = default;

private:
    explicit Relaxation(double inverse) : inverse_(inverse) {}
    double inverse_;
};

struct DecoderConfig {
    Variant variant = Variant::min_sum;
    Relaxation delta = Relaxation::infinite();
    std::size_t max_iterations = 16384;

    void validate() const;
};

/// One eta per edge (edge ids as in ParityCheckCode) and the iteration they belong to.
struct Messages {
    std::vector<double> eta;
    std::size_t iteration = 0;
};

enum class DecodeStatus { converged, exhausted };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::exhausted;
    HardWord word;
    std::size_t terminated_at = 0;  // meaningful when converged
    std::size_t iterations_run = 0;
};

/// eta^(0) = h_i on every edge of bit i.
Messages init_messages(const ParityCheckCode &code, const LlrVector &h);

/// atanh of prod_{j in check, j != bit} tanh eta_{j,check}, computed directly for one edge.
double check_to_bit_sum_product(const Messages &messages, const ParityCheckCode &code, std::size_t bit,
                                std::size_t check);
/// prod sign(eta) * min |eta| over j in check, j != bit, computed directly for one edge.
double check_to_bit_min_sum(const Messages &messages, const ParityCheckCode &code, std::size_t bit,
                            std::size_t check);

/// All check-to-bit values C(check -> bit), indexed by edge id. Uses forward/backward
/// exclusion aggregates per check, so the cost is linear in the edge count.
void check_to_bit_all(const ParityCheckCode &code, Variant variant, std::span<const double> eta,
                      std::span<double> out);
std::vector<double> check_to_bit_all(const ParityCheckCode &code, Variant variant, const Messages &messages);

/// One synchronous relaxed update. For every edge (i, a) the result satisfies
///
///   eta'_{ia} + (1/Delta) sum_{b in i} eta'_{ib} = R_{ia},
///   R_{ia} = h_i + sum_{b in i, b != a} C(b -> i) + (1/Delta) sum_{b in i} eta_{ib},
///
/// solved per bit in closed form. Outputs are clamped to +-message_clamp.
Messages relaxed_step(const Messages &messages, const ParityCheckCode &code, const LlrVector &h,
                      const DecoderConfig &config);

/// Plain BP update eta'_{ia} = h_i + sum_{b != a} C(b -> i), clamped.
Messages standard_step(const Messages &messages, const ParityCheckCode &code, const LlrVector &h, Variant variant);

/// Per-bit half-LLR of the belief: m_i = h_i + sum_{a in i} C(a -> i).
std::vector<double> posterior_field(const Messages &messages, const ParityCheckCode &code, const LlrVector &h,
                                    Variant variant);

/// +1 where field >= 0, else -1.
HardWord hard_decision(std::span<const double> field);

/// State exposed to an observer at each checked iteration n. For n >= 1 the
/// decision is taken from posterior_field(eta^(n)); at n = 0 it is the
/// channel decision.
struct IterationView {
    std::size_t iteration;
    std::span<const double> messages;  // eta^(n)
    std::span<const double> field;            // h when n == 0
    const HardWord &decision;
    bool codeword;
};

using IterationObserver = std::function<void(const IterationView &)>;

/// Decoding loop with reusable buffers; one instance per thread.
class Decoder {
public:
    Decoder(const ParityCheckCode &code, DecoderConfig config);

    DecodeResult decode(const LlrVector &h, const IterationObserver &observer = {});

    const DecoderConfig &config() const { return config_; }
    /// Messages at the end of the last decode.
    const Messages &messages() const { return current_; }

private:
    const ParityCheckCode &code_;
    DecoderConfig config_;
    Messages current_;
    std::vector<double> next_;
    std::vector<double> check_values_;
    std::vector<double> field_;
    HardWord decision_;
};

DecodeResult decode(const ParityCheckCode &code, const LlrVector &h, const DecoderConfig &config);

namespace detail {

// Shared bit-side update; inverse_delta == 0 reduces it to the plain BP rule.
void relaxed_bit_pass(const ParityCheckCode &code, std::span<const double> h, std::span<const double> check_values,
                      std::span<const double> eta, double inverse_delta, std::span<double> eta_next);

// field[i] = h[i] + sum of incoming check values.
void accumulate_field(const ParityCheckCode &code, std::span<const double> h, std::span<const double> check_values,
                      std::span<double> field);

}  // namespace detail

}  // namespace ldpc_relax
