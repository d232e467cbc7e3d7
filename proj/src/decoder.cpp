#include "ldpc_relax/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ldpc_relax {

namespace {

double clamp_message(double v) { return std::clamp(v, -message_clamp, message_clamp); }

double atanh_clamped(double product) {
    return std::atanh(std::clamp(product, -tanh_product_limit, tanh_product_limit));
}

void require_sizes(const ParityCheckCode &code, std::size_t n_messages, std::size_t n_llr) {
    if (n_messages != code.n_edges())
        throw std::invalid_argument("message count " + std::to_string(n_messages) + " does not match edge count " +
                                    std::to_string(code.n_edges()));
    if (n_llr != code.n_bits())
        throw std::invalid_argument("llr length " + std::to_string(n_llr) + " does not match code length " +
                                    std::to_string(code.n_bits()));
}

struct SignMin {
    double sign = 1.0;
    double magnitude = std::numeric_limits<double>::infinity();

    SignMin with(double v) const {
        return {v < 0.0 ? -sign : sign, std::min(magnitude, std::fabs(v))};
    }
    SignMin with(const SignMin &o) const { return {sign * o.sign, std::min(magnitude, o.magnitude)}; }
    double value() const { return clamp_message(sign * magnitude); }
};

bool satisfies_all_checks(const ParityCheckCode &code, const HardWord &word) {
    for (std::size_t a = 0; a < code.n_checks(); ++a) {
        int product = 1;
        for (auto i : code.check_neighbors(a)) product *= word.bits[i];
        if (product != 1) return false;
    }
    return true;
}

}  // namespace

std::string to_string(Variant v) { return v == Variant::sum_product ? "sumprod" : "minsum"; }

Relaxation Relaxation::finite(double delta) {
    if (std::isnan(delta) || !(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (std::isinf(delta)) return infinite();
    return Relaxation(1.0 / delta);
}

void DecoderConfig::validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be at least 1");
    if (!(delta.inverse() >= 0.0) || !std::isfinite(delta.inverse()))
        throw std::invalid_argument("delta must be positive");
}

Messages init_messages(const ParityCheckCode &code, const LlrVector &h) {
    if (h.size() != code.n_bits())
        throw std::invalid_argument("llr length " + std::to_string(h.size()) + " does not match code length " +
                                    std::to_string(code.n_bits()));
    Messages m;
    m.eta.resize(code.n_edges());
    for (std::size_t e = 0; e < code.n_edges(); ++e) m.eta[e] = h.h[code.edge_bit(e)];
    return m;
}

double check_to_bit_sum_product(const Messages &messages, const ParityCheckCode &code, std::size_t bit,
                                std::size_t check) {
    code.edge_id(bit, check);
    auto bits = code.check_neighbors(check);
    auto edges = code.check_edges(check);
    if (bits.size() == 1) return message_clamp;
    if (bits.size() == 2) return messages.eta[edges[bits[0] == bit ? 1 : 0]];
    double product = 1.0;
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k] != bit) product *= std::tanh(messages.eta[edges[k]]);
    return atanh_clamped(product);
}

double check_to_bit_min_sum(const Messages &messages, const ParityCheckCode &code, std::size_t bit,
                            std::size_t check) {
    code.edge_id(bit, check);
    SignMin acc;
    auto bits = code.check_neighbors(check);
    auto edges = code.check_edges(check);
    for (std::size_t k = 0; k < bits.size(); ++k)
        if (bits[k] != bit) acc = acc.with(messages.eta[edges[k]]);
    return acc.value();
}

void check_to_bit_all(const ParityCheckCode &code, Variant variant, std::span<const double> eta,
                      std::span<double> out) {
    const std::size_t width = code.max_check_degree();
    if (variant == Variant::sum_product) {
        std::vector<double> forward(width + 1), backward(width + 1);
        for (std::size_t a = 0; a < code.n_checks(); ++a) {
            auto edges = code.check_edges(a);
            const std::size_t k = edges.size();
            if (k <= 2) {
                // Exclusion sets of size 0 or 1: certain parity, or the identity map.
                if (k == 1) out[edges[0]] = message_clamp;
                if (k == 2) {
                    out[edges[0]] = eta[edges[1]];
                    out[edges[1]] = eta[edges[0]];
                }
                continue;
            }
            // forward[j] = prod of tanh over positions < j; backward[j] over positions >= j.
            forward[0] = 1.0;
            for (std::size_t j = 0; j < k; ++j) forward[j + 1] = forward[j] * std::tanh(eta[edges[j]]);
            backward[k] = 1.0;
            for (std::size_t j = k; j-- > 0;) backward[j] = backward[j + 1] * std::tanh(eta[edges[j]]);
            for (std::size_t j = 0; j < k; ++j) out[edges[j]] = atanh_clamped(forward[j] * backward[j + 1]);
        }
    } else {
        std::vector<SignMin> forward(width + 1), backward(width + 1);
        for (std::size_t a = 0; a < code.n_checks(); ++a) {
            auto edges = code.check_edges(a);
            const std::size_t k = edges.size();
            forward[0] = SignMin{};
            for (std::size_t j = 0; j < k; ++j) forward[j + 1] = forward[j].with(eta[edges[j]]);
            backward[k] = SignMin{};
            for (std::size_t j = k; j-- > 0;) backward[j] = backward[j + 1].with(eta[edges[j]]);
            for (std::size_t j = 0; j < k; ++j) out[edges[j]] = forward[j].with(backward[j + 1]).value();
        }
    }
}

std::vector<double> check_to_bit_all(const ParityCheckCode &code, Variant variant, const Messages &messages) {
    if (messages.eta.size() != code.n_edges()) throw std::invalid_argument("message count does not match edge count");
    std::vector<double> out(code.n_edges());
    check_to_bit_all(code, variant, messages.eta, out);
    return out;
}

namespace detail {

void relaxed_bit_pass(const ParityCheckCode &code, std::span<const double> h, std::span<const double> check_values,
                      std::span<const double> eta, double inverse_delta, std::span<double> eta_next) {
    for (std::size_t i = 0; i < code.n_bits(); ++i) {
        const std::size_t begin = code.bit_edge_begin(i);
        const std::size_t q = code.bit_degree(i);
        const std::size_t end = begin + q;

        double previous = 0.0;
        for (std::size_t e = begin; e < end; ++e) previous += eta[e];

        // eta_next temporarily holds R_{ia}.
        double r_sum = 0.0;
        for (std::size_t e = begin; e < end; ++e) {
            double extrinsic = h[i];
            for (std::size_t f = begin; f < end; ++f)
                if (f != e) extrinsic += check_values[f];
            eta_next[e] = extrinsic + inverse_delta * previous;
            r_sum += eta_next[e];
        }
        const double new_sum = r_sum / (1.0 + static_cast<double>(q) * inverse_delta);
        for (std::size_t e = begin; e < end; ++e) eta_next[e] = clamp_message(eta_next[e] - inverse_delta * new_sum);
    }
}

void accumulate_field(const ParityCheckCode &code, std::span<const double> h, std::span<const double> check_values,
                      std::span<double> field) {
    for (std::size_t i = 0; i < code.n_bits(); ++i) {
        double incoming = 0.0;
        const std::size_t begin = code.bit_edge_begin(i);
        for (std::size_t e = begin; e < begin + code.bit_degree(i); ++e) incoming += check_values[e];
        field[i] = h[i] + incoming;
    }
}

}  // namespace detail

Messages relaxed_step(const Messages &messages, const ParityCheckCode &code, const LlrVector &h,
                      const DecoderConfig &config) {
    config.validate();
    require_sizes(code, messages.eta.size(), h.size());
    std::vector<double> check_values(code.n_edges());
    check_to_bit_all(code, config.variant, messages.eta, check_values);
    Messages next;
    next.eta.resize(code.n_edges());
    next.iteration = messages.iteration + 1;
    detail::relaxed_bit_pass(code, h.h, check_values, messages.eta, config.delta.inverse(), next.eta);
    return next;
}

Messages standard_step(const Messages &messages, const ParityCheckCode &code, const LlrVector &h, Variant variant) {
    require_sizes(code, messages.eta.size(), h.size());
    std::vector<double> check_values(code.n_edges());
    check_to_bit_all(code, variant, messages.eta, check_values);
    Messages next;
    next.eta.resize(code.n_edges());
    next.iteration = messages.iteration + 1;
    for (std::size_t i = 0; i < code.n_bits(); ++i) {
        const std::size_t begin = code.bit_edge_begin(i);
        const std::size_t end = begin + code.bit_degree(i);
        for (std::size_t e = begin; e < end; ++e) {
            double extrinsic = h.h[i];
            for (std::size_t f = begin; f < end; ++f)
                if (f != e) extrinsic += check_values[f];
            next.eta[e] = clamp_message(extrinsic);
        }
    }
    return next;
}

std::vector<double> posterior_field(const Messages &messages, const ParityCheckCode &code, const LlrVector &h,
                                    Variant variant) {
    require_sizes(code, messages.eta.size(), h.size());
    std::vector<double> check_values(code.n_edges());
    check_to_bit_all(code, variant, messages.eta, check_values);
    std::vector<double> field(code.n_bits());
    detail::accumulate_field(code, h.h, check_values, field);
    return field;
}

HardWord hard_decision(std::span<const double> field) {
    HardWord word;
    word.bits.reserve(field.size());
    for (double m : field) word.bits.push_back(m >= 0.0 ? Spin{1} : Spin{-1});
    return word;
}

Decoder::Decoder(const ParityCheckCode &code, DecoderConfig config) : code_(code), config_(config) {
    config_.validate();
    next_.resize(code.n_edges());
    check_values_.resize(code.n_edges());
    field_.resize(code.n_bits());
    decision_.bits.resize(code.n_bits());
}

DecodeResult Decoder::decode(const LlrVector &h, const IterationObserver &observer) {
    current_ = init_messages(code_, h);

    for (std::size_t i = 0; i < code_.n_bits(); ++i) decision_.bits[i] = h.h[i] >= 0.0 ? Spin{1} : Spin{-1};
    bool codeword = satisfies_all_checks(code_, decision_);
    if (observer) observer(IterationView{0, current_.eta, h.h, decision_, codeword});
    if (codeword) return DecodeResult{DecodeStatus::converged, decision_, 0, 0};

    const double inverse_delta = config_.delta.inverse();
    check_to_bit_all(code_, config_.variant, current_.eta, check_values_);
    for (std::size_t n = 1; n <= config_.max_iterations; ++n) {
        detail::relaxed_bit_pass(code_, h.h, check_values_, current_.eta, inverse_delta, next_);
        std::swap(current_.eta, next_);
        current_.iteration = n;
        // The check pass on eta^(n) serves both this decision and the next update.
        check_to_bit_all(code_, config_.variant, current_.eta, check_values_);
        detail::accumulate_field(code_, h.h, check_values_, field_);
        for (std::size_t i = 0; i < code_.n_bits(); ++i) decision_.bits[i] = field_[i] >= 0.0 ? Spin{1} : Spin{-1};
        codeword = satisfies_all_checks(code_, decision_);
        if (observer) observer(IterationView{n, current_.eta, field_, decision_, codeword});
        if (codeword) return DecodeResult{DecodeStatus::converged, decision_, n, n};
    }
    return DecodeResult{DecodeStatus::exhausted, decision_, 0, config_.max_iterations};
}

DecodeResult decode(const ParityCheckCode &code, const LlrVector &h, const DecoderConfig &config) {
    Decoder decoder(code, config);
    return decoder.decode(h);
}

}  // namespace ldpc_relax
