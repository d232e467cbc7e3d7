#include <doctest.h>

#include <cmath>
#include <random>

#include "ldpc_relax/decoder.hpp"
#include "test_support.hpp"

using namespace ldpc_relax;
using test_support::small_code;

namespace {

// Residual of the implicit relaxed equation, evaluated edge by edge with the
// per-edge check rules rather than the two-pass aggregates.
double implicit_residual(const ParityCheckCode &code, const LlrVector &h, const Messages &before,
                         const Messages &after, Variant variant, double inverse_delta) {
    double worst = 0.0;
    for (std::size_t e = 0; e < code.n_edges(); ++e) {
        const auto i = code.edge_bit(e);
        const auto a = code.edge_check(e);
        double lhs = after.eta[e];
        double rhs = h.h[i];
        for (auto b : code.bit_neighbors(i)) {
            lhs += inverse_delta * after.eta[code.edge_id(i, b)];
            rhs += inverse_delta * before.eta[code.edge_id(i, b)];
            if (b == a) continue;
            rhs += variant == Variant::sum_product ? check_to_bit_sum_product(before, code, i, b)
                                                   : check_to_bit_min_sum(before, code, i, b);
        }
        worst = std::max(worst, std::fabs(lhs - rhs));
    }
    return worst;
}

DecoderConfig config_for(Variant v, double delta) {
    return DecoderConfig{v, std::isinf(delta) ? Relaxation::infinite() : Relaxation::finite(delta), 100};
}

}  // namespace

TEST_CASE("Relaxation stores 1/delta") {
    CHECK(Relaxation::infinite().inverse() == 0.0);
    CHECK(Relaxation::infinite().is_infinite());
    CHECK(Relaxation::finite(4.0).inverse() == 0.25);
    CHECK(Relaxation::finite(HUGE_VAL).is_infinite());
    CHECK_THROWS_AS(Relaxation::finite(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Relaxation::finite(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(Relaxation::finite(NAN), std::invalid_argument);
    CHECK_THROWS_AS((DecoderConfig{Variant::min_sum, Relaxation::infinite(), 0}.validate()), std::invalid_argument);
}

TEST_CASE("init_messages copies h onto each edge") {
    auto code = small_code();
    auto zero = init_messages(code, LlrVector{{0, 0, 0}});
    CHECK(zero.eta == std::vector<double>(4, 0.0));
    CHECK(zero.iteration == 0);

    auto m = init_messages(code, LlrVector{{1, -2, 3}});
    CHECK(m.eta.size() == code.n_edges());
    CHECK(m.eta[code.edge_id(1, 0)] == -2.0);
    CHECK(m.eta[code.edge_id(1, 1)] == -2.0);
    CHECK_THROWS_AS(init_messages(code, LlrVector{{1, 2}}), std::invalid_argument);
}

TEST_CASE("check_to_bit_sum_product") {
    auto code = ParityCheckCode::from_checks(3, {{0, 1, 2}});
    Messages m{{0.3, 0.5, -0.7}, 0};
    CHECK(check_to_bit_sum_product(m, code, 0, 0) == doctest::Approx(-0.2869104499).epsilon(1e-9));

    Messages with_zero{{0.3, 0.0, -0.7}, 0};
    CHECK(check_to_bit_sum_product(with_zero, code, 0, 0) == 0.0);

    auto pair = small_code();
    Messages p{{0.1, -1.25, 0.4, 2.0}, 0};
    CHECK(check_to_bit_sum_product(p, pair, 0, 0) == -1.25);
    CHECK(check_to_bit_sum_product(p, pair, 2, 1) == 0.4);
    CHECK_THROWS_AS(check_to_bit_sum_product(p, pair, 0, 1), std::out_of_range);
}

TEST_CASE("check_to_bit_min_sum") {
    auto code = ParityCheckCode::from_checks(4, {{0, 1, 2}, {0, 1, 2, 3}});
    Messages m = init_messages(code, LlrVector{{9, 0.5, -0.7, 0}});
    CHECK(check_to_bit_min_sum(m, code, 0, 0) == -0.5);

    Messages n = init_messages(code, LlrVector{{9, -1, -2, -3}});
    CHECK(check_to_bit_min_sum(n, code, 0, 1) == -1.0);

    auto pair = small_code();
    Messages p{{0.1, -1.25, 0.4, 2.0}, 0};
    CHECK(check_to_bit_min_sum(p, pair, 0, 0) == -1.25);
}

TEST_CASE("degree-one checks pin their bit") {
    auto code = build_qc_code(1, {{0}});
    Messages m{{-3.0}, 0};
    CHECK(check_to_bit_sum_product(m, code, 0, 0) == message_clamp);
    CHECK(check_to_bit_min_sum(m, code, 0, 0) == message_clamp);
}

TEST_CASE("two-pass aggregates match the per-edge rules") {
    std::mt19937_64 rng(17);
    auto code = tanner_155_64();
    for (int trial = 0; trial < 20; ++trial) {
        auto m = test_support::random_messages(rng, code, 4.0);
        auto sp = check_to_bit_all(code, Variant::sum_product, m);
        auto ms = check_to_bit_all(code, Variant::min_sum, m);
        for (std::size_t e = 0; e < code.n_edges(); ++e) {
            const auto i = code.edge_bit(e), a = code.edge_check(e);
            CHECK(sp[e] == doctest::Approx(check_to_bit_sum_product(m, code, i, a)).epsilon(1e-12));
            CHECK(ms[e] == check_to_bit_min_sum(m, code, i, a));
        }
    }
}

TEST_CASE("relaxed_step hand examples") {
    auto code = small_code();
    SUBCASE("zero state is fixed under standard BP") {
        Messages zero{std::vector<double>(4, 0.0), 0};
        for (auto v : {Variant::sum_product, Variant::min_sum}) {
            auto next = relaxed_step(zero, code, LlrVector{{0, 0, 0}}, config_for(v, HUGE_VAL));
            CHECK(next.eta == std::vector<double>(4, 0.0));
            CHECK(next.iteration == 1);
        }
    }
    SUBCASE("degree-one bit, delta = 1") {
        Messages zero{std::vector<double>(4, 0.0), 0};
        auto next = relaxed_step(zero, code, LlrVector{{2, 0, 0}}, config_for(Variant::sum_product, 1.0));
        CHECK(next.eta[code.edge_id(0, 0)] == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("relaxed_step with delta = inf is the standard update, exactly") {
    std::mt19937_64 rng(3);
    auto code = tanner_155_64();
    for (int trial = 0; trial < 20; ++trial) {
        auto h = test_support::random_llr(rng, code.n_bits(), 3.0);
        auto m = test_support::random_messages(rng, code, 6.0);
        for (auto v : {Variant::sum_product, Variant::min_sum}) {
            auto relaxed = relaxed_step(m, code, h, config_for(v, HUGE_VAL));
            auto standard = standard_step(m, code, h, v);
            CHECK(relaxed.eta == standard.eta);
        }
    }
}

TEST_CASE("large delta is continuous with delta = inf") {
    std::mt19937_64 rng(4);
    auto code = tanner_155_64();
    for (int trial = 0; trial < 20; ++trial) {
        auto h = test_support::random_llr(rng, code.n_bits(), 3.0);
        auto m = test_support::random_messages(rng, code, 6.0);
        for (auto v : {Variant::sum_product, Variant::min_sum}) {
            auto a = relaxed_step(m, code, h, config_for(v, 1e9));
            auto b = relaxed_step(m, code, h, config_for(v, HUGE_VAL));
            for (std::size_t e = 0; e < code.n_edges(); ++e) CHECK(std::fabs(a.eta[e] - b.eta[e]) <= 1e-6);
        }
    }
}

TEST_CASE("relaxed_step output satisfies the implicit equation") {
    std::mt19937_64 rng(5);
    auto code = tanner_155_64();
    for (int trial = 0; trial < 20; ++trial) {
        auto h = test_support::random_llr(rng, code.n_bits(), 1.0);
        auto m = test_support::random_messages(rng, code, 2.0);
        for (double delta : {0.1, 0.25, 1.0, 4.0, 100.0})
            for (auto v : {Variant::sum_product, Variant::min_sum}) {
                auto next = relaxed_step(m, code, h, config_for(v, delta));
                CHECK(implicit_residual(code, h, m, next, v, 1.0 / delta) < 1e-10);
            }
    }
}

TEST_CASE("tree fixed points are preserved for every delta") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = test_support::random_tree_instance(rng);
        for (double delta : {0.1, 1.0, 10.0, HUGE_VAL}) {
            auto next = relaxed_step(inst.fixed_point, inst.code, inst.h, config_for(Variant::sum_product, delta));
            for (std::size_t e = 0; e < inst.code.n_edges(); ++e)
                CHECK(std::fabs(next.eta[e] - inst.fixed_point.eta[e]) < 1e-10);
        }
    }
}

TEST_CASE("standard BP on a tree converges within the diameter and is exact") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto inst = test_support::random_tree_instance(rng);
        auto m = init_messages(inst.code, inst.h);
        const auto steps = test_support::bit_diameter(inst.code) + 1;
        for (std::size_t k = 0; k < steps; ++k) m = relaxed_step(m, inst.code, inst.h, config_for(Variant::sum_product, HUGE_VAL));
        for (std::size_t e = 0; e < inst.code.n_edges(); ++e)
            CHECK(m.eta[e] == doctest::Approx(inst.fixed_point.eta[e]).epsilon(1e-12));
        auto field = posterior_field(m, inst.code, inst.h, Variant::sum_product);
        auto exact = test_support::naive_marginal_llr(inst.code, inst.h);
        for (std::size_t i = 0; i < field.size(); ++i) CHECK(std::fabs(field[i] - exact[i]) < 1e-9);
    }
}

TEST_CASE("min-sum and sum-product agree on graphs with check degree <= 2") {
    // A 6-cycle plus a pendant bit.
    auto code = ParityCheckCode::from_checks(7, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {2, 6}});
    std::mt19937_64 rng(9);
    for (double delta : {0.5, 2.0, HUGE_VAL}) {
        auto h = test_support::random_llr(rng, code.n_bits(), 2.0);
        auto a = init_messages(code, h), b = a;
        for (int n = 0; n < 15; ++n) {
            a = relaxed_step(a, code, h, config_for(Variant::sum_product, delta));
            b = relaxed_step(b, code, h, config_for(Variant::min_sum, delta));
            CHECK(a.eta == b.eta);
        }
    }
}

TEST_CASE("flipping h by a codeword flips the trajectory") {
    std::mt19937_64 rng(10);
    auto code = test_support::hamming_7_4();
    HardWord flip;
    for (std::uint64_t x = 1; x < 128 && flip.bits.empty(); ++x) {
        HardWord w;
        for (std::size_t i = 0; i < 7; ++i) w.bits.push_back(((x >> i) & 1U) ? -1 : 1);
        if (is_codeword(code, w)) flip = w;
    }
    REQUIRE(flip.bits.size() == 7);
    auto h = test_support::random_llr(rng, code.n_bits(), 2.0);
    LlrVector fh{h.h};
    for (std::size_t i = 0; i < 7; ++i) fh.h[i] *= flip.bits[i];
    for (auto v : {Variant::sum_product, Variant::min_sum})
        for (double delta : {0.5, 1.0, HUGE_VAL}) {
            auto a = init_messages(code, h), b = init_messages(code, fh);
            for (int n = 0; n < 10; ++n) {
                a = relaxed_step(a, code, h, config_for(v, delta));
                b = relaxed_step(b, code, fh, config_for(v, delta));
                for (std::size_t e = 0; e < code.n_edges(); ++e)
                    CHECK(b.eta[e] == flip.bits[code.edge_bit(e)] * a.eta[e]);
            }
        }
}

TEST_CASE("outputs stay inside the clamp") {
    auto code = tanner_155_64();
    LlrVector h{std::vector<double>(155, 50.0)};
    auto m = init_messages(code, h);
    for (int n = 0; n < 3; ++n) {
        m = relaxed_step(m, code, h, config_for(Variant::sum_product, HUGE_VAL));
        for (double v : m.eta) {
            CHECK(std::isfinite(v));
            CHECK(std::fabs(v) <= message_clamp);
        }
    }
}

TEST_CASE("posterior_field") {
    SUBCASE("bit attached to no check") {
        auto code = ParityCheckCode::from_checks(1, {}, IsolatedBits::allow);
        Messages none{{}, 0};
        CHECK(posterior_field(none, code, LlrVector{{0.7}}, Variant::sum_product) == std::vector<double>{0.7});
    }
    SUBCASE("symmetric zero state") {
        auto code = test_support::hamming_7_4();
        Messages zero{std::vector<double>(code.n_edges(), 0.0), 0};
        auto field = posterior_field(zero, code, LlrVector{std::vector<double>(7, 0.0)}, Variant::sum_product);
        CHECK(field == std::vector<double>(7, 0.0));
    }
}

TEST_CASE("hard_decision") {
    std::vector<double> m{0.1, -0.2, 0.0};
    CHECK(hard_decision(m) == HardWord{{1, -1, 1}});
    std::vector<double> pos{0.5, 2.0, 1e-9};
    CHECK(hard_decision(pos) == HardWord::all_plus(3));
    std::vector<double> neg{-0.1, 0.2, -0.0};
    auto flipped = hard_decision(neg);
    CHECK(flipped.bits[0] == -1);
    CHECK(flipped.bits[1] == 1);
    CHECK(flipped.bits[2] == 1);
}

TEST_CASE("decode protocol") {
    auto code = tanner_155_64();
    SUBCASE("noiseless input terminates at n = 0") {
        for (double snr : {0.5, 3.0}) {
            LlrVector h{std::vector<double>(155, snr)};
            for (auto v : {Variant::sum_product, Variant::min_sum}) {
                auto r = decode(code, h, DecoderConfig{v, Relaxation::finite(1.0), 10});
                CHECK(r.status == DecodeStatus::converged);
                CHECK(r.terminated_at == 0);
                CHECK(r.iterations_run == 0);
            }
        }
    }
    SUBCASE("conflicting evidence exhausts a one-iteration budget") {
        auto small = ParityCheckCode::from_checks(3, {{0, 1, 2}});
        auto r = decode(small, LlrVector{{-3.0, -2.0, -2.0}}, DecoderConfig{Variant::min_sum, Relaxation::infinite(), 1});
        CHECK(r.status == DecodeStatus::exhausted);
        CHECK(r.iterations_run == 1);
        CHECK_FALSE(is_codeword(small, r.word));
    }
    SUBCASE("converged words are codewords") {
        std::mt19937_64 rng(12);
        std::size_t converged = 0;
        for (int trial = 0; trial < 40; ++trial) {
            auto stream = trial_stream(12, static_cast<std::uint64_t>(trial));
            auto h = llr_from_channel(transmit_awgn(HardWord::all_plus(155), 1.5, stream));
            for (double delta : {1.0, HUGE_VAL}) {
                auto r = decode(code, h, DecoderConfig{Variant::min_sum, delta == 1.0 ? Relaxation::finite(1.0) : Relaxation::infinite(), 200});
                if (r.status == DecodeStatus::converged) {
                    ++converged;
                    CHECK(is_codeword(code, r.word));
                    CHECK(r.iterations_run == r.terminated_at);
                } else {
                    CHECK(r.iterations_run == 200);
                }
            }
        }
        CHECK(converged > 0);
    }
}

TEST_CASE("observer sees every checked iteration in order") {
    auto code = tanner_155_64();
    auto stream = trial_stream(77, 0);
    auto h = llr_from_channel(transmit_awgn(HardWord::all_plus(155), 1.2, stream));
    Decoder decoder(code, DecoderConfig{Variant::min_sum, Relaxation::finite(2.0), 50});
    std::vector<std::size_t> seen;
    Messages replay = init_messages(code, h);
    auto r = decoder.decode(h, [&](const IterationView &view) {
        seen.push_back(view.iteration);
        if (view.iteration > 0) {
            replay = relaxed_step(replay, code, h, decoder.config());
            auto field = posterior_field(replay, code, h, Variant::min_sum);
            CHECK(std::vector<double>(view.field.begin(), view.field.end()) == field);
        }
        CHECK(std::vector<double>(view.messages.begin(), view.messages.end()) == replay.eta);
    });
    for (std::size_t k = 0; k < seen.size(); ++k) CHECK(seen[k] == k);
    CHECK(seen.back() == r.iterations_run);
}
