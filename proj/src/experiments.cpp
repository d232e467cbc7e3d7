#include "ldpc_relax/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ldpc_relax/channel.hpp"

namespace ldpc_relax {

namespace {

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Runs work(state, trial) for trial in [first, last) on a worker pool. Each worker
// owns one State; the states are returned for an order-independent reduction.
template <class State, class MakeState, class Work>
std::vector<State> run_parallel(std::uint64_t first, std::uint64_t last, std::size_t workers, MakeState make_state,
                                Work work) {
    const std::uint64_t count = last > first ? last - first : 0;
    workers = std::max<std::size_t>(1, std::min<std::uint64_t>(workers, std::max<std::uint64_t>(count, 1)));
    std::vector<State> states;
    states.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) states.push_back(make_state());

    std::atomic<std::uint64_t> next{first};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&](State &state) {
        try {
            for (std::uint64_t t = next++; t < last; t = next++) work(state, t);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = last;
        }
    };

    if (workers == 1) {
        body(states.front());
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back([&, w] { body(states[w]); });
    }
    if (failure) std::rethrow_exception(failure);
    return states;
}

std::uint64_t count_minus(const HardWord &word) {
    return static_cast<std::uint64_t>(std::count(word.bits.begin(), word.bits.end(), Spin{-1}));
}

bool delta_less(Relaxation a, Relaxation b) { return a.inverse() > b.inverse(); }

}  // namespace

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

const ErrorRow &ErrorTable::at(Relaxation delta, std::size_t max_iterations) const {
    for (const auto &row : rows)
        if (row.delta == delta && row.max_iterations == max_iterations) return row;
    throw std::out_of_range("no sweep row for delta " + format_delta(delta) + ", cap " +
                            std::to_string(max_iterations));
}

TerminationHistogram run_termination_curve(const ParityCheckCode &code, double snr, const DecoderConfig &config,
                                           std::uint64_t trials, std::uint64_t master_seed,
                                           const RunOptions &options) {
    config.validate();
    if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");

    struct State {
        Decoder decoder;
        TerminationHistogram partial;
    };
    const auto transmitted = HardWord::all_plus(code.n_bits());
    auto states = run_parallel<State>(
        0, trials, resolve_workers(options.workers), [&] { return State{Decoder(code, config), {}}; },
        [&](State &state, std::uint64_t t) {
            auto rng = trial_stream(master_seed, t);
            const auto h = llr_from_channel(transmit_awgn(transmitted, snr, rng));
            const auto result = state.decoder.decode(h);
            if (result.status == DecodeStatus::converged) {
                ++state.partial.counts[result.terminated_at];
                if (result.word != transmitted) ++state.partial.wrong_codeword;
            } else {
                ++state.partial.unterminated;
            }
        });

    TerminationHistogram histogram;
    histogram.trials = trials;
    histogram.snr = snr;
    histogram.delta = config.delta;
    histogram.variant = config.variant;
    histogram.max_iterations = config.max_iterations;
    histogram.seed = master_seed;
    histogram.code_name = options.code_name;
    for (const auto &s : states) {
        for (const auto &[n, c] : s.partial.counts) histogram.counts[n] += c;
        histogram.unterminated += s.partial.unterminated;
        histogram.wrong_codeword += s.partial.wrong_codeword;
    }
    return histogram;
}

ErrorTable run_delta_sweep(const ParityCheckCode &code, double snr, Variant variant,
                           const std::vector<Relaxation> &deltas, const std::vector<std::size_t> &caps,
                           std::uint64_t trials, std::uint64_t master_seed, const RunOptions &options) {
    if (deltas.empty() || caps.empty()) throw std::invalid_argument("delta and cap grids must be nonempty");
    if (!(snr > 0.0)) throw std::invalid_argument("snr must be positive");

    auto sorted_deltas = deltas;
    std::sort(sorted_deltas.begin(), sorted_deltas.end(), delta_less);
    sorted_deltas.erase(std::unique(sorted_deltas.begin(), sorted_deltas.end()), sorted_deltas.end());
    auto sorted_caps = caps;
    std::sort(sorted_caps.begin(), sorted_caps.end());
    sorted_caps.erase(std::unique(sorted_caps.begin(), sorted_caps.end()), sorted_caps.end());
    if (sorted_caps.front() == 0) throw std::invalid_argument("iteration caps must be positive");

    const std::size_t n_delta = sorted_deltas.size();
    const std::size_t n_cap = sorted_caps.size();
    const std::size_t largest = sorted_caps.back();

    struct State {
        std::vector<Decoder> decoders;
        std::vector<std::uint64_t> frame_errors;
        std::vector<std::uint64_t> bit_errors;
        std::vector<std::uint64_t> errors_at_cap;
    };
    const auto transmitted = HardWord::all_plus(code.n_bits());

    auto states = run_parallel<State>(
        0, trials, resolve_workers(options.workers),
        [&] {
            State s;
            for (auto d : sorted_deltas) s.decoders.emplace_back(code, DecoderConfig{variant, d, largest});
            s.frame_errors.assign(n_delta * n_cap, 0);
            s.bit_errors.assign(n_delta * n_cap, 0);
            s.errors_at_cap.assign(n_cap, 0);
            return s;
        },
        [&](State &state, std::uint64_t t) {
            auto rng = trial_stream(master_seed, t);
            const auto h = llr_from_channel(transmit_awgn(transmitted, snr, rng));
            for (std::size_t d = 0; d < n_delta; ++d) {
                std::size_t next_cap = 0;
                auto observer = [&](const IterationView &view) {
                    while (next_cap < n_cap && sorted_caps[next_cap] == view.iteration)
                        state.errors_at_cap[next_cap++] = count_minus(view.decision);
                };
                const auto result = state.decoders[d].decode(h, observer);
                const bool converged = result.status == DecodeStatus::converged;
                const std::uint64_t final_errors = count_minus(result.word);
                for (std::size_t k = 0; k < n_cap; ++k) {
                    const std::size_t cell = d * n_cap + k;
                    if (converged && result.terminated_at <= sorted_caps[k]) {
                        if (final_errors > 0) {
                            ++state.frame_errors[cell];
                            state.bit_errors[cell] += final_errors;
                        }
                    } else {
                        ++state.frame_errors[cell];
                        state.bit_errors[cell] += state.errors_at_cap[k];
                    }
                }
            }
        });

    ErrorTable table;
    for (std::size_t d = 0; d < n_delta; ++d) {
        for (std::size_t k = 0; k < n_cap; ++k) {
            ErrorRow row;
            row.delta = sorted_deltas[d];
            row.max_iterations = sorted_caps[k];
            row.trials = trials;
            for (const auto &s : states) {
                row.frame_errors += s.frame_errors[d * n_cap + k];
                row.bit_errors += s.bit_errors[d * n_cap + k];
            }
            if (trials > 0) {
                row.frame_error_rate = static_cast<double>(row.frame_errors) / static_cast<double>(trials);
                row.bit_error_rate = static_cast<double>(row.bit_errors) /
                                     (static_cast<double>(trials) * static_cast<double>(code.n_bits()));
            }
            table.rows.push_back(row);
        }
    }
    return table;
}

BetheDiagnostic run_bethe_diagnostic(const ParityCheckCode &code, double snr, const DecoderConfig &config,
                                     std::size_t converged_target, std::uint64_t max_trials,
                                     std::uint64_t master_seed, std::size_t window, const RunOptions &options) {
    config.validate();
    if (window == 0) throw std::invalid_argument("window must be positive");
    const auto transmitted = HardWord::all_plus(code.n_bits());
    const std::size_t workers = resolve_workers(options.workers);

    struct Outcome {
        bool converged = false;
        BetheTrace trace;
    };
    struct State {
        Decoder decoder;
        std::vector<std::pair<std::uint64_t, Outcome>> outcomes;
    };

    BetheDiagnostic diagnostic;
    const std::uint64_t batch = 16 * static_cast<std::uint64_t>(workers);
    for (std::uint64_t first = 0; first < max_trials && diagnostic.traces.size() < converged_target;
         first += batch) {
        const std::uint64_t last = std::min(max_trials, first + batch);
        auto states = run_parallel<State>(
            first, last, workers, [&] { return State{Decoder(code, config), {}}; },
            [&](State &state, std::uint64_t t) {
                auto rng = trial_stream(master_seed, t);
                const auto h = llr_from_channel(transmit_awgn(transmitted, snr, rng));
                std::vector<double> energies;
                double residual = 0.0;
                Messages source;
                auto observer = [&](const IterationView &view) {
                    source.eta.assign(view.messages.begin(), view.messages.end());
                    const auto report = bethe_free_energy(code, h, beliefs_from_messages(code, h, source, config.variant));
                    energies.push_back(report.f_bethe);
                    if (energies.size() > window) energies.erase(energies.begin());
                    residual = report.consistency_residual;
                };
                const auto result = state.decoder.decode(h, observer);
                Outcome outcome;
                outcome.converged = result.status == DecodeStatus::converged;
                outcome.trace.trial = t;
                outcome.trace.terminated_at = result.terminated_at;
                outcome.trace.final_consistency_residual = residual;
                outcome.trace.non_increasing = std::is_sorted(energies.rbegin(), energies.rend());
                outcome.trace.free_energy = std::move(energies);
                state.outcomes.emplace_back(t, std::move(outcome));
            });

        std::vector<std::pair<std::uint64_t, Outcome>> merged;
        for (auto &s : states)
            for (auto &o : s.outcomes) merged.push_back(std::move(o));
        std::sort(merged.begin(), merged.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
        for (auto &[t, outcome] : merged) {
            if (diagnostic.traces.size() >= converged_target) break;
            diagnostic.trials_attempted = t + 1;
            if (outcome.converged) diagnostic.traces.push_back(std::move(outcome.trace));
        }
    }
    return diagnostic;
}

std::string format_delta(Relaxation delta) {
    return delta.is_infinite() ? std::string("inf") : format_number(delta.delta());
}

std::string to_csv(const TerminationHistogram &histogram) {
    std::ostringstream out;
    out << "# code=" << histogram.code_name << '\n'
        << "# snr=" << format_number(histogram.snr) << '\n'
        << "# delta=" << format_delta(histogram.delta) << '\n'
        << "# variant=" << to_string(histogram.variant) << '\n'
        << "# max_iterations=" << histogram.max_iterations << '\n'
        << "# trials=" << histogram.trials << '\n'
        << "# seed=" << histogram.seed << '\n'
        << "# wrong_codeword=" << histogram.wrong_codeword << '\n'
        << "n_it,count,probability\n";
    if (histogram.trials == 0) return out.str();
    const auto total = static_cast<double>(histogram.trials);
    for (const auto &[n, c] : histogram.counts)
        if (c > 0) out << n << ',' << c << ',' << format_number(static_cast<double>(c) / total) << '\n';
    out << "unterminated," << histogram.unterminated << ','
        << format_number(static_cast<double>(histogram.unterminated) / total) << '\n';
    return out.str();
}

std::string to_csv(const ErrorTable &table) {
    std::ostringstream out;
    out << "delta,max_iter,trials,frame_errors,bit_errors,fer,ber\n";
    auto rows = table.rows;
    std::stable_sort(rows.begin(), rows.end(), [](const ErrorRow &a, const ErrorRow &b) {
        if (a.delta != b.delta) return delta_less(a.delta, b.delta);
        return a.max_iterations < b.max_iterations;
    });
    for (const auto &r : rows)
        out << format_delta(r.delta) << ',' << r.max_iterations << ',' << r.trials << ',' << r.frame_errors << ','
            << r.bit_errors << ',' << format_number(r.frame_error_rate) << ',' << format_number(r.bit_error_rate)
            << '\n';
    return out.str();
}

namespace {

void write_text(const std::string &text, const std::string &path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::ios_base::failure("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw std::ios_base::failure("failed writing '" + path + "'");
}

}  // namespace

void write_csv(const TerminationHistogram &histogram, const std::string &path) { write_text(to_csv(histogram), path); }

void write_csv(const ErrorTable &table, const std::string &path) { write_text(to_csv(table), path); }

}  // namespace ldpc_relax
