#include "ldpc_relax/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ldpc_relax/bethe.hpp"
#include "ldpc_relax/channel.hpp"
#include "ldpc_relax/experiments.hpp"

namespace ldpc_relax::cli {

namespace {

struct usage_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double parse_positive(const std::string &text, const char *what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception &) {
        throw usage_error(std::string("invalid ") + what + " '" + text + "'");
    }
    if (used != text.size() || !(v > 0.0) || !std::isfinite(v))
        throw usage_error(std::string("invalid ") + what + " '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string &text, const char *what) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception &) {
        throw usage_error(std::string("invalid ") + what + " '" + text + "'");
    }
    if (used != text.size() || v == 0 || text.front() == '-')
        throw usage_error(std::string("invalid ") + what + " '" + text + "'");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) parts.push_back(part);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::size_t resolve_worker_flag(std::size_t flag) {
    if (flag > 0) return flag;
    if (const char *env = std::getenv(workers_env); env != nullptr && *env != '\0')
        return parse_count(env, workers_env);
    return 0;
}

struct Common {
    std::string code = "tanner155";
    double snr = 2.0;
    std::string variant = "minsum";
    std::size_t max_iter = 16384;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
};

void add_common(CLI::App &sub, Common &c) {
    sub.add_option("--code", c.code, "tanner155 or a path to an alist file")->capture_default_str();
    sub.add_option("--snr", c.snr, "linear SNR s^2")->capture_default_str()->check(CLI::PositiveNumber);
    sub.add_option("--variant", c.variant, "sumprod or minsum")->capture_default_str();
    sub.add_option("--seed", c.seed, "64-bit master seed")->capture_default_str();
    sub.add_option("--workers", c.workers, "worker threads (default: " + std::string(workers_env) +
                                               " or hardware concurrency)");
}

}  // namespace

Relaxation parse_delta(const std::string &text) {
    if (text == "inf" || text == "+inf" || text == "infinity") return Relaxation::infinite();
    return Relaxation::finite(parse_positive(text, "delta"));
}

std::vector<Relaxation> parse_delta_list(const std::string &text) {
    std::vector<Relaxation> out;
    for (const auto &part : split(text, ',')) out.push_back(parse_delta(part));
    if (out.empty()) throw usage_error("empty delta list");
    return out;
}

std::vector<std::size_t> parse_caps(const std::string &text) {
    std::vector<std::size_t> caps;
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 3 || parts[2].size() < 2 || parts[2][0] != 'x')
            throw usage_error("cap ladder must look like start:end:xF, got '" + text + "'");
        const auto start = parse_count(parts[0], "cap start");
        const auto end = parse_count(parts[1], "cap end");
        const auto factor = parse_count(parts[2].substr(1), "cap factor");
        if (factor < 2 || end < start) throw usage_error("invalid cap ladder '" + text + "'");
        for (std::size_t c = start; c <= end; c *= factor) {
            caps.push_back(c);
            if (c > std::numeric_limits<std::size_t>::max() / factor) break;
        }
    } else {
        for (const auto &part : split(text, ',')) caps.push_back(parse_count(part, "cap"));
    }
    if (caps.empty()) throw usage_error("empty cap list");
    return caps;
}

Variant parse_variant(const std::string &text) {
    if (text == "minsum" || text == "min_sum") return Variant::min_sum;
    if (text == "sumprod" || text == "sum_product") return Variant::sum_product;
    throw usage_error("unknown variant '" + text + "' (expected sumprod or minsum)");
}

ParityCheckCode load_code(const std::string &source) {
    if (source == "tanner155") return tanner_155_64();
    return load_alist(source);
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Relaxed belief-propagation decoding of LDPC codes over an AWGN channel"};
    app.require_subcommand(1);

    Common decode_opts;
    std::string decode_delta = "inf";
    bool bethe_diag = false;
    auto *decode_cmd = app.add_subcommand("decode", "decode one channel realization and print a report");
    add_common(*decode_cmd, decode_opts);
    decode_cmd->add_option("--delta", decode_delta, "relaxation parameter or inf")->capture_default_str();
    decode_cmd->add_option("--max-iter", decode_opts.max_iter, "iteration cap")->capture_default_str();
    decode_cmd->add_flag("--bethe-diag", bethe_diag, "report the Bethe free energy at termination");

    Common term_opts;
    std::string term_delta = "inf";
    std::uint64_t term_trials = 10000;
    std::string term_out;
    auto *term_cmd = app.add_subcommand("termcurve", "termination-iteration histogram");
    add_common(*term_cmd, term_opts);
    term_cmd->add_option("--delta", term_delta, "relaxation parameter or inf")->capture_default_str();
    term_cmd->add_option("--max-iter", term_opts.max_iter, "iteration cap")->capture_default_str();
    term_cmd->add_option("--trials", term_trials, "Monte-Carlo trials")->capture_default_str();
    term_cmd->add_option("--out", term_out, "output CSV path")->required();

    Common sweep_opts;
    std::string sweep_deltas = "0.25,0.5,1,2,4,inf";
    std::string sweep_caps = "1:16384:x2";
    std::uint64_t sweep_trials = 10000;
    std::string sweep_out;
    auto *sweep_cmd = app.add_subcommand("sweep", "error rates over a delta x iteration-cap grid");
    add_common(*sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--deltas", sweep_deltas, "comma-separated deltas (inf allowed)")->capture_default_str();
    sweep_cmd->add_option("--caps", sweep_caps, "start:end:xF ladder or comma list")->capture_default_str();
    sweep_cmd->add_option("--trials", sweep_trials, "Monte-Carlo trials")->capture_default_str();
    sweep_cmd->add_option("--out", sweep_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::CallForAllHelp &e) {
        app.exit(e, out, err);
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        app.exit(e, out, err);
        return exit_usage;
    }

    const CLI::App *active = app.get_subcommands().front();
    const Common &common = active == decode_cmd ? decode_opts : active == term_cmd ? term_opts : sweep_opts;

    // Validate everything before touching the filesystem.
    Variant variant{};
    RunOptions options;
    DecoderConfig config;
    std::vector<Relaxation> deltas;
    std::vector<std::size_t> caps;
    std::uint64_t trials = 0;
    try {
        variant = parse_variant(common.variant);
        options.workers = resolve_worker_flag(common.workers);
        options.code_name = common.code;
        if (common.max_iter == 0) throw usage_error("--max-iter must be positive");
        if (active == decode_cmd) {
            config = DecoderConfig{variant, parse_delta(decode_delta), common.max_iter};
        } else if (active == term_cmd) {
            config = DecoderConfig{variant, parse_delta(term_delta), common.max_iter};
            trials = term_trials;
        } else {
            deltas = parse_delta_list(sweep_deltas);
            caps = parse_caps(sweep_caps);
            trials = sweep_trials;
        }
        if (active != decode_cmd && trials == 0) throw usage_error("--trials must be positive");
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n" << active->help();
        return exit_usage;
    }

    ParityCheckCode code;
    try {
        code = load_code(common.code);
    } catch (const std::exception &e) {
        err << "error: cannot load code '" << common.code << "': " << e.what() << "\n";
        return exit_io;
    }

    try {
        if (active == decode_cmd) {
            const auto transmitted = HardWord::all_plus(code.n_bits());
            auto rng = trial_stream(common.seed, 0);
            const auto h = llr_from_channel(transmit_awgn(transmitted, common.snr, rng));
            Decoder decoder(code, config);
            Messages last_messages;
            IterationObserver observer;
            if (bethe_diag)
                observer = [&](const IterationView &view) {
                    last_messages.eta.assign(view.messages.begin(), view.messages.end());
                };
            const auto result = decoder.decode(h, observer);
            out << "code: " << common.code << " (N=" << code.n_bits() << ", M=" << code.n_checks() << ")\n"
                << "snr: " << common.snr << "\n"
                << "delta: " << format_delta(config.delta) << "\n"
                << "variant: " << to_string(config.variant) << "\n"
                << "seed: " << common.seed << "\n"
                << "status: " << (result.status == DecodeStatus::converged ? "converged" : "exhausted") << "\n"
                << "n_it: ";
            if (result.status == DecodeStatus::converged)
                out << result.terminated_at << "\n";
            else
                out << "none\n";
            out << "iterations_run: " << result.iterations_run << "\n"
                << "bit_errors: " << std::count(result.word.bits.begin(), result.word.bits.end(), Spin{-1}) << "\n";
            if (bethe_diag) {
                const auto report =
                    bethe_free_energy(code, h, beliefs_from_messages(code, h, last_messages, config.variant));
                out.precision(12);
                out << "f_bethe: " << report.f_bethe << "\n"
                    << "u_bethe: " << report.u_bethe << "\n"
                    << "h_bethe: " << report.h_bethe << "\n"
                    << "consistency_residual: " << report.consistency_residual << "\n";
            }
        } else if (active == term_cmd) {
            const auto histogram = run_termination_curve(code, common.snr, config, trials, common.seed, options);
            write_csv(histogram, term_out);
        } else {
            const auto table = run_delta_sweep(code, common.snr, variant, deltas, caps, trials, common.seed, options);
            write_csv(table, sweep_out);
        }
    } catch (const std::ios_base::failure &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    }
    return exit_ok;
}

}  // namespace ldpc_relax::cli
