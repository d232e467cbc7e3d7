#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ldpc_relax/bethe.hpp"
#include "ldpc_relax/code.hpp"
#include "ldpc_relax/decoder.hpp"

namespace ldpc_relax {

/// Execution settings that never change results.
struct RunOptions {
    std::size_t workers = 0;  // 0 selects the hardware concurrency
    std::string code_name = "custom";
};

std::size_t resolve_workers(std::size_t requested);

struct TerminationHistogram {
    std::map<std::size_t, std::uint64_t> counts;  // n_it -> trials converged there
    std::uint64_t unterminated = 0;
    std::uint64_t wrong_codeword = 0;  // converged, but not to the transmitted word
    std::uint64_t trials = 0;

    double snr = 0.0;
    Relaxation delta = Relaxation::infinite();
    Variant variant = Variant::min_sum;
    std::size_t max_iterations = 0;
    std::uint64_t seed = 0;
    std::string code_name;

    std::uint64_t converged() const { return trials - unterminated; }
};

struct ErrorRow {
    Relaxation delta = Relaxation::infinite();
    std::size_t max_iterations = 0;
    std::uint64_t trials = 0;
    std::uint64_t frame_errors = 0;
    std::uint64_t bit_errors = 0;
    double frame_error_rate = 0.0;
    double bit_error_rate = 0.0;
};

struct ErrorTable {
    std::vector<ErrorRow> rows;  // sorted by (delta, max_iterations), infinite delta last

    const ErrorRow &at(Relaxation delta, std::size_t max_iterations) const;
};

/// Transmits the all-(+1) word trials times and records the iteration at which each
/// decode first reaches a codeword. Trial t uses trial_stream(master_seed, t).
TerminationHistogram run_termination_curve(const ParityCheckCode &code, double snr, const DecoderConfig &config,
                                           std::uint64_t trials, std::uint64_t master_seed,
                                           const RunOptions &options = {});

/// Frame and bit error counts over a (delta, cap) grid. Every grid point sees the
/// same channel realizations. Each (trial, delta) is decoded once up to the largest
/// cap; the outcome under a smaller cap c is the state of that run at iteration c.
ErrorTable run_delta_sweep(const ParityCheckCode &code, double snr, Variant variant,
                           const std::vector<Relaxation> &deltas, const std::vector<std::size_t> &caps,
                           std::uint64_t trials, std::uint64_t master_seed, const RunOptions &options = {});

/// Free energy along decoding trajectories of converged trials.
struct BetheTrace {
    std::uint64_t trial = 0;
    std::size_t terminated_at = 0;
    std::vector<double> free_energy;  // last `window` checked iterations, oldest first
    double final_consistency_residual = 0.0;
    bool non_increasing = true;
};

struct BetheDiagnostic {
    std::vector<BetheTrace> traces;  // converged trials only, in trial order
    std::uint64_t trials_attempted = 0;
};

/// Decodes trials in index order until `converged_target` of them converge (or
/// `max_trials` are spent). At iteration n the beliefs are built from eta^(n-1),
/// the messages behind that iteration's decision.
BetheDiagnostic run_bethe_diagnostic(const ParityCheckCode &code, double snr, const DecoderConfig &config,
                                     std::size_t converged_target, std::uint64_t max_trials,
                                     std::uint64_t master_seed, std::size_t window = 10,
                                     const RunOptions &options = {});

std::string format_delta(Relaxation delta);

std::string to_csv(const TerminationHistogram &histogram);
std::string to_csv(const ErrorTable &table);

/// Throws std::ios_base::failure naming the path when the file cannot be written.
void write_csv(const TerminationHistogram &histogram, const std::string &path);
void write_csv(const ErrorTable &table, const std::string &path);

}  // namespace ldpc_relax
