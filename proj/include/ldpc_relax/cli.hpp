#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "ldpc_relax/code.hpp"
#include "ldpc_relax/decoder.hpp"

namespace ldpc_relax::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_io = 2;

/// Environment variable consulted when --workers is absent.
inline constexpr const char *workers_env = "LDPC_RELAX_WORKERS";

/// "inf" or a positive number.
Relaxation parse_delta(const std::string &text);
/// Comma-separated deltas.
std::vector<Relaxation> parse_delta_list(const std::string &text);
/// "start:end:xF" geometric ladder, or a comma-separated list.
std::vector<std::size_t> parse_caps(const std::string &text);
Variant parse_variant(const std::string &text);
/// "tanner155" or a path to an alist file.
ParityCheckCode load_code(const std::string &source);

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace ldpc_relax::cli
