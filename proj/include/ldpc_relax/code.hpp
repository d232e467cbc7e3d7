#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ldpc_relax {

// Spin convention: +1 encodes logical 0, -1 encodes logical 1.
using Spin = std::int8_t;

struct HardWord {
    std::vector<Spin> bits;

    std::size_t size() const { return bits.size(); }
    bool operator==(const HardWord &) const = default;

    static HardWord all_plus(std::size_t n) { return HardWord{std::vector<Spin>(n, Spin{1})}; }
};

class alist_error : public std::runtime_error {
public:
    alist_error(std::size_t line, const std::string &what)
        : std::runtime_error("alist line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class IsolatedBits { reject, allow };

/// Sparse Tanner graph of an LDPC code with adjacency stored in both directions.
///
/// Edges are numbered bit-major: the edges of bit i occupy the contiguous id range
/// [bit_edge_begin(i), bit_edge_begin(i+1)), in the order of bit_neighbors(i).
/// Immutable after construction.
class ParityCheckCode {
public:
    ParityCheckCode() = default;

    /// Builds from per-check neighbor lists. Bit neighbor lists are derived in
    /// ascending check order. Throws std::invalid_argument on out-of-range indices,
    /// duplicate edges, or (unless allowed) bits attached to no check.
    static ParityCheckCode from_checks(std::size_t n_bits,
                                       const std::vector<std::vector<std::size_t>> &check_neighbors,
                                       IsolatedBits isolated = IsolatedBits::reject);

    /// Builds from both adjacency directions; they must describe the same edge set.
    static ParityCheckCode from_adjacency(std::vector<std::vector<std::size_t>> bit_neighbors,
                                          std::vector<std::vector<std::size_t>> check_neighbors,
                                          IsolatedBits isolated = IsolatedBits::reject);

    std::size_t n_bits() const { return bit_offsets_.empty() ? 0 : bit_offsets_.size() - 1; }
    std::size_t n_checks() const { return check_offsets_.empty() ? 0 : check_offsets_.size() - 1; }
    std::size_t n_edges() const { return bit_adj_.size(); }

    std::span<const std::size_t> bit_neighbors(std::size_t bit) const {
        return {bit_adj_.data() + bit_offsets_[bit], bit_offsets_[bit + 1] - bit_offsets_[bit]};
    }
    std::span<const std::size_t> check_neighbors(std::size_t check) const {
        return {check_adj_.data() + check_offsets_[check], check_offsets_[check + 1] - check_offsets_[check]};
    }
    /// Edge ids of a check, aligned with check_neighbors(check).
    std::span<const std::size_t> check_edges(std::size_t check) const {
        return {check_edge_.data() + check_offsets_[check], check_offsets_[check + 1] - check_offsets_[check]};
    }

    std::size_t bit_degree(std::size_t bit) const { return bit_offsets_[bit + 1] - bit_offsets_[bit]; }
    std::size_t check_degree(std::size_t check) const { return check_offsets_[check + 1] - check_offsets_[check]; }
    std::size_t bit_edge_begin(std::size_t bit) const { return bit_offsets_[bit]; }

    std::size_t edge_bit(std::size_t edge) const { return edge_bit_[edge]; }
    std::size_t edge_check(std::size_t edge) const { return bit_adj_[edge]; }

    /// Edge id of (bit, check); throws std::out_of_range when not adjacent.
    std::size_t edge_id(std::size_t bit, std::size_t check) const;

    std::size_t max_bit_degree() const;
    std::size_t max_check_degree() const;

    bool operator==(const ParityCheckCode &) const = default;

private:
    std::vector<std::size_t> bit_offsets_;
    std::vector<std::size_t> bit_adj_;
    std::vector<std::size_t> edge_bit_;
    std::vector<std::size_t> check_offsets_;
    std::vector<std::size_t> check_adj_;
    std::vector<std::size_t> check_edge_;
};

/// Parses the alist sparse-matrix format. Errors carry the offending line number.
ParityCheckCode parse_alist(std::istream &in);
ParityCheckCode parse_alist(const std::string &text);
ParityCheckCode load_alist(const std::string &path);

/// Writes a code in alist format with zero padding.
std::string emit_alist(const ParityCheckCode &code);

/// Quasi-cyclic code: block (r, c) of the parity matrix is the m x m identity with
/// columns cyclically shifted by exponents[r][c].
ParityCheckCode build_qc_code(std::size_t circulant_size,
                              const std::vector<std::vector<std::size_t>> &exponents);

/// The [155, 64, 20] Tanner code: m = 31, exponents (5^r * 2^c) mod 31, r < 3, c < 5.
ParityCheckCode tanner_155_64();

/// Entry a is the product of the spins on check a; the word is a codeword iff all are +1.
std::vector<Spin> syndrome(const ParityCheckCode &code, const HardWord &word);
bool is_codeword(const ParityCheckCode &code, const HardWord &word);

std::size_t gf2_rank(const ParityCheckCode &code);

}  // namespace ldpc_relax
