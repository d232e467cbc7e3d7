#include "ldpc_relax/code.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <utility>

namespace ldpc_relax {

namespace {

std::vector<std::size_t> offsets_of(const std::vector<std::vector<std::size_t>> &lists) {
    std::vector<std::size_t> offsets(lists.size() + 1, 0);
    for (std::size_t k = 0; k < lists.size(); ++k) offsets[k + 1] = offsets[k] + lists[k].size();
    return offsets;
}

void reject_duplicates(const std::vector<std::size_t> &list, const char *what, std::size_t owner) {
    auto sorted = list;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument(std::string("duplicate edge in ") + what + " " + std::to_string(owner));
}

}  // namespace

ParityCheckCode ParityCheckCode::from_checks(std::size_t n_bits,
                                             const std::vector<std::vector<std::size_t>> &check_neighbors,
                                             IsolatedBits isolated) {
    std::vector<std::vector<std::size_t>> bit_neighbors(n_bits);
    for (std::size_t a = 0; a < check_neighbors.size(); ++a) {
        for (auto i : check_neighbors[a]) {
            if (i >= n_bits)
                throw std::invalid_argument("check " + std::to_string(a) + " references bit " + std::to_string(i) +
                                            " out of range");
            bit_neighbors[i].push_back(a);
        }
    }
    return from_adjacency(std::move(bit_neighbors), check_neighbors, isolated);
}

ParityCheckCode ParityCheckCode::from_adjacency(std::vector<std::vector<std::size_t>> bit_neighbors,
                                                std::vector<std::vector<std::size_t>> check_neighbors,
                                                IsolatedBits isolated) {
    const std::size_t n = bit_neighbors.size();
    const std::size_t m = check_neighbors.size();

    for (std::size_t i = 0; i < n; ++i) {
        if (bit_neighbors[i].empty() && isolated == IsolatedBits::reject)
            throw std::invalid_argument("bit " + std::to_string(i) + " is attached to no check");
        for (auto a : bit_neighbors[i])
            if (a >= m)
                throw std::invalid_argument("bit " + std::to_string(i) + " references check " + std::to_string(a) +
                                            " out of range");
        reject_duplicates(bit_neighbors[i], "bit", i);
    }
    for (std::size_t a = 0; a < m; ++a) {
        for (auto i : check_neighbors[a])
            if (i >= n)
                throw std::invalid_argument("check " + std::to_string(a) + " references bit " + std::to_string(i) +
                                            " out of range");
        reject_duplicates(check_neighbors[a], "check", a);
    }

    ParityCheckCode code;
    code.bit_offsets_ = offsets_of(bit_neighbors);
    code.check_offsets_ = offsets_of(check_neighbors);
    const std::size_t edges = code.bit_offsets_.back();
    if (code.check_offsets_.back() != edges)
        throw std::invalid_argument("bit and check adjacency disagree on the edge count");

    code.bit_adj_.reserve(edges);
    code.edge_bit_.reserve(edges);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto a : bit_neighbors[i]) {
            code.bit_adj_.push_back(a);
            code.edge_bit_.push_back(i);
        }
    }

    code.check_adj_.reserve(edges);
    code.check_edge_.reserve(edges);
    for (std::size_t a = 0; a < m; ++a) {
        for (auto i : check_neighbors[a]) {
            auto list = code.bit_neighbors(i);
            auto it = std::find(list.begin(), list.end(), a);
            if (it == list.end())
                throw std::invalid_argument("check " + std::to_string(a) + " lists bit " + std::to_string(i) +
                                            " but the bit does not list the check");
            code.check_adj_.push_back(i);
            code.check_edge_.push_back(code.bit_offsets_[i] + static_cast<std::size_t>(it - list.begin()));
        }
    }
    return code;
}

std::size_t ParityCheckCode::edge_id(std::size_t bit, std::size_t check) const {
    if (bit >= n_bits()) throw std::out_of_range("bit index out of range");
    auto list = bit_neighbors(bit);
    auto it = std::find(list.begin(), list.end(), check);
    if (it == list.end())
        throw std::out_of_range("bit " + std::to_string(bit) + " is not adjacent to check " + std::to_string(check));
    return bit_offsets_[bit] + static_cast<std::size_t>(it - list.begin());
}

std::size_t ParityCheckCode::max_bit_degree() const {
    std::size_t d = 0;
    for (std::size_t i = 0; i < n_bits(); ++i) d = std::max(d, bit_degree(i));
    return d;
}

std::size_t ParityCheckCode::max_check_degree() const {
    std::size_t d = 0;
    for (std::size_t a = 0; a < n_checks(); ++a) d = std::max(d, check_degree(a));
    return d;
}

namespace {

class AlistReader {
public:
    explicit AlistReader(std::istream &in) : in_(in) {}

    // Next non-empty line split into integers.
    std::vector<long long> next_line(const char *what) {
        std::string text;
        while (std::getline(in_, text)) {
            ++line_;
            if (!text.empty() && text.back() == '\r') text.pop_back();
            if (text.find_first_not_of(" \t") == std::string::npos) continue;
            std::istringstream fields(text);
            std::vector<long long> values;
            std::string token;
            while (fields >> token) {
                std::size_t used = 0;
                long long v = 0;
                try {
                    v = std::stoll(token, &used);
                } catch (const std::exception &) {
                    used = 0;
                }
                if (used != token.size()) throw alist_error(line_, "non-integer token '" + token + "'");
                values.push_back(v);
            }
            return values;
        }
        throw alist_error(line_ + 1, std::string("unexpected end of input, expected ") + what);
    }

    std::size_t line() const { return line_; }

private:
    std::istream &in_;
    std::size_t line_ = 0;
};

std::size_t expect_count(const std::vector<long long> &values, std::size_t count, std::size_t line, const char *what) {
    if (values.size() != count)
        throw alist_error(line, std::string(what) + ": expected " + std::to_string(count) + " values, found " +
                                    std::to_string(values.size()));
    return count;
}

}  // namespace

ParityCheckCode parse_alist(std::istream &in) {
    AlistReader reader(in);

    auto header = reader.next_line("header 'N M'");
    expect_count(header, 2, reader.line(), "header");
    if (header[0] <= 0 || header[1] < 0) throw alist_error(reader.line(), "invalid dimensions");
    const auto n = static_cast<std::size_t>(header[0]);
    const auto m = static_cast<std::size_t>(header[1]);

    auto maxima = reader.next_line("maximum degrees");
    expect_count(maxima, 2, reader.line(), "maximum degrees");
    if (maxima[0] < 0 || maxima[1] < 0) throw alist_error(reader.line(), "negative maximum degree");
    const auto max_bit = static_cast<std::size_t>(maxima[0]);
    const auto max_check = static_cast<std::size_t>(maxima[1]);

    auto read_degrees = [&](std::size_t count, std::size_t cap, const char *what) {
        auto values = reader.next_line(what);
        expect_count(values, count, reader.line(), what);
        std::vector<std::size_t> degrees;
        for (auto v : values) {
            if (v < 0 || static_cast<std::size_t>(v) > cap)
                throw alist_error(reader.line(), std::string(what) + ": degree " + std::to_string(v) +
                                                     " outside [0, " + std::to_string(cap) + "]");
            degrees.push_back(static_cast<std::size_t>(v));
        }
        return degrees;
    };
    auto bit_degrees = read_degrees(n, max_bit, "bit degrees");
    auto check_degrees = read_degrees(m, max_check, "check degrees");

    auto read_lists = [&](const std::vector<std::size_t> &degrees, std::size_t cap, std::size_t range,
                          const char *kind) {
        std::vector<std::vector<std::size_t>> lists(degrees.size());
        for (std::size_t k = 0; k < degrees.size(); ++k) {
            auto values = reader.next_line(kind);
            if (values.size() < degrees[k] || values.size() > std::max(cap, degrees[k]))
                throw alist_error(reader.line(), std::string(kind) + " " + std::to_string(k + 1) + ": expected " +
                                                     std::to_string(degrees[k]) + " neighbors (padded to " +
                                                     std::to_string(cap) + "), found " +
                                                     std::to_string(values.size()) + " entries");
            for (auto v : values) {
                if (v == 0) continue;
                if (v < 0 || static_cast<std::size_t>(v) > range)
                    throw alist_error(reader.line(), std::string(kind) + " " + std::to_string(k + 1) +
                                                         ": index " + std::to_string(v) + " out of range");
                auto idx = static_cast<std::size_t>(v - 1);
                if (std::find(lists[k].begin(), lists[k].end(), idx) != lists[k].end())
                    throw alist_error(reader.line(), std::string(kind) + " " + std::to_string(k + 1) +
                                                         ": duplicate edge to " + std::to_string(v));
                lists[k].push_back(idx);
            }
            if (lists[k].size() != degrees[k])
                throw alist_error(reader.line(), std::string(kind) + " " + std::to_string(k + 1) + " declares degree " +
                                                     std::to_string(degrees[k]) + " but lists " +
                                                     std::to_string(lists[k].size()) + " nonzero neighbors");
        }
        return lists;
    };
    const std::size_t bit_section_start = reader.line() + 1;
    auto bit_lists = read_lists(bit_degrees, max_bit, m, "column");
    auto check_lists = read_lists(check_degrees, max_check, n, "row");

    for (std::size_t i = 0; i < n; ++i)
        if (bit_lists[i].empty()) throw alist_error(bit_section_start + i, "column " + std::to_string(i + 1) + " is empty");

    try {
        return ParityCheckCode::from_adjacency(std::move(bit_lists), std::move(check_lists));
    } catch (const std::invalid_argument &e) {
        throw alist_error(reader.line(), std::string("column and row sections disagree: ") + e.what());
    }
}

ParityCheckCode parse_alist(const std::string &text) {
    std::istringstream in(text);
    return parse_alist(in);
}

ParityCheckCode load_alist(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open alist file '" + path + "'");
    return parse_alist(in);
}

std::string emit_alist(const ParityCheckCode &code) {
    std::ostringstream out;
    const auto max_bit = code.max_bit_degree();
    const auto max_check = code.max_check_degree();
    out << code.n_bits() << ' ' << code.n_checks() << '\n' << max_bit << ' ' << max_check << '\n';
    for (std::size_t i = 0; i < code.n_bits(); ++i) out << (i ? " " : "") << code.bit_degree(i);
    out << '\n';
    for (std::size_t a = 0; a < code.n_checks(); ++a) out << (a ? " " : "") << code.check_degree(a);
    out << '\n';
    auto emit_list = [&](std::span<const std::size_t> list, std::size_t width) {
        for (std::size_t k = 0; k < width; ++k) out << (k ? " " : "") << (k < list.size() ? list[k] + 1 : 0);
        out << '\n';
    };
    for (std::size_t i = 0; i < code.n_bits(); ++i) emit_list(code.bit_neighbors(i), max_bit);
    for (std::size_t a = 0; a < code.n_checks(); ++a) emit_list(code.check_neighbors(a), max_check);
    return out.str();
}

ParityCheckCode build_qc_code(std::size_t circulant_size, const std::vector<std::vector<std::size_t>> &exponents) {
    if (circulant_size == 0) throw std::invalid_argument("circulant size must be positive");
    if (exponents.empty() || exponents.front().empty()) throw std::invalid_argument("exponent table is empty");
    const std::size_t rows = exponents.size();
    const std::size_t cols = exponents.front().size();
    const std::size_t m = circulant_size;

    std::vector<std::vector<std::size_t>> checks(rows * m);
    for (std::size_t r = 0; r < rows; ++r) {
        if (exponents[r].size() != cols) throw std::invalid_argument("exponent table is ragged");
        for (std::size_t c = 0; c < cols; ++c) {
            const auto shift = exponents[r][c];
            if (shift >= m)
                throw std::invalid_argument("exponent " + std::to_string(shift) + " at (" + std::to_string(r) + ", " +
                                            std::to_string(c) + ") outside [0, " + std::to_string(m) + ")");
            for (std::size_t k = 0; k < m; ++k) checks[r * m + k].push_back(c * m + (k + shift) % m);
        }
    }
    return ParityCheckCode::from_checks(cols * m, checks);
}

ParityCheckCode tanner_155_64() {
    constexpr std::size_t m = 31;
    std::vector<std::vector<std::size_t>> exponents(3, std::vector<std::size_t>(5));
    std::size_t row_base = 1;
    for (std::size_t r = 0; r < 3; ++r, row_base = row_base * 5 % m) {
        std::size_t s = row_base;
        for (std::size_t c = 0; c < 5; ++c, s = s * 2 % m) exponents[r][c] = s;
    }
    return build_qc_code(m, exponents);
}

std::vector<Spin> syndrome(const ParityCheckCode &code, const HardWord &word) {
    if (word.size() != code.n_bits())
        throw std::invalid_argument("word length " + std::to_string(word.size()) + " does not match code length " +
                                    std::to_string(code.n_bits()));
    std::vector<Spin> out(code.n_checks());
    for (std::size_t a = 0; a < code.n_checks(); ++a) {
        Spin product = 1;
        for (auto i : code.check_neighbors(a)) product = static_cast<Spin>(product * word.bits[i]);
        out[a] = product;
    }
    return out;
}

bool is_codeword(const ParityCheckCode &code, const HardWord &word) {
    auto s = syndrome(code, word);
    return std::all_of(s.begin(), s.end(), [](Spin v) { return v == 1; });
}

std::size_t gf2_rank(const ParityCheckCode &code) {
    const std::size_t words = (code.n_bits() + 63) / 64;
    std::vector<std::vector<std::uint64_t>> rows(code.n_checks(), std::vector<std::uint64_t>(words, 0));
    for (std::size_t a = 0; a < code.n_checks(); ++a)
        for (auto i : code.check_neighbors(a)) rows[a][i / 64] |= std::uint64_t{1} << (i % 64);

    std::size_t rank = 0;
    for (std::size_t col = 0; col < code.n_bits() && rank < rows.size(); ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t mask = std::uint64_t{1} << (col % 64);
        auto pivot = std::find_if(rows.begin() + static_cast<std::ptrdiff_t>(rank), rows.end(),
                                  [&](const auto &row) { return (row[w] & mask) != 0; });
        if (pivot == rows.end()) continue;
        std::swap(*pivot, rows[rank]);
        for (std::size_t r = rank + 1; r < rows.size(); ++r) {
            if (rows[r][w] & mask)
                for (std::size_t k = w; k < words; ++k) rows[r][k] ^= rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

}  // namespace ldpc_relax
