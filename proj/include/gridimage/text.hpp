#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gridimage/grid.hpp"
#include "gridimage/matrix.hpp"

namespace gridimage {
namespace detail {

/// Character scanner with byte positions for error messages. '#' starts a
/// comment running to end of line (grid files allow them anywhere).
class Scanner {
public:
    Scanner(std::string_view text, bool hash_comments)
        : text_(text), hash_comments_(hash_comments) {}

    std::size_t pos() const noexcept { return pos_; }

    void skip_ws() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                ++pos_;
            } else if (hash_comments_ && c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
            } else {
                break;
            }
        }
    }

    bool at_end() {
        skip_ws();
        return pos_ >= text_.size();
    }

    char peek() {
        skip_ws();
        if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
        return text_[pos_];
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] != c) {
            throw ParseError(std::string("expected '") + c + "'", pos_);
        }
        ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::uint64_t parse_number() {
        skip_ws();
        if (pos_ >= text_.size() || text_[pos_] < '0' || text_[pos_] > '9') {
            throw ParseError("expected a number", pos_);
        }
        const std::size_t start = pos_;
        std::uint64_t v = 0;
        while (pos_ < text_.size() && text_[pos_] >= '0' && text_[pos_] <= '9') {
            const std::uint64_t digit = static_cast<std::uint64_t>(text_[pos_] - '0');
            if (v > (~std::uint64_t{0} - digit) / 10) {
                throw ParseError("number too large", start);
            }
            v = v * 10 + digit;
            ++pos_;
        }
        return v;
    }

    void expect_keyword(std::string_view word) {
        skip_ws();
        if (text_.substr(pos_, word.size()) != word) {
            throw ParseError("expected '" + std::string(word) + "'", pos_);
        }
        pos_ += word.size();
    }

private:
    std::string_view text_;
    bool hash_comments_;
    std::size_t pos_ = 0;
};

inline std::uint32_t parse_prime_header(Scanner& s, std::uint32_t cap) {
    s.expect_keyword("p");
    s.expect('=');
    const std::size_t at = s.pos();
    const std::uint64_t p = s.parse_number();
    if (p > cap) throw ParseError("p = " + std::to_string(p) + " exceeds the supported cap", at);
    return static_cast<std::uint32_t>(p);
}

inline ResidueSet parse_set_body(Scanner& s, PrimeModulus mod) {
    s.expect('{');
    ResidueSet set(mod);
    if (!s.accept('}')) {
        for (;;) {
            const std::size_t at = s.pos();
            const std::uint64_t r = s.parse_number();
            if (r >= mod.value()) {
                throw ParseError("residue " + std::to_string(r) + " not below p = " +
                                     std::to_string(mod.value()),
                                 at);
            }
            set.insert(static_cast<std::uint32_t>(r));
            if (s.accept('}')) break;
            s.expect(',');
        }
    }
    return set;
}

inline MatrixFp parse_matrix_body(Scanner& s, PrimeModulus mod) {
    s.expect('[');
    std::vector<std::vector<std::uint32_t>> rows;
    for (;;) {
        s.expect('[');
        std::vector<std::uint32_t> row;
        if (!s.accept(']')) {
            for (;;) {
                const std::size_t at = s.pos();
                const std::uint64_t e = s.parse_number();
                if (e >= mod.value()) {
                    throw ParseError("entry " + std::to_string(e) + " not below p = " +
                                         std::to_string(mod.value()),
                                     at);
                }
                row.push_back(static_cast<std::uint32_t>(e));
                if (s.accept(']')) break;
                s.expect(',');
            }
        }
        const std::size_t row_end = s.pos();
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ParseError("rows of unequal length", row_end);
        }
        if (row.empty()) throw ParseError("empty matrix row", row_end);
        rows.push_back(std::move(row));
        if (s.accept(']')) break;
        s.expect(',');
    }
    return MatrixFp::from_rows(mod, rows);
}

} // namespace detail

/// `p=7; {0,1,3}`
inline ResidueSet parse_set_literal(std::string_view text,
                                    std::uint32_t prime_cap = kDefaultPrimeCap) {
    detail::Scanner s(text, false);
    const PrimeModulus mod(detail::parse_prime_header(s, prime_cap));
    s.expect(';');
    ResidueSet set = detail::parse_set_body(s, mod);
    if (!s.at_end()) throw ParseError("trailing input after set", s.pos());
    return set;
}

/// `p=5; [[2,1,0],[1,0,1]]`
inline MatrixFp parse_matrix_literal(std::string_view text,
                                     std::uint32_t prime_cap = kDefaultPrimeCap) {
    detail::Scanner s(text, false);
    const PrimeModulus mod(detail::parse_prime_header(s, prime_cap));
    s.expect(';');
    MatrixFp m = detail::parse_matrix_body(s, mod);
    if (!s.at_end()) throw ParseError("trailing input after matrix", s.pos());
    return m;
}

/// `p=5; {0,1}; {0,2}; {1,4}` — a whole grid in one line.
inline GridFamily parse_grid_literal(std::string_view text,
                                     std::uint32_t prime_cap = kDefaultPrimeCap) {
    detail::Scanner s(text, false);
    const PrimeModulus mod(detail::parse_prime_header(s, prime_cap));
    std::vector<ResidueSet> sets;
    while (s.accept(';')) {
        if (s.at_end() && !sets.empty()) break; // tolerate a trailing ';'
        sets.push_back(detail::parse_set_body(s, mod));
    }
    if (sets.empty()) throw ParseError("expected at least one set", s.pos());
    if (!s.at_end()) throw ParseError("trailing input after grid", s.pos());
    return GridFamily(mod, std::move(sets));
}

/// Grid file: a `p = 7` line, then one `A<i> = {...}` line per set with
/// i counting up from 1; `#` comments and blank lines are free.
inline GridFamily parse_grid_file_text(std::string_view text,
                                       std::uint32_t prime_cap = kDefaultPrimeCap) {
    detail::Scanner s(text, true);
    const PrimeModulus mod(detail::parse_prime_header(s, prime_cap));
    std::vector<ResidueSet> sets;
    while (!s.at_end()) {
        s.expect_keyword("A");
        const std::size_t at = s.pos();
        const std::uint64_t index = s.parse_number();
        if (index != sets.size() + 1) {
            throw ParseError("expected A" + std::to_string(sets.size() + 1) +
                                 " (sets must appear in order)",
                             at);
        }
        s.expect('=');
        sets.push_back(detail::parse_set_body(s, mod));
    }
    if (sets.empty()) throw ParseError("grid file declares no sets", s.pos());
    return GridFamily(mod, std::move(sets));
}

inline std::string format_set(const ResidueSet& set) {
    std::string out = "{";
    bool first = true;
    for (auto r : set.members()) {
        if (!first) out += ",";
        out += std::to_string(r);
        first = false;
    }
    out += "}";
    return out;
}

inline std::string format_set_literal(const ResidueSet& set) {
    return "p=" + std::to_string(set.modulus().value()) + "; " + format_set(set);
}

inline std::string format_matrix(const MatrixFp& m) {
    std::string out = "[";
    for (int i = 0; i < m.rows(); ++i) {
        if (i > 0) out += ",";
        out += "[";
        for (int j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ",";
            out += std::to_string(m.at(i, j));
        }
        out += "]";
    }
    out += "]";
    return out;
}

inline std::string format_matrix_literal(const MatrixFp& m) {
    return "p=" + std::to_string(m.modulus().value()) + "; " + format_matrix(m);
}

inline std::string format_grid_file(const GridFamily& grid) {
    std::string out = "p = " + std::to_string(grid.modulus().value()) + "\n";
    for (int i = 0; i < grid.arity(); ++i) {
        out += "A" + std::to_string(i + 1) + " = " + format_set(grid.set(i)) + "\n";
    }
    return out;
}

} // namespace gridimage
