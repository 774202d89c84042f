#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "ecm/degree_model.hpp"

namespace ecm {

/// Exact fraction with 64-bit numerator and denominator, always normalized
/// (gcd 1, denominator positive). Enough range for enumeration statistics:
/// counts stay far below 2^63 at the supported sizes.
struct Rational {
    long long num = 0;
    long long den = 1;

    Rational() = default;
    Rational(long long n, long long d);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    bool operator==(const Rational& o) const {
        return num == o.num && den == o.den;
    }
    bool operator<=(const Rational& o) const;

    double to_double() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    std::string to_string() const;  // "num/den"
};

/// Exhaustive pairing statistics for one degree sequence, obtained by
/// enumerating every perfect matching of the stubs.
struct ExactResult {
    std::uint64_t matching_count = 0;
    Rational expected_self_loops;
    Rational expected_excess;
    Rational expected_erased_fraction;
    /// P(no edge between i and j) for unordered node pairs i <= j; the
    /// diagonal entry is P(no self-loop at i).
    std::map<std::pair<std::uint32_t, std::uint32_t>, Rational> no_edge_prob;
};

/// Number of perfect matchings of m stubs: (m-1)!! for even m.
std::uint64_t matching_count(std::uint32_t stub_count);

/// Visits every perfect matching of stubs 0..stub_count-1 exactly once, in a
/// canonical order (lowest free stub joined to each later free stub in turn).
/// The callback receives the matched pairs (a, b) with a < b, sorted by a.
void for_each_matching(
    std::uint32_t stub_count,
    const std::function<void(const std::vector<std::pair<std::uint32_t,
                                                         std::uint32_t>>&)>& visit);

/// Exact expectations by full enumeration. Rejects stub counts above 14
/// (14 stubs already mean 135135 matchings).
ExactResult enumerate_exact(const DegreeSequence& seq);

inline constexpr std::uint32_t max_oracle_stubs = 14;

}  // namespace ecm
