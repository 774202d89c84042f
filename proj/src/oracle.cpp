#include "ecm/oracle.hpp"

#include <array>
#include <stdexcept>

namespace ecm {

Rational::Rational(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational Rational::operator+(const Rational& o) const {
    return Rational(num * o.den + o.num * den, den * o.den);
}

Rational Rational::operator-(const Rational& o) const {
    return Rational(num * o.den - o.num * den, den * o.den);
}

Rational Rational::operator*(const Rational& o) const {
    return Rational(num * o.num, den * o.den);
}

bool Rational::operator<=(const Rational& o) const {
    // Denominators are positive after normalization.
    return num * o.den <= o.num * den;
}

std::string Rational::to_string() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

std::uint64_t matching_count(std::uint32_t stub_count) {
    if (stub_count % 2 != 0) {
        throw std::invalid_argument("matching_count: stub count must be even");
    }
    std::uint64_t result = 1;
    for (std::uint32_t k = stub_count; k > 1; k -= 2) result *= k - 1;
    return result;
}

namespace {

void enumerate_rec(
    std::uint32_t stub_count, std::uint32_t used_mask,
    std::vector<std::pair<std::uint32_t, std::uint32_t>>& pairs,
    const std::function<void(const std::vector<std::pair<std::uint32_t,
                                                         std::uint32_t>>&)>& visit) {
    std::uint32_t first = stub_count;
    for (std::uint32_t s = 0; s < stub_count; ++s) {
        if (!(used_mask & (1U << s))) {
            first = s;
            break;
        }
    }
    if (first == stub_count) {
        visit(pairs);
        return;
    }
    for (std::uint32_t t = first + 1; t < stub_count; ++t) {
        if (used_mask & (1U << t)) continue;
        pairs.emplace_back(first, t);
        enumerate_rec(stub_count, used_mask | (1U << first) | (1U << t), pairs,
                      visit);
        pairs.pop_back();
    }
}

}  // namespace

void for_each_matching(
    std::uint32_t stub_count,
    const std::function<void(const std::vector<std::pair<std::uint32_t,
                                                         std::uint32_t>>&)>& visit) {
    if (stub_count % 2 != 0) {
        throw std::invalid_argument("for_each_matching: stub count must be even");
    }
    if (stub_count > max_oracle_stubs) {
        throw std::invalid_argument("for_each_matching: stub count exceeds " +
                                    std::to_string(max_oracle_stubs));
    }
    if (stub_count == 0) {
        std::vector<std::pair<std::uint32_t, std::uint32_t>> empty;
        visit(empty);
        return;
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(stub_count / 2);
    enumerate_rec(stub_count, 0, pairs, visit);
}

ExactResult enumerate_exact(const DegreeSequence& seq) {
    const std::uint64_t stubs = seq.sum_degrees;
    if (stubs > max_oracle_stubs) {
        throw std::invalid_argument(
            "enumerate_exact: stub count " + std::to_string(stubs) +
            " exceeds the enumeration limit of " +
            std::to_string(max_oracle_stubs));
    }
    const auto stub_count = static_cast<std::uint32_t>(stubs);
    const auto n = static_cast<std::uint32_t>(seq.size());

    std::vector<std::uint32_t> owner(stub_count);
    {
        std::uint32_t s = 0;
        for (std::uint32_t i = 0; i < n; ++i) {
            for (std::uint64_t d = 0; d < seq.degrees[i]; ++d) owner[s++] = i;
        }
    }

    std::uint64_t matchings = 0;
    std::uint64_t total_self_loops = 0;
    std::uint64_t total_excess = 0;
    // zero_count[i][j] for i <= j: matchings with no edge between i and j
    // (no loop at i when i == j).
    std::vector<std::vector<std::uint64_t>> zero_count(
        n, std::vector<std::uint64_t>(n, 0));
    std::vector<std::vector<std::uint32_t>> mult(n, std::vector<std::uint32_t>(n, 0));

    for_each_matching(stub_count, [&](const auto& pairs) {
        ++matchings;
        for (auto& row : mult) std::fill(row.begin(), row.end(), 0U);
        for (const auto& [s, t] : pairs) {
            const std::uint32_t u = owner[s];
            const std::uint32_t v = owner[t];
            mult[std::min(u, v)][std::max(u, v)] += 1;
        }
        for (std::uint32_t i = 0; i < n; ++i) {
            total_self_loops += mult[i][i];
            for (std::uint32_t j = i; j < n; ++j) {
                if (mult[i][j] == 0) {
                    zero_count[i][j] += 1;
                } else if (j > i) {
                    total_excess += mult[i][j] - 1;
                }
            }
        }
    });

    ExactResult result;
    result.matching_count = matchings;
    const auto count = static_cast<long long>(matchings);
    result.expected_self_loops =
        Rational(static_cast<long long>(total_self_loops), count);
    result.expected_excess =
        Rational(static_cast<long long>(total_excess), count);
    result.expected_erased_fraction =
        Rational(static_cast<long long>(total_self_loops + total_excess),
                 count * static_cast<long long>(stub_count));
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i; j < n; ++j) {
            result.no_edge_prob[{i, j}] =
                Rational(static_cast<long long>(zero_count[i][j]), count);
        }
    }
    return result;
}

}  // namespace ecm
