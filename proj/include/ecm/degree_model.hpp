#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ecm/rng.hpp"

namespace ecm {

/// Pareto-type degree law on the integers: P(X >= k) = (k_min / k)^gamma for
/// k >= k_min and 1 below. gamma > 1 so the mean exists; k_min >= 1.
struct DegreeDistribution {
    double gamma;
    std::uint64_t k_min;

    DegreeDistribution(double gamma_, std::uint64_t k_min_);
};

/// Largest degree the sampler will return. Chosen so that any sum of n <= 10^7
/// squared degrees fits in an unsigned 64-bit accumulator with headroom.
/// P(X > cap) < 1e-9 for every supported (gamma, k_min), so the truncation
/// bias is far below Monte Carlo resolution.
inline constexpr std::uint64_t max_sampled_degree = 3037000499ULL;

/// P(X >= k) for integer k >= 1.
double tail_prob(const DegreeDistribution& dist, std::uint64_t k);

/// E[X], accurate to 1e-10 relative. Partial sum of tail probabilities up to
/// 10^6 * k_min plus an Euler-Maclaurin tail correction.
double mean_degree(const DegreeDistribution& dist);

/// Inverse-transform map from u in (0,1) to a degree:
/// floor(k_min * u^(-1/gamma)), saturated at max_sampled_degree.
/// Monotone non-increasing in u. Rejects u outside (0,1).
std::uint64_t degree_from_uniform(const DegreeDistribution& dist, double u);

/// One draw from the degree law, resampling past max_sampled_degree.
std::uint64_t sample_degree(const DegreeDistribution& dist, RandomStream& rng);

/// A degree sequence together with its stub count and sum of squares.
/// Invariants: every degree >= 1, sum_degrees is even, and the cached sums
/// match the degree vector.
struct DegreeSequence {
    std::vector<std::uint64_t> degrees;
    std::uint64_t sum_degrees = 0;  // L_n, total stub count
    std::uint64_t sum_squares = 0;
    bool evenized = false;  // true when a trailing +1 fixed an odd stub count

    std::uint64_t size() const { return degrees.size(); }

    /// Wraps an explicit degree list. Throws if any degree is zero, the sum
    /// is odd, or a sum would overflow.
    static DegreeSequence from_degrees(std::vector<std::uint64_t> degrees);
};

/// n i.i.d. draws; if the stub count comes out odd the last degree is
/// incremented once and the sequence is flagged as evenized.
DegreeSequence sample_sequence(std::uint64_t n, const DegreeDistribution& dist,
                               RandomStream& rng);

/// Writes one degree per line after a comment header of the form
/// "# n=<n> gamma=<gamma> k_min=<k> seed=<seed>".
void write_degree_file(const std::string& path, const DegreeSequence& seq,
                       double gamma, std::uint64_t k_min, std::uint64_t seed);

/// Reads a file produced by write_degree_file (the header is optional;
/// any leading '#' lines are skipped).
DegreeSequence read_degree_file(const std::string& path);

}  // namespace ecm
