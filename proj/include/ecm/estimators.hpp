#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "ecm/degree_model.hpp"

namespace ecm {

/// First-order bound on the expected erased fraction of a degree sequence:
///   sum(D_i^2) / L^2  +  2 * (sum(D_i^2))^2 / L^3
/// with L the stub count. Always >= the exact expectation.
double bound_lemma1(const DegreeSequence& seq);

/// Sum over all ordered pairs (i,j), including i == j, of
/// exp(-D_i * D_j / scale). Computed over the multiset of distinct degree
/// values, so the cost is quadratic in the number of distinct degrees
/// rather than in n. Always in (0, n^2].
double pairwise_exp_sum(const DegreeSequence& seq, double scale);

/// Convention for the diagonal entries of the no-edge probability table when
/// evaluating the pairwise identity below.
enum class DiagonalConvention {
    exact_diagonal,  // use P(no self-loop at i) as supplied
    unit_diagonal,   // replace diagonal entries by 1
};

/// Evaluates 1 - n^2/L + (1/L) * sum over ordered pairs (i,j) of
/// P(no edge between i and j), taking P from the supplied unordered table
/// (key i <= j). Under unit_diagonal the result equals exactly twice the
/// expected erased fraction, i.e. (1/L) * sum_{i,j} E[erased units between
/// i and j] with each erased unit counted from both endpoints.
double erased_identity_rhs(
    const DegreeSequence& seq,
    const std::map<std::pair<std::uint32_t, std::uint32_t>, double>& no_edge_prob,
    DiagonalConvention convention);

/// Upper bound on P(no edge between nodes of degree d_i and d_j) in a
/// uniform pairing with L stubs:
///   prod_{k=0}^{d_i-1} (1 - d_j / (L - 2k - 1))  +  d_i^2 * d_j / (L - 2*d_i)^2,
/// clamped below at 0. The k-th factor is the chance that the k-th stub of i
/// avoids j's stubs given the earlier ones did; the additive term absorbs
/// pairings among i's own stubs. Requires L > 2*d_i + 1. Dominates the exact
/// enumeration probability on every small sequence (oracle-checked).
double no_edge_upper_bound(std::uint64_t d_i, std::uint64_t d_j, std::uint64_t L);

/// E[phi(D1 * D2 / t)] with phi(x) = x - 1 + e^(-x) and D1, D2 independent
/// draws from the degree law. Requires 1 < gamma < 2 and t > 0. Accurate to
/// about 1e-12 relative; cost grows linearly in t (practical up to ~1e6).
double tauberian_term(const DegreeDistribution& dist, double t);

/// Same functional for a degenerate product equal to the constant c.
double tauberian_term_constant(double c, double t);

/// Predicted log-log slope of the expected erased fraction in n:
///   1/gamma - 1   on (1, 1.5],
///   4/gamma - 3   on (1.5, 2],
///   -1            above 2.
/// Continuous and non-increasing in gamma.
double theoretical_exponent(double gamma);

/// Ordinary least squares fit y = intercept + slope * x.
struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};
OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y);

/// One replication's sums for the tail-sum growth diagnostic.
struct CltSample {
    std::uint64_t n = 0;
    std::uint64_t sum_degrees = 0;
    std::uint64_t sum_squares = 0;
};

/// Log-log growth rates of the 0.9 replication quantile against n, for the
/// sum of squared degrees and for the centered stub count |L - n*mu|.
struct ScalingDiagnostic {
    double slope_sum_squares = 0.0;
    double stderr_sum_squares = 0.0;
    double slope_centered_sum = 0.0;
    double stderr_centered_sum = 0.0;
    bool centered_sum_degenerate = false;  // a quantile hit 0, slope unusable
    int points_used = 0;
};

/// Requires samples at >= 4 distinct n. mu is the model mean degree used to
/// center the stub count.
ScalingDiagnostic clt_scaling_diagnostic(const std::vector<CltSample>& samples,
                                         double mu);

/// Report emitted by the bounds command; field names match the JSON output.
struct BoundReport {
    double lemma1_bound = 0.0;
    double pairwise_exp_sum = 0.0;
    double identity_value = 0.0;  // set only when the sequence is small
                                  // enough for exact enumeration
    double second_moment_ratio = 0.0;  // sum_squares / L^2
    std::uint64_t n = 0;
    std::uint64_t L_n = 0;
};

}  // namespace ecm
