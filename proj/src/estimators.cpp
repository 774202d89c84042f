#include "ecm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace ecm {

double bound_lemma1(const DegreeSequence& seq) {
    const auto L = static_cast<double>(seq.sum_degrees);
    const auto s2 = static_cast<double>(seq.sum_squares);
    return s2 / (L * L) + 2.0 * s2 * s2 / (L * L * L);
}

double pairwise_exp_sum(const DegreeSequence& seq, double scale) {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("pairwise_exp_sum: scale must be positive");
    }
    // Histogram over distinct degree values; the ordered-pair sum is then a
    // symmetric sum over value pairs weighted by multiplicities.
    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    counts.reserve(seq.degrees.size());
    for (std::uint64_t d : seq.degrees) ++counts[d];
    std::vector<std::pair<std::uint64_t, std::uint64_t>> hist(counts.begin(),
                                                              counts.end());
    std::sort(hist.begin(), hist.end());
    long double total = 0.0L;
    for (std::size_t i = 0; i < hist.size(); ++i) {
        const auto [a, ca] = hist[i];
        const auto da = static_cast<double>(a);
        const auto wa = static_cast<double>(ca);
        total += wa * wa * std::exp(-da * da / scale);
        for (std::size_t j = i + 1; j < hist.size(); ++j) {
            const auto [b, cb] = hist[j];
            total += 2.0L * wa * static_cast<double>(cb) *
                     std::exp(-da * static_cast<double>(b) / scale);
        }
    }
    return static_cast<double>(total);
}

double erased_identity_rhs(
    const DegreeSequence& seq,
    const std::map<std::pair<std::uint32_t, std::uint32_t>, double>& no_edge_prob,
    DiagonalConvention convention) {
    const auto n = static_cast<std::uint32_t>(seq.size());
    const auto L = static_cast<double>(seq.sum_degrees);
    long double sum = 0.0L;
    for (std::uint32_t i = 0; i < n; ++i) {
        for (std::uint32_t j = i; j < n; ++j) {
            double p;
            if (i == j && convention == DiagonalConvention::unit_diagonal) {
                p = 1.0;
            } else {
                const auto it = no_edge_prob.find({i, j});
                if (it == no_edge_prob.end()) {
                    throw std::invalid_argument(
                        "erased_identity_rhs: missing probability for pair (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
                }
                p = it->second;
            }
            if (!(p >= 0.0) || !(p <= 1.0)) {
                throw std::invalid_argument(
                    "erased_identity_rhs: probability outside [0,1]");
            }
            sum += (i == j) ? p : 2.0L * p;  // ordered pairs
        }
    }
    const auto nd = static_cast<double>(n);
    return 1.0 - nd * nd / L + static_cast<double>(sum) / L;
}

double no_edge_upper_bound(std::uint64_t d_i, std::uint64_t d_j,
                           std::uint64_t L) {
    if (d_i < 1) throw std::invalid_argument("no_edge_upper_bound: d_i must be >= 1");
    if (L <= 2 * d_i + 1) {
        throw std::invalid_argument(
            "no_edge_upper_bound: requires L > 2*d_i + 1");
    }
    const auto di = static_cast<double>(d_i);
    const auto dj = static_cast<double>(d_j);
    const auto Ld = static_cast<double>(L);
    // One factor per stub of i: pairing the k-th stub leaves L - 2k - 1
    // candidate partners, of which d_j belong to j.
    double avoid_product = 1.0;
    for (std::uint64_t k = 0; k < d_i; ++k) {
        avoid_product *= 1.0 - dj / (Ld - 2.0 * static_cast<double>(k) - 1.0);
    }
    const double denom = Ld - 2.0 * di;
    const double value = avoid_product + di * di * dj / (denom * denom);
    return std::max(0.0, value);
}

namespace {

/// phi(x) = x - 1 + e^(-x), evaluated without cancellation near 0.
double phi(double x) {
    if (x < 1e-2) {
        const double x2 = x * x;
        return x2 / 2.0 - x2 * x / 6.0 + x2 * x2 / 24.0 - x2 * x2 * x / 120.0 +
               x2 * x2 * x2 / 720.0;
    }
    return x + std::expm1(-x);
}

/// sum_{k>=N} k^(-s): 1024 explicit terms plus an Euler-Maclaurin tail.
double tail_zeta(double s, std::uint64_t N) {
    long double sum = 0.0L;
    const std::uint64_t M = N + 1024;
    for (std::uint64_t k = N; k < M; ++k) {
        sum += std::pow(static_cast<double>(k), -s);
    }
    const auto m = static_cast<double>(M);
    sum += std::pow(m, 1.0 - s) / (s - 1.0);
    sum += std::pow(m, -s) / 2.0;
    sum += s * std::pow(m, -s - 1.0) / 12.0;
    sum -= s * (s + 1.0) * (s + 2.0) * std::pow(m, -s - 3.0) / 720.0;
    return static_cast<double>(sum);
}

/// E[D * 1{D >= m}] for the degree law.
double tail_first_moment(const DegreeDistribution& dist, std::uint64_t m,
                         double mu) {
    if (m <= dist.k_min) return mu;
    const double scale = std::pow(static_cast<double>(dist.k_min), dist.gamma);
    return static_cast<double>(m) * tail_prob(dist, m) +
           scale * tail_zeta(dist.gamma, m + 1);
}

}  // namespace

double tauberian_term(const DegreeDistribution& dist, double t) {
    if (!(dist.gamma > 1.0) || !(dist.gamma < 2.0)) {
        throw std::invalid_argument("tauberian_term: requires gamma in (1,2)");
    }
    if (!(t > 0.0) || !std::isfinite(t)) {
        throw std::invalid_argument("tauberian_term: t must be positive and finite");
    }
    // Split E[phi(X/t)], X = D1*D2, at the product cutoff B = 60t. Below B the
    // pmf sum is explicit; above B, phi(x) = x - 1 + e^(-x) and the e^(-x)
    // piece carries weight at most e^(-60), so the remainder reduces to the
    // exact linear tail (1/t)*E[X 1{X>B}] - P(X>B), which has closed form in
    // the degree tail function. All summands are positive, so no cancellation
    // beyond the final subtraction of two well-separated quantities.
    const std::uint64_t kmin = dist.k_min;
    const auto B = static_cast<std::uint64_t>(std::ceil(60.0 * t));
    const double mu = mean_degree(dist);

    const std::uint64_t a_end = B / kmin + 1;  // first a with floor(B/a) < k_min
    long double below = 0.0L;
    long double p_above = 0.0L;
    long double e_above = 0.0L;
    std::uint64_t cached_m = 0;
    double cached_t1 = 0.0;
    double cached_tail_m = 0.0;
    double tail_a = 1.0;  // tail_prob(dist, a), maintained incrementally
    for (std::uint64_t a = kmin; a < a_end; ++a) {
        const double tail_a_next = tail_prob(dist, a + 1);
        const double pa = tail_a - tail_a_next;
        tail_a = tail_a_next;
        const std::uint64_t q = B / a;
        const std::uint64_t m = q + 1;
        if (m != cached_m) {
            cached_m = m;
            cached_t1 = tail_first_moment(dist, m, mu);
            cached_tail_m = tail_prob(dist, m);
        }
        p_above += pa * cached_tail_m;
        e_above += pa * static_cast<double>(a) * cached_t1;
        if (a <= q) {
            // Products a*v <= B with v >= a: diagonal plus twice the upper
            // triangle by symmetry of the product law.
            const auto ad = static_cast<double>(a);
            below += pa * pa * phi(ad * ad / t);
            double tail_v = tail_prob(dist, a + 1);
            for (std::uint64_t v = a + 1; v <= q; ++v) {
                const double tail_v_next = tail_prob(dist, v + 1);
                const double pv = tail_v - tail_v_next;
                below += 2.0L * pa * pv * phi(ad * static_cast<double>(v) / t);
                tail_v = tail_v_next;
            }
        }
    }
    p_above += tail_prob(dist, a_end);
    e_above += mu * tail_first_moment(dist, a_end, mu);
    const long double result =
        below + e_above / t - p_above;
    return static_cast<double>(result);
}

double tauberian_term_constant(double c, double t) {
    if (!(c >= 0.0)) throw std::invalid_argument("tauberian_term_constant: c must be >= 0");
    if (!(t > 0.0)) throw std::invalid_argument("tauberian_term_constant: t must be positive");
    return phi(c / t);
}

double theoretical_exponent(double gamma) {
    if (!(gamma > 1.0)) {
        throw std::invalid_argument("theoretical_exponent: requires gamma > 1");
    }
    if (gamma <= 1.5) return 1.0 / gamma - 1.0;
    if (gamma <= 2.0) return 4.0 / gamma - 3.0;
    return -1.0;
}

OlsFit ols_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("ols_fit: need >= 2 paired points");
    }
    const auto m = static_cast<double>(x.size());
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xbar += x[i];
        ybar += y[i];
    }
    xbar /= m;
    ybar /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - xbar) * (x[i] - xbar);
        sxy += (x[i] - xbar) * (y[i] - ybar);
    }
    if (sxx == 0.0) throw std::invalid_argument("ols_fit: x values are all equal");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    if (x.size() > 2) {
        double ssr = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - fit.intercept - fit.slope * x[i];
            ssr += r * r;
        }
        fit.slope_stderr = std::sqrt(ssr / ((m - 2.0) * sxx));
    }
    return fit;
}

ScalingDiagnostic clt_scaling_diagnostic(const std::vector<CltSample>& samples,
                                         double mu) {
    std::map<std::uint64_t, std::vector<std::pair<double, double>>> by_n;
    for (const auto& s : samples) {
        const double centered =
            std::abs(static_cast<double>(s.sum_degrees) -
                     mu * static_cast<double>(s.n));
        by_n[s.n].emplace_back(static_cast<double>(s.sum_squares), centered);
    }
    if (by_n.size() < 4) {
        throw std::invalid_argument(
            "clt_scaling_diagnostic: need samples at >= 4 distinct n");
    }
    auto upper_quantile = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        const auto r = static_cast<double>(v.size());
        auto idx = static_cast<std::size_t>(std::ceil(0.9 * r));
        if (idx > 0) --idx;
        return v[idx];
    };
    ScalingDiagnostic diag;
    std::vector<double> log_n, log_sq, log_centered;
    for (auto& [n, values] : by_n) {
        std::vector<double> sq, centered;
        sq.reserve(values.size());
        centered.reserve(values.size());
        for (const auto& [s2, c] : values) {
            sq.push_back(s2);
            centered.push_back(c);
        }
        const double q_sq = upper_quantile(sq);
        const double q_c = upper_quantile(centered);
        log_n.push_back(std::log(static_cast<double>(n)));
        log_sq.push_back(std::log(q_sq));
        if (q_c <= 0.0) {
            diag.centered_sum_degenerate = true;
        } else {
            log_centered.push_back(std::log(q_c));
        }
    }
    diag.points_used = static_cast<int>(by_n.size());
    const OlsFit fit_sq = ols_fit(log_n, log_sq);
    diag.slope_sum_squares = fit_sq.slope;
    diag.stderr_sum_squares = fit_sq.slope_stderr;
    if (!diag.centered_sum_degenerate) {
        const OlsFit fit_c = ols_fit(log_n, log_centered);
        diag.slope_centered_sum = fit_c.slope;
        diag.stderr_centered_sum = fit_c.slope_stderr;
    }
    return diag;
}

}  // namespace ecm
