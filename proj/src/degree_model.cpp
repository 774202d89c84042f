#include "ecm/degree_model.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "ecm/format.hpp"

namespace ecm {

DegreeDistribution::DegreeDistribution(double gamma_, std::uint64_t k_min_)
    : gamma(gamma_), k_min(k_min_) {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("DegreeDistribution: gamma must be finite and > 1");
    }
    if (k_min < 1) {
        throw std::invalid_argument("DegreeDistribution: k_min must be >= 1");
    }
}

double tail_prob(const DegreeDistribution& dist, std::uint64_t k) {
    if (k < 1) throw std::invalid_argument("tail_prob: k must be >= 1");
    if (k <= dist.k_min) return 1.0;
    return std::pow(static_cast<double>(dist.k_min) / static_cast<double>(k),
                    dist.gamma);
}

double mean_degree(const DegreeDistribution& dist) {
    // E[X] = sum_{k>=1} P(X >= k). The first k_min terms are 1; the rest are
    // (k_min/k)^gamma. Sum those explicitly up to K = 10^6 * k_min, then add
    // the Euler-Maclaurin tail starting at N = K + 1:
    //   sum_{k>=N} k^-g = N^(1-g)/(g-1) + N^-g/2 + g*N^-(g+1)/12 - ...
    // The dropped term is O(g^3 N^-(g+3)), far below 1e-10 relative.
    const double g = dist.gamma;
    const auto kmin = static_cast<double>(dist.k_min);
    const std::uint64_t cutoff = 1000000ULL * dist.k_min;
    long double partial = 0.0L;
    for (std::uint64_t k = dist.k_min + 1; k <= cutoff; ++k) {
        partial += std::pow(kmin / static_cast<double>(k), g);
    }
    const auto n1 = static_cast<double>(cutoff + 1);
    const double scale = std::pow(kmin, g);
    const double tail = scale * (std::pow(n1, 1.0 - g) / (g - 1.0) +
                                 std::pow(n1, -g) / 2.0 +
                                 g * std::pow(n1, -g - 1.0) / 12.0);
    return static_cast<double>(partial) + kmin + tail;
}

std::uint64_t degree_from_uniform(const DegreeDistribution& dist, double u) {
    if (!(u > 0.0) || !(u < 1.0)) {
        throw std::invalid_argument("degree_from_uniform: u must lie in (0,1)");
    }
    const double value = static_cast<double>(dist.k_min) *
                         std::pow(u, -1.0 / dist.gamma);
    if (!(value < static_cast<double>(max_sampled_degree))) {
        return max_sampled_degree;
    }
    return static_cast<std::uint64_t>(value);
}

std::uint64_t sample_degree(const DegreeDistribution& dist, RandomStream& rng) {
    for (;;) {
        const double value = static_cast<double>(dist.k_min) *
                             std::pow(uniform_open01(rng), -1.0 / dist.gamma);
        if (value < static_cast<double>(max_sampled_degree)) {
            return static_cast<std::uint64_t>(value);
        }
        // Resample: the realised law is the degree law conditioned on not
        // exceeding the cap.
    }
}

namespace {

void accumulate_sums(const std::vector<std::uint64_t>& degrees,
                     std::uint64_t& sum, std::uint64_t& sum_sq) {
    sum = 0;
    sum_sq = 0;
    for (std::uint64_t d : degrees) {
        std::uint64_t sq = 0;
        if (__builtin_mul_overflow(d, d, &sq) ||
            __builtin_add_overflow(sum, d, &sum) ||
            __builtin_add_overflow(sum_sq, sq, &sum_sq)) {
            throw std::overflow_error("DegreeSequence: sums exceed 64-bit range");
        }
    }
}

}  // namespace

DegreeSequence DegreeSequence::from_degrees(std::vector<std::uint64_t> degrees) {
    if (degrees.empty()) {
        throw std::invalid_argument("DegreeSequence: empty degree list");
    }
    for (std::uint64_t d : degrees) {
        if (d == 0) {
            throw std::invalid_argument("DegreeSequence: degrees must be positive");
        }
    }
    DegreeSequence seq;
    seq.degrees = std::move(degrees);
    accumulate_sums(seq.degrees, seq.sum_degrees, seq.sum_squares);
    if (seq.sum_degrees % 2 != 0) {
        throw std::invalid_argument("DegreeSequence: stub count must be even");
    }
    return seq;
}

DegreeSequence sample_sequence(std::uint64_t n, const DegreeDistribution& dist,
                               RandomStream& rng) {
    if (n == 0) throw std::invalid_argument("sample_sequence: n must be >= 1");
    DegreeSequence seq;
    seq.degrees.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        seq.degrees.push_back(sample_degree(dist, rng));
    }
    std::uint64_t sum = 0;
    for (std::uint64_t d : seq.degrees) {
        if (__builtin_add_overflow(sum, d, &sum)) {
            throw std::overflow_error("sample_sequence: stub count exceeds 64-bit range");
        }
    }
    if (sum % 2 != 0) {
        seq.degrees.back() += 1;
        seq.evenized = true;
    }
    accumulate_sums(seq.degrees, seq.sum_degrees, seq.sum_squares);
    return seq;
}

void write_degree_file(const std::string& path, const DegreeSequence& seq,
                       double gamma, std::uint64_t k_min, std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_degree_file: cannot open " + path);
    out << "# n=" << seq.size() << " gamma=" << format_double(gamma)
        << " k_min=" << k_min << " seed=" << seed << "\n";
    for (std::uint64_t d : seq.degrees) out << d << "\n";
    if (!out) throw std::runtime_error("write_degree_file: write failed for " + path);
}

DegreeSequence read_degree_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_degree_file: cannot open " + path);
    std::vector<std::uint64_t> degrees;
    std::string line;
    std::uint64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::uint64_t value = 0;
        const char* begin = line.data();
        const char* end = begin + line.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || ptr != end) {
            throw std::runtime_error("read_degree_file: bad degree at line " +
                                     std::to_string(line_no) + " of " + path);
        }
        degrees.push_back(value);
    }
    if (degrees.empty()) {
        throw std::runtime_error("read_degree_file: no degrees in " + path);
    }
    return DegreeSequence::from_degrees(std::move(degrees));
}

}  // namespace ecm
