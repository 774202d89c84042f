#include "ecm/cm_core.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace ecm {

std::uint64_t Multigraph::stub_count() const {
    std::uint64_t units = 0;
    for (const auto& [key, mult] : edges) units += mult;
    for (const auto& [node, count] : loops) units += count;
    return 2 * units;
}

std::vector<std::uint64_t> Multigraph::degrees() const {
    std::vector<std::uint64_t> deg(n, 0);
    for (const auto& [key, mult] : edges) {
        const auto [a, b] = unpack_pair(key);
        deg[a] += mult;
        deg[b] += mult;
    }
    for (const auto& [node, count] : loops) deg[node] += 2ULL * count;
    return deg;
}

std::vector<std::uint64_t> SimpleGraph::degrees() const {
    std::vector<std::uint64_t> deg(n, 0);
    for (std::uint64_t key : edges) {
        const auto [a, b] = unpack_pair(key);
        deg[a] += 1;
        deg[b] += 1;
    }
    return deg;
}

namespace {

/// Sorts raw per-pair keys and run-length encodes them into (key, count).
template <class Out>
void compress_sorted(std::vector<std::uint64_t>& raw, Out&& emit) {
    std::sort(raw.begin(), raw.end());
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i + 1;
        while (j < raw.size() && raw[j] == raw[i]) ++j;
        emit(raw[i], static_cast<std::uint32_t>(j - i));
        i = j;
    }
}

Multigraph multigraph_from_pairs(std::uint64_t n,
                                 std::vector<std::uint64_t>& edge_keys,
                                 std::vector<std::uint64_t>& loop_nodes) {
    Multigraph mg;
    mg.n = n;
    compress_sorted(edge_keys, [&](std::uint64_t key, std::uint32_t count) {
        mg.edges.emplace_back(key, count);
    });
    compress_sorted(loop_nodes, [&](std::uint64_t node, std::uint32_t count) {
        mg.loops.emplace_back(static_cast<std::uint32_t>(node), count);
    });
    return mg;
}

}  // namespace

Multigraph pair_stubs(const DegreeSequence& seq, RandomStream& rng) {
    if (seq.sum_degrees % 2 != 0) {
        throw std::invalid_argument("pair_stubs: stub count must be even");
    }
    if (seq.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("pair_stubs: too many nodes");
    }
    if (seq.sum_degrees > std::numeric_limits<std::uint32_t>::max()) {
        throw std::invalid_argument("pair_stubs: too many stubs");
    }
    std::vector<std::uint32_t> stubs;
    stubs.reserve(seq.sum_degrees);
    for (std::size_t i = 0; i < seq.degrees.size(); ++i) {
        stubs.insert(stubs.end(), seq.degrees[i], static_cast<std::uint32_t>(i));
    }
    std::vector<std::uint64_t> edge_keys;
    std::vector<std::uint64_t> loop_nodes;
    edge_keys.reserve(stubs.size() / 2);
    uniform_pairing(std::span<std::uint32_t>(stubs), rng,
                    [&](std::uint32_t u, std::uint32_t v) {
                        if (u == v) {
                            loop_nodes.push_back(u);
                        } else {
                            edge_keys.push_back(pack_pair(u, v));
                        }
                    });
    return multigraph_from_pairs(seq.size(), edge_keys, loop_nodes);
}

std::vector<std::uint32_t> sample_stub_matching(std::uint32_t stub_count,
                                                RandomStream& rng) {
    std::vector<std::uint32_t> stubs(stub_count);
    std::iota(stubs.begin(), stubs.end(), 0U);
    std::vector<std::uint32_t> partner(stub_count);
    uniform_pairing(std::span<std::uint32_t>(stubs), rng,
                    [&](std::uint32_t a, std::uint32_t b) {
                        partner[a] = b;
                        partner[b] = a;
                    });
    return partner;
}

Multigraph multigraph_from_matching(const DegreeSequence& seq,
                                    std::span<const std::uint32_t> partner) {
    if (partner.size() != seq.sum_degrees) {
        throw std::invalid_argument(
            "multigraph_from_matching: partner array size must equal stub count");
    }
    std::vector<std::uint32_t> owner(partner.size());
    std::uint32_t next = 0;
    for (std::size_t i = 0; i < seq.degrees.size(); ++i) {
        for (std::uint64_t d = 0; d < seq.degrees[i]; ++d) {
            owner[next++] = static_cast<std::uint32_t>(i);
        }
    }
    std::vector<std::uint64_t> edge_keys;
    std::vector<std::uint64_t> loop_nodes;
    for (std::uint32_t s = 0; s < partner.size(); ++s) {
        const std::uint32_t t = partner[s];
        if (partner[t] != s) {
            throw std::invalid_argument(
                "multigraph_from_matching: partner array is not an involution");
        }
        if (t <= s) continue;  // count each matched pair once
        const std::uint32_t u = owner[s];
        const std::uint32_t v = owner[t];
        if (u == v) {
            loop_nodes.push_back(u);
        } else {
            edge_keys.push_back(pack_pair(u, v));
        }
    }
    return multigraph_from_pairs(seq.size(), edge_keys, loop_nodes);
}

std::pair<SimpleGraph, ErasureStats> erase_graph(const Multigraph& mg) {
    SimpleGraph g;
    g.n = mg.n;
    g.edges.reserve(mg.edges.size());
    ErasureStats stats;
    for (const auto& [key, mult] : mg.edges) {
        g.edges.push_back(key);
        stats.excess_multiplicity += mult - 1;
    }
    for (const auto& [node, count] : mg.loops) {
        stats.self_loop_count += count;
    }
    stats.total_erased = stats.self_loop_count + stats.excess_multiplicity;
    stats.stub_count = mg.stub_count();
    stats.erased_fraction =
        stats.stub_count == 0
            ? 0.0
            : static_cast<double>(stats.total_erased) /
                  static_cast<double>(stats.stub_count);
    return {std::move(g), stats};
}

double empirical_degree_distance(std::span<const std::uint64_t> degrees,
                                 const DegreeDistribution& dist) {
    if (degrees.empty()) {
        throw std::invalid_argument("empirical_degree_distance: empty degree list");
    }
    // The empirical tail is piecewise constant with breakpoints at the
    // distinct degree values, and the model tail is decreasing, so the
    // supremum over k is attained at an endpoint of one of those pieces.
    std::vector<std::uint64_t> sorted(degrees.begin(), degrees.end());
    std::sort(sorted.begin(), sorted.end());
    const auto n = static_cast<double>(sorted.size());
    auto empirical_tail = [&](std::uint64_t k) {
        const auto it = std::lower_bound(sorted.begin(), sorted.end(), k);
        return static_cast<double>(sorted.end() - it) / n;
    };
    std::vector<std::uint64_t> candidates{1, dist.k_min, dist.k_min + 1};
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        if (sorted[i] >= 1) candidates.push_back(sorted[i]);
        candidates.push_back(sorted[i] + 1);
    }
    double sup = 0.0;
    for (std::uint64_t k : candidates) {
        if (k < 1) continue;
        sup = std::max(sup, std::abs(empirical_tail(k) - tail_prob(dist, k)));
    }
    return sup;
}

double empirical_degree_distance(const SimpleGraph& graph,
                                 const DegreeDistribution& dist) {
    const auto deg = graph.degrees();
    return empirical_degree_distance(std::span<const std::uint64_t>(deg), dist);
}

namespace {

struct EdgeLine {
    std::uint64_t i, j, count;
};

std::vector<EdgeLine> read_edge_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list " + path);
    std::vector<EdgeLine> lines;
    std::string line;
    std::uint64_t line_no = 0;
    std::uint64_t n = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            // Allow an optional "# n=<n>" header so isolated trailing nodes
            // survive a round trip.
            const auto pos = line.find("n=");
            if (pos != std::string::npos) {
                n = std::strtoull(line.c_str() + pos + 2, nullptr, 10);
            }
            continue;
        }
        std::istringstream row(line);
        EdgeLine e{};
        if (!(row >> e.i >> e.j >> e.count) || e.i < 1 || e.j < 1 || e.count < 1) {
            throw std::runtime_error("bad edge at line " + std::to_string(line_no) +
                                     " of " + path);
        }
        lines.push_back(e);
    }
    if (!lines.empty() && n == 0) {
        for (const auto& e : lines) n = std::max({n, e.i, e.j});
    }
    lines.push_back({0, 0, n});  // sentinel carrying the node count
    return lines;
}

}  // namespace

void write_multigraph(const std::string& path, const Multigraph& mg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_multigraph: cannot open " + path);
    out << "# n=" << mg.n << "\n";
    for (const auto& [key, mult] : mg.edges) {
        const auto [a, b] = unpack_pair(key);
        out << a + 1 << " " << b + 1 << " " << mult << "\n";
    }
    for (const auto& [node, count] : mg.loops) {
        out << node + 1 << " " << node + 1 << " " << count << "\n";
    }
    if (!out) throw std::runtime_error("write_multigraph: write failed for " + path);
}

Multigraph read_multigraph(const std::string& path) {
    auto lines = read_edge_lines(path);
    Multigraph mg;
    mg.n = lines.back().count;
    lines.pop_back();
    for (const auto& e : lines) {
        if (e.i > mg.n || e.j > mg.n) {
            throw std::runtime_error("read_multigraph: node id exceeds n in " + path);
        }
        const auto a = static_cast<std::uint32_t>(e.i - 1);
        const auto b = static_cast<std::uint32_t>(e.j - 1);
        if (a == b) {
            mg.loops.emplace_back(a, static_cast<std::uint32_t>(e.count));
        } else {
            mg.edges.emplace_back(pack_pair(a, b),
                                  static_cast<std::uint32_t>(e.count));
        }
    }
    std::sort(mg.edges.begin(), mg.edges.end());
    std::sort(mg.loops.begin(), mg.loops.end());
    return mg;
}

void write_simple_graph(const std::string& path, const SimpleGraph& g) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_simple_graph: cannot open " + path);
    out << "# n=" << g.n << "\n";
    for (std::uint64_t key : g.edges) {
        const auto [a, b] = unpack_pair(key);
        out << a + 1 << " " << b + 1 << " 1\n";
    }
    if (!out) throw std::runtime_error("write_simple_graph: write failed for " + path);
}

SimpleGraph read_simple_graph(const std::string& path) {
    auto lines = read_edge_lines(path);
    SimpleGraph g;
    g.n = lines.back().count;
    lines.pop_back();
    for (const auto& e : lines) {
        if (e.i == e.j || e.count != 1) {
            throw std::runtime_error("read_simple_graph: not a simple edge in " + path);
        }
        if (e.i > g.n || e.j > g.n) {
            throw std::runtime_error("read_simple_graph: node id exceeds n in " + path);
        }
        g.edges.push_back(pack_pair(static_cast<std::uint32_t>(e.i - 1),
                                    static_cast<std::uint32_t>(e.j - 1)));
    }
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

}  // namespace ecm
