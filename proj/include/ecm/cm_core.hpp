#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecm/degree_model.hpp"
#include "ecm/rng.hpp"

namespace ecm {

/// Undirected node pair packed as (min << 32) | max. Sorting packed keys
/// orders edges lexicographically by endpoints.
inline std::uint64_t pack_pair(std::uint32_t a, std::uint32_t b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

inline std::pair<std::uint32_t, std::uint32_t> unpack_pair(std::uint64_t key) {
    return {static_cast<std::uint32_t>(key >> 32),
            static_cast<std::uint32_t>(key)};
}

/// Multigraph produced by stub pairing. Edges between distinct nodes are
/// stored once with their multiplicity, sorted by packed key; self-loops are
/// stored per node with their count (one unit per loop edge).
struct Multigraph {
    std::uint64_t n = 0;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> edges;  // (key, multiplicity)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> loops;  // (node, count)

    /// Total stub count 2 * (#edge units + #loop units); equals the paired
    /// sequence's sum of degrees.
    std::uint64_t stub_count() const;

    /// Per-node degree with each loop contributing 2.
    std::vector<std::uint64_t> degrees() const;
};

/// Simple graph left after erasure: loops dropped, multiplicities collapsed.
struct SimpleGraph {
    std::uint64_t n = 0;
    std::vector<std::uint64_t> edges;  // packed keys, sorted, distinct

    std::vector<std::uint64_t> degrees() const;
};

/// Erasure tally for one multigraph. total_erased counts one unit per
/// self-loop plus (multiplicity - 1) per collapsed edge, so it equals
/// stub_count/2 minus the number of surviving simple edges.
struct ErasureStats {
    std::uint64_t self_loop_count = 0;
    std::uint64_t excess_multiplicity = 0;
    std::uint64_t total_erased = 0;
    std::uint64_t stub_count = 0;
    double erased_fraction = 0.0;  // total_erased / stub_count
};

/// Pairs the items uniformly over all perfect matchings: the first free slot
/// is matched to a uniformly chosen later free slot, which is then swapped
/// into place. Emits on_pair(a, b) once per matched pair. Cost O(m) draws.
template <class OnPair>
void uniform_pairing(std::span<std::uint32_t> items, RandomStream& rng,
                     OnPair&& on_pair) {
    const std::size_t m = items.size();
    if (m % 2 != 0) {
        throw std::invalid_argument("uniform_pairing: item count must be even");
    }
    for (std::size_t i = 0; i < m; i += 2) {
        const std::size_t j = i + 1 + bounded_uniform(rng, m - i - 1);
        on_pair(items[i], items[j]);
        std::swap(items[i + 1], items[j]);
    }
}

/// Uniform stub pairing of a degree sequence into a multigraph.
/// Throws if the stub count is odd or the node count exceeds 32-bit range.
Multigraph pair_stubs(const DegreeSequence& seq, RandomStream& rng);

/// Uniform perfect matching on stub indices 0..stub_count-1, returned as a
/// partner array (partner[partner[s]] == s). Shares the pairing core with
/// pair_stubs so both draw identically from the stream.
std::vector<std::uint32_t> sample_stub_matching(std::uint32_t stub_count,
                                                RandomStream& rng);

/// Builds the multigraph a partner array induces when stubs are assigned to
/// nodes in degree order (node 0 owns the first degrees[0] stubs, and so on).
Multigraph multigraph_from_matching(const DegreeSequence& seq,
                                    std::span<const std::uint32_t> partner);

/// Removes self-loops and collapses multiplicities.
std::pair<SimpleGraph, ErasureStats> erase_graph(const Multigraph& mg);

/// Sup-distance between the empirical degree tail of the multiset and the
/// model tail: max over k >= 1 of |#{d_i >= k}/n - P(X >= k)|.
double empirical_degree_distance(std::span<const std::uint64_t> degrees,
                                 const DegreeDistribution& dist);
double empirical_degree_distance(const SimpleGraph& graph,
                                 const DegreeDistribution& dist);

/// Edge-list serialization, 1-based nodes, "i j multiplicity" per line with
/// i <= j; self-loops appear as "i i count".
void write_multigraph(const std::string& path, const Multigraph& mg);
Multigraph read_multigraph(const std::string& path);
void write_simple_graph(const std::string& path, const SimpleGraph& g);
SimpleGraph read_simple_graph(const std::string& path);

}  // namespace ecm
