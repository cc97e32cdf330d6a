#pragma once

#include <mindeg/rational.hpp>

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace mindeg::oracle {

// ---------------------------------------------------------------------------
// Labelled simple graphs on <= 10 vertices
// ---------------------------------------------------------------------------

constexpr int kMaxN = 10;

inline int pair_count(int n) { return n * (n - 1) / 2; }

struct SmallGraph {
    int n = 0;
    std::array<std::uint16_t, kMaxN> adj{};  // row bitmasks

    bool has_edge(int i, int j) const { return adj[static_cast<std::size_t>(i)] >> j & 1; }
    void add_edge(int i, int j) {
        adj[static_cast<std::size_t>(i)] |= std::uint16_t(1u << j);
        adj[static_cast<std::size_t>(j)] |= std::uint16_t(1u << i);
    }
    int degree(int v) const { return __builtin_popcount(adj[static_cast<std::size_t>(v)]); }
    int edge_count() const {
        int s = 0;
        for (int v = 0; v < n; ++v) s += degree(v);
        return s / 2;
    }
    int min_degree() const {
        int m = n;
        for (int v = 0; v < n; ++v) m = std::min(m, degree(v));
        return m;
    }
    bool connected() const;

    static SmallGraph from_mask(int n, std::uint64_t mask);
    std::uint64_t to_mask() const;
    static SmallGraph complete(int n);
};

struct Filters {
    bool connected = false;
    int min_degree = 0;
    std::optional<bool> planar;
};

// Exact planarity. Edge-count prefilter, then Boyer-Myrvold.
bool is_planar(const SmallGraph& g);
// Independent reference: recursive K5 / K3,3 minor search. Exponential;
// intended for cross-checks at n <= 7.
bool is_planar_minor_search(const SmallGraph& g);

// ---------------------------------------------------------------------------
// Core / kernel / k-core peeling
// ---------------------------------------------------------------------------

// 2-core: repeatedly delete degree-1 vertices (isolated vertices drop too).
// Returns the set of surviving vertices as a bitmask.
std::uint16_t core_vertices(const SmallGraph& g);
SmallGraph core_of(const SmallGraph& g);  // induced subgraph, original labels kept
// k-core: repeatedly delete vertices of degree < k
SmallGraph k_core(const SmallGraph& g, int k);

struct WeightedMultigraph {
    int n = 0;
    std::vector<int> loops;                 // per vertex
    std::map<std::pair<int, int>, int> mult;  // {i<j} -> multiplicity >= 1

    int degree(int v) const;
    int min_degree() const;
    bool simple() const;
    bool connected() const;
    // Product of 1/(2^i i!) per vertex with i loops and 1/i! per i-edge.
    Rational weight() const;
    // alpha_i (loop profile) and beta_i (multiplicity profile)
    std::map<int, int> loop_profile() const;
    std::map<int, int> multiplicity_profile() const;
};

// Kernel: contract every maximal path of degree-2 core vertices to an edge.
// Empty when the graph is a tree or its core is a bare cycle.
WeightedMultigraph kernel_of(const SmallGraph& g);

// Sizes (vertex counts, attachment vertex included) of the trees hanging off
// the core, one per core vertex. Empty result when the core is empty.
std::vector<int> attached_tree_sizes(const SmallGraph& g);
enum class TreeSizeConvention { include_root, exclude_root };
// Largest attached tree; throws when the core is empty (the graph is a tree).
int largest_attached_tree(const SmallGraph& g, TreeSizeConvention conv);

// ---------------------------------------------------------------------------
// Graph sweeps: OpenMP kernels over edge-subset ranges with a serial twin.
// An accumulator sees every passing graph and merges chunk results in
// deterministic chunk order, so results are identical for any thread count.
// ---------------------------------------------------------------------------

using GraphVisitor = std::function<void(const SmallGraph&)>;

// Serial reference: ascending edge-mask order.
void enumerate_graphs_serial(int n, const Filters& f, const GraphVisitor& visit);

// Table accumulators produced by the parallel kernels.
struct SweepCounts {
    long long count = 0;
    std::map<int, long long> by_edges;
    // (edges, root degree) -> rooted count; every vertex once as root
    std::map<std::pair<int, int>, long long> rooted_by_degree;
    std::map<int, long long> core_size_hist;
    // (tree size k, multiplicity j) -> #graphs with exactly j attached
    // k-vertex trees (include_root convention); graphs with empty core have
    // no attached trees
    std::map<std::pair<int, int>, long long> tree_size_hist;
    std::map<int, long long> largest_tree_hist;  // include_root; tree graphs skipped

    void merge(const SweepCounts& o);
    bool operator==(const SweepCounts&) const = default;
};

SweepCounts sweep_graphs(int n, const Filters& f, int threads = 0);
SweepCounts sweep_graphs_serial(int n, const Filters& f);

// ---------------------------------------------------------------------------
// Weighted multigraph enumeration (desk scale)
// ---------------------------------------------------------------------------

struct MultigraphFilters {
    bool connected = false;
    int min_degree = 0;  // loops count twice
};

// Aggregate weights keyed by (loop total m, l_1, ..., l_mult_cap) where l_i
// is the number of i-edges. Total dart budget guards runtime.
std::map<std::vector<int>, Rational> enumerate_multigraphs(int n, int loop_cap, int mult_cap,
                                                           const MultigraphFilters& f);

// ---------------------------------------------------------------------------
// Rooted planar maps via rotation systems
// ---------------------------------------------------------------------------

struct RotationMap {
    std::vector<int> sigma;  // vertex rotations on darts 0..2n-1
    std::vector<int> alpha;  // fixed-point-free involution (edges)
};

struct MapCounts {
    Integer pair_count = 0;  // transitive genus-0 (sigma, alpha) pairs
    Integer maps = 0;        // pair_count / (2n-1)!
    std::map<int, Integer> root_vertex_degree;  // per rooted map
    std::map<int, Integer> root_face_degree;
    std::map<int, Integer> two_map_root_degree;    // min vertex degree >= 2
    std::map<int, Integer> three_map_root_degree;  // min vertex degree >= 3

    void merge(const MapCounts& o);
    bool operator==(const MapCounts&) const = default;
};

// n <= 4 (permutation sweep over (2n)! sigmas)
MapCounts sweep_rooted_maps(int n, int threads = 0);
MapCounts sweep_rooted_maps_serial(int n);

}  // namespace mindeg::oracle
