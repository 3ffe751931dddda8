#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fdl {

/// Undirected simple graph with dense node indices.
///
/// Edges are stored as (u, v) with u < v, in first-appearance order.
/// The adjacency lists mirror the edge list exactly and are kept sorted.
/// Parsers drop self-loops and duplicate edges and record how many were
/// dropped instead of failing.
struct Graph {
    int node_count = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adjacency;

    /// Original identifiers, kept for rendering and round-tripping.
    /// Empty when nodes were never named (generator output).
    std::vector<std::string> node_labels;

    /// Per-edge positive lengths; empty for unweighted graphs.
    std::vector<double> edge_weights;

    int dropped_self_loops = 0;
    int dropped_duplicate_edges = 0;

    int edge_count() const { return static_cast<int>(edges.size()); }
    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
    bool weighted() const { return !edge_weights.empty(); }
    bool has_edge(int u, int v) const;
};

/// Accumulates edges given by arbitrary string identifiers, re-indexing them
/// densely in first-appearance order. Self-loops and duplicates are dropped
/// and counted.
class GraphBuilder {
public:
    int add_node(const std::string& label);
    void add_edge(const std::string& u, const std::string& v, double weight = 1.0, bool has_weight = false);
    void add_edge_indexed(int u, int v, double weight = 1.0, bool has_weight = false);
    Graph build();

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, int> label_index_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<double> weights_;
    std::set<std::pair<int, int>> seen_;
    bool any_weight_ = false;
    int dropped_self_loops_ = 0;
    int dropped_duplicates_ = 0;
};

/// Parses `u v [w]` lines; '#' starts a comment, blank lines are skipped.
/// Throws ParseError (with the 1-based line number) on malformed lines or
/// non-positive weights.
Graph load_edge_list(std::istream& in);
Graph parse_edge_list(const std::string& text);

/// Serializes back to edge-list text: one `label label [weight]` line per
/// edge, first-appearance order. Parsing the output reproduces the graph.
std::string to_edge_list(const Graph& g);

/// Parses the GML subset `graph [ node [ id N ] ... edge [ source A target B ] ... ]`.
/// Keys are case-sensitive; unknown keys and nested blocks are skipped.
/// Node ids become labels; indices are assigned in order of appearance.
Graph load_gml(std::istream& in);
Graph parse_gml(const std::string& text);

/// Reads a graph file, dispatching on content: a file whose first
/// non-comment token is `graph` is treated as GML, otherwise edge-list.
Graph load_graph_file(const std::string& path);

/// Complete b-ary tree: node 0 is the root, children of node i are
/// contiguous (b*i+1 .. b*i+b). Throws SizeError when the node count
/// would overflow.
Graph generate_tree(int branching, int depth);

/// Sierpinski-gasket graph: |V| = 3(3^order+1)/2, |E| = 3^(order+1).
/// Throws SizeError for order > 12 or order < 0.
Graph generate_sierpinski(int order);

/// width x height lattice with every edge kept independently with
/// probability keep_fraction (seeded); isolated nodes are removed and the
/// indices compacted.
Graph generate_grid_random(int width, int height, double keep_fraction, std::uint64_t seed);

/// Cycle on n nodes (0-1-2-...-n-1-0).
Graph generate_cycle(int n);

/// Hop-count distances between all node pairs. Unreachable pairs hold the
/// kUnreachable sentinel, which must never enter arithmetic.
struct DistanceMatrix {
    static constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

    int n = 0;
    std::vector<std::uint32_t> d;

    std::uint32_t at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
    std::uint32_t& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }

    /// Largest finite entry (graph diameter for connected graphs).
    std::uint32_t max_finite() const;
};

/// BFS from every node.
DistanceMatrix apsp_bfs(const Graph& g);

/// 2|E| / |V|. Throws DomainError on an empty graph.
double avg_degree(const Graph& g);

/// Connected components, largest first (ties by smallest contained index);
/// node indices within each component are ascending.
std::vector<std::vector<int>> connected_components(const Graph& g);

} // namespace fdl
