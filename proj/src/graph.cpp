#include "fdl/graph.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>

#include "fdl/errors.hpp"
#include "fdl/rng.hpp"

namespace fdl {

bool Graph::has_edge(int u, int v) const {
    if (u < 0 || u >= node_count || v < 0 || v >= node_count) return false;
    const auto& adj = adjacency[u];
    return std::binary_search(adj.begin(), adj.end(), v);
}

namespace {

void rebuild_adjacency(Graph& g) {
    g.adjacency.assign(g.node_count, {});
    for (const auto& [u, v] : g.edges) {
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
}

} // namespace

int GraphBuilder::add_node(const std::string& label) {
    auto it = label_index_.find(label);
    if (it != label_index_.end()) return it->second;
    const int idx = static_cast<int>(labels_.size());
    labels_.push_back(label);
    label_index_.emplace(label, idx);
    return idx;
}

void GraphBuilder::add_edge(const std::string& u, const std::string& v, double weight, bool has_weight) {
    const int ui = add_node(u); // sequenced: u must be indexed before v
    const int vi = add_node(v);
    add_edge_indexed(ui, vi, weight, has_weight);
}

void GraphBuilder::add_edge_indexed(int u, int v, double weight, bool has_weight) {
    if (u == v) {
        ++dropped_self_loops_;
        return;
    }
    std::pair<int, int> e{std::min(u, v), std::max(u, v)};
    if (!seen_.insert(e).second) {
        ++dropped_duplicates_;
        return;
    }
    edges_.push_back(e);
    weights_.push_back(weight);
    if (has_weight) any_weight_ = true;
}

Graph GraphBuilder::build() {
    Graph g;
    g.node_count = static_cast<int>(labels_.size());
    g.edges = std::move(edges_);
    g.node_labels = std::move(labels_);
    if (any_weight_) g.edge_weights = std::move(weights_);
    g.dropped_self_loops = dropped_self_loops_;
    g.dropped_duplicate_edges = dropped_duplicates_;
    rebuild_adjacency(g);
    return g;
}

Graph load_edge_list(std::istream& in) {
    GraphBuilder builder;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string u, v, w, extra;
        if (!(ss >> u)) continue; // blank or comment-only line
        if (!(ss >> v))
            throw ParseError("edge list line " + std::to_string(lineno) + ": expected two node tokens");
        if (ss >> w) {
            if (ss >> extra)
                throw ParseError("edge list line " + std::to_string(lineno) + ": too many tokens");
            std::size_t pos = 0;
            double weight = 0.0;
            try {
                weight = std::stod(w, &pos);
            } catch (const std::exception&) {
                pos = 0;
            }
            if (pos != w.size())
                throw ParseError("edge list line " + std::to_string(lineno) + ": bad weight '" + w + "'");
            if (!(weight > 0.0))
                throw ParseError("edge list line " + std::to_string(lineno) + ": non-positive weight");
            builder.add_edge(u, v, weight, true);
        } else {
            builder.add_edge(u, v);
        }
    }
    return builder.build();
}

Graph parse_edge_list(const std::string& text) {
    std::istringstream ss(text);
    return load_edge_list(ss);
}

std::string to_edge_list(const Graph& g) {
    std::ostringstream out;
    auto label = [&](int v) {
        return g.node_labels.empty() ? std::to_string(v) : g.node_labels[v];
    };
    for (std::size_t e = 0; e < g.edges.size(); ++e) {
        out << label(g.edges[e].first) << ' ' << label(g.edges[e].second);
        if (g.weighted()) out << ' ' << g.edge_weights[e];
        out << '\n';
    }
    // Isolated nodes are not representable in this format. Graphs read from
    // edge-list text never contain them, so parse -> serialize -> parse is
    // an identity for parser output.
    return out.str();
}

namespace {

// Minimal GML tokenizer: words, numbers and quoted strings, with '[' / ']'
// as structural tokens.
struct GmlTokenizer {
    explicit GmlTokenizer(std::istream& in) : in_(in) {}

    bool next(std::string& tok) {
        char c;
        while (in_.get(c)) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            if (c == '#') { // comment to end of line
                std::string skip;
                std::getline(in_, skip);
                continue;
            }
            if (c == '[' || c == ']') {
                tok.assign(1, c);
                return true;
            }
            if (c == '"') {
                tok.clear();
                while (in_.get(c) && c != '"') tok.push_back(c);
                return true;
            }
            tok.assign(1, c);
            while (in_.get(c)) {
                if (std::isspace(static_cast<unsigned char>(c)) || c == '[' || c == ']') {
                    if (c == '[' || c == ']') in_.unget();
                    break;
                }
                tok.push_back(c);
            }
            return true;
        }
        return false;
    }

private:
    std::istream& in_;
};

void gml_skip_block(GmlTokenizer& tokens) {
    std::string tok;
    int depth = 1;
    while (depth > 0 && tokens.next(tok)) {
        if (tok == "[") ++depth;
        if (tok == "]") --depth;
    }
    if (depth != 0) throw ParseError("gml: unterminated block");
}

} // namespace

Graph load_gml(std::istream& in) {
    GmlTokenizer tokens(in);
    std::string tok;
    bool found_graph = false;
    while (tokens.next(tok)) {
        if (tok == "graph") {
            if (!tokens.next(tok) || tok != "[")
                throw ParseError("gml: expected '[' after 'graph'");
            found_graph = true;
            break;
        }
        // skip any leading key/value pairs (e.g. Creator "...")
    }
    if (!found_graph) throw ParseError("gml: missing graph block");

    GraphBuilder builder;
    std::map<std::string, int> id_to_index;
    struct PendingEdge {
        std::string source, target;
        bool has_source = false, has_target = false;
    };
    std::vector<PendingEdge> pending;

    int depth = 1;
    while (depth > 0) {
        if (!tokens.next(tok)) throw ParseError("gml: unterminated graph block");
        if (tok == "]") {
            --depth;
            continue;
        }
        if (tok == "node") {
            if (!tokens.next(tok) || tok != "[") throw ParseError("gml: expected '[' after 'node'");
            std::string id;
            bool has_id = false;
            int d = 1;
            while (d > 0) {
                if (!tokens.next(tok)) throw ParseError("gml: unterminated node block");
                if (tok == "[") { ++d; continue; }
                if (tok == "]") { --d; continue; }
                if (d == 1 && tok == "id") {
                    if (!tokens.next(id)) throw ParseError("gml: node id missing value");
                    has_id = true;
                } else {
                    // unknown key: consume its value, which may be a block
                    std::string val;
                    if (!tokens.next(val)) throw ParseError("gml: key '" + tok + "' missing value");
                    if (val == "[") gml_skip_block(tokens);
                }
            }
            if (!has_id) throw ParseError("gml: node block without id");
            if (id_to_index.count(id)) throw ParseError("gml: duplicate node id " + id);
            id_to_index[id] = builder.add_node(id);
        } else if (tok == "edge") {
            if (!tokens.next(tok) || tok != "[") throw ParseError("gml: expected '[' after 'edge'");
            PendingEdge e;
            int d = 1;
            while (d > 0) {
                if (!tokens.next(tok)) throw ParseError("gml: unterminated edge block");
                if (tok == "[") { ++d; continue; }
                if (tok == "]") { --d; continue; }
                if (d == 1 && (tok == "source" || tok == "target")) {
                    std::string val;
                    if (!tokens.next(val)) throw ParseError("gml: edge " + tok + " missing value");
                    if (tok == "source") { e.source = val; e.has_source = true; }
                    else { e.target = val; e.has_target = true; }
                } else {
                    std::string val;
                    if (!tokens.next(val)) throw ParseError("gml: key '" + tok + "' missing value");
                    if (val == "[") gml_skip_block(tokens);
                }
            }
            if (!e.has_source || !e.has_target)
                throw ParseError("gml: edge block missing source or target");
            pending.push_back(std::move(e));
        } else {
            std::string val;
            if (!tokens.next(val)) throw ParseError("gml: key '" + tok + "' missing value");
            if (val == "[") gml_skip_block(tokens);
        }
    }

    for (const auto& e : pending) {
        auto su = id_to_index.find(e.source);
        auto sv = id_to_index.find(e.target);
        if (su == id_to_index.end())
            throw ParseError("gml: edge references unknown node id " + e.source);
        if (sv == id_to_index.end())
            throw ParseError("gml: edge references unknown node id " + e.target);
        builder.add_edge_indexed(su->second, sv->second);
    }
    return builder.build();
}

Graph parse_gml(const std::string& text) {
    std::istringstream ss(text);
    return load_gml(ss);
}

Graph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open graph file: " + path);
    // Peek at the first non-comment, non-blank token to pick the format.
    std::string line, first_token;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        if (ss >> first_token) break;
    }
    in.clear();
    in.seekg(0);
    if (first_token == "graph" || first_token == "Creator") return load_gml(in);
    return load_edge_list(in);
}

Graph generate_tree(int branching, int depth) {
    if (branching < 1) throw DomainError("generate_tree: branching must be >= 1");
    if (depth < 0) throw DomainError("generate_tree: depth must be >= 0");

    // node count = sum of b^level for level in [0, depth]
    std::int64_t total = 0;
    std::int64_t level_size = 1;
    for (int level = 0; level <= depth; ++level) {
        total += level_size;
        if (total > 50'000'000) throw SizeError("generate_tree: node count exceeds guard");
        level_size *= branching;
    }

    Graph g;
    g.node_count = static_cast<int>(total);
    g.edges.reserve(static_cast<std::size_t>(total - 1));
    std::int64_t first_child = 1;
    for (std::int64_t parent = 0; first_child < total; ++parent) {
        for (int c = 0; c < branching && first_child < total; ++c, ++first_child)
            g.edges.emplace_back(static_cast<int>(parent), static_cast<int>(first_child));
    }
    rebuild_adjacency(g);
    return g;
}

Graph generate_sierpinski(int order) {
    if (order < 0) throw DomainError("generate_sierpinski: order must be >= 0");
    if (order > 12) throw SizeError("generate_sierpinski: order beyond size guard (12)");

    // Corners live on an integer lattice scaled by 2^order, so every midpoint
    // taken during subdivision is exact. Nodes are indexed in first-appearance
    // order of the recursive subdivision.
    using Point = std::pair<std::int64_t, std::int64_t>;
    std::map<Point, int> index;
    GraphBuilder builder;
    auto node_of = [&](Point p) {
        auto it = index.find(p);
        if (it != index.end()) return it->second;
        const int idx = static_cast<int>(index.size());
        index.emplace(p, idx);
        return idx;
    };

    const std::int64_t side = std::int64_t{1} << order;
    struct Triangle {
        Point a, b, c;
        int level;
    };
    std::vector<Triangle> stack{{{0, 0}, {side, 0}, {0, side}, order}};
    std::vector<std::pair<int, int>> edges;
    while (!stack.empty()) {
        Triangle t = stack.back();
        stack.pop_back();
        if (t.level == 0) {
            const int ia = node_of(t.a), ib = node_of(t.b), ic = node_of(t.c);
            edges.emplace_back(ia, ib);
            edges.emplace_back(ib, ic);
            edges.emplace_back(ia, ic);
            continue;
        }
        const Point ab{(t.a.first + t.b.first) / 2, (t.a.second + t.b.second) / 2};
        const Point bc{(t.b.first + t.c.first) / 2, (t.b.second + t.c.second) / 2};
        const Point ac{(t.a.first + t.c.first) / 2, (t.a.second + t.c.second) / 2};
        // Push in reverse so the first corner triangle is processed first.
        stack.push_back({ac, bc, t.c, t.level - 1});
        stack.push_back({ab, t.b, bc, t.level - 1});
        stack.push_back({t.a, ab, ac, t.level - 1});
    }

    Graph g;
    g.node_count = static_cast<int>(index.size());
    std::set<std::pair<int, int>> seen;
    for (auto [u, v] : edges) {
        if (u > v) std::swap(u, v);
        if (seen.insert({u, v}).second) g.edges.emplace_back(u, v);
    }
    rebuild_adjacency(g);
    return g;
}

Graph generate_grid_random(int width, int height, double keep_fraction, std::uint64_t seed) {
    if (width < 2 || height < 2) throw DomainError("generate_grid_random: width and height must be >= 2");
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw DomainError("generate_grid_random: keep_fraction must be in (0,1]");
    if (static_cast<std::int64_t>(width) * height > 50'000'000)
        throw SizeError("generate_grid_random: node count exceeds guard");

    Rng rng(seed);
    const auto at = [width](int r, int c) { return r * width + c; };
    std::vector<std::pair<int, int>> kept;
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (c + 1 < width && rng.next_double() < keep_fraction)
                kept.emplace_back(at(r, c), at(r, c + 1));
            if (r + 1 < height && rng.next_double() < keep_fraction)
                kept.emplace_back(at(r, c), at(r + 1, c));
        }
    }

    // Compact away isolated nodes.
    std::vector<int> remap(static_cast<std::size_t>(width) * height, -1);
    int next = 0;
    for (const auto& [u, v] : kept) {
        if (remap[u] < 0) remap[u] = next++;
        if (remap[v] < 0) remap[v] = next++;
    }

    Graph g;
    g.node_count = next;
    g.edges.reserve(kept.size());
    for (const auto& [u, v] : kept) {
        int a = remap[u], b = remap[v];
        if (a > b) std::swap(a, b);
        g.edges.emplace_back(a, b);
    }
    rebuild_adjacency(g);
    return g;
}

Graph generate_cycle(int n) {
    if (n < 3) throw DomainError("generate_cycle: need at least 3 nodes");
    Graph g;
    g.node_count = n;
    for (int i = 0; i + 1 < n; ++i) g.edges.emplace_back(i, i + 1);
    g.edges.emplace_back(0, n - 1);
    rebuild_adjacency(g);
    return g;
}

std::uint32_t DistanceMatrix::max_finite() const {
    std::uint32_t best = 0;
    for (auto v : d)
        if (v != kUnreachable && v > best) best = v;
    return best;
}

DistanceMatrix apsp_bfs(const Graph& g) {
    DistanceMatrix m;
    m.n = g.node_count;
    m.d.assign(static_cast<std::size_t>(m.n) * m.n, DistanceMatrix::kUnreachable);

    std::vector<int> queue(g.node_count);
    for (int src = 0; src < g.node_count; ++src) {
        auto* row = &m.d[static_cast<std::size_t>(src) * m.n];
        int head = 0, tail = 0;
        row[src] = 0;
        queue[tail++] = src;
        while (head < tail) {
            const int u = queue[head++];
            const std::uint32_t du = row[u];
            for (int v : g.adjacency[u]) {
                if (row[v] == DistanceMatrix::kUnreachable) {
                    row[v] = du + 1;
                    queue[tail++] = v;
                }
            }
        }
    }
    return m;
}

double avg_degree(const Graph& g) {
    if (g.node_count == 0) throw DomainError("avg_degree: empty graph");
    return 2.0 * static_cast<double>(g.edges.size()) / static_cast<double>(g.node_count);
}

std::vector<std::vector<int>> connected_components(const Graph& g) {
    std::vector<std::vector<int>> components;
    std::vector<char> visited(g.node_count, 0);
    std::vector<int> queue;
    for (int start = 0; start < g.node_count; ++start) {
        if (visited[start]) continue;
        std::vector<int> comp;
        queue.clear();
        queue.push_back(start);
        visited[start] = 1;
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const int u = queue[head];
            comp.push_back(u);
            for (int v : g.adjacency[u]) {
                if (!visited[v]) {
                    visited[v] = 1;
                    queue.push_back(v);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        components.push_back(std::move(comp));
    }
    std::stable_sort(components.begin(), components.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    return components;
}

} // namespace fdl
