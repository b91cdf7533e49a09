#ifndef GDBN_GRAPHS_HPP
#define GDBN_GRAPHS_HPP

#include <compare>
#include <cstdint>
#include <set>
#include <utility>
#include <vector>

namespace gdbn {

/// Ordered node pair `from -> to`. Indices are 0-based everywhere in the
/// library; the text formats use 1-based indices.
struct Edge {
    int from = 0;
    int to = 0;

    auto operator<=>(const Edge&) const = default;
};

using EdgeList = std::vector<Edge>;
using EdgeSet = std::set<Edge>;
/// Unordered pair stored with `first < second`.
using NodePair = std::pair<int, int>;

/// Directed acyclic graph over nodes 0..n-1.
///
/// Every mutation keeps the graph acyclic and free of self edges; an
/// operation that would violate this throws std::invalid_argument and leaves
/// the graph untouched. Parent lists are kept sorted.
class StaticDag {
public:
    StaticDag() = default;
    explicit StaticDag(int n);
    StaticDag(int n, const EdgeList& edges);

    int num_nodes() const { return n_; }
    std::size_t num_edges() const { return num_edges_; }

    bool has_edge(int from, int to) const;
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    const std::vector<int>& parents(int node) const;
    std::vector<int> children(int node) const;
    EdgeList edges() const;

    void add_edge(int from, int to);
    void remove_edge(int from, int to);
    /// Replaces `from -> to` with `to -> from`.
    void reverse_edge(int from, int to);

    /// Whether adding `from -> to` keeps the graph acyclic.
    bool can_add_edge(int from, int to) const;
    std::vector<int> topological_order() const;
    /// Bit i of entry v is set iff i is reachable from v through at least one edge.
    std::vector<std::uint64_t> reachability() const;

    bool operator==(const StaticDag& other) const { return n_ == other.n_ && adj_ == other.adj_; }

private:
    void check_node(int v) const;
    bool reaches(int from, int to) const;

    int n_ = 0;
    std::size_t num_edges_ = 0;
    std::vector<char> adj_;
    std::vector<std::vector<int>> parents_;
};

/// Inter-slice graph: `j => i` means X_{j,t-1} -> X_{i,t}. No acyclicity
/// constraint applies.
class DynamicGraph {
public:
    DynamicGraph() = default;
    explicit DynamicGraph(int n, bool allow_self_loops = false);
    DynamicGraph(int n, const EdgeList& edges, bool allow_self_loops = false);

    int num_nodes() const { return n_; }
    std::size_t num_edges() const { return num_edges_; }
    bool allow_self_loops() const { return allow_self_loops_; }

    bool has_edge(int from, int to) const;
    const std::vector<int>& parents(int node) const;
    EdgeList edges() const;

    void add_edge(int from, int to);
    void remove_edge(int from, int to);

    bool operator==(const DynamicGraph& other) const { return n_ == other.n_ && adj_ == other.adj_; }

private:
    void check_node(int v) const;

    int n_ = 0;
    bool allow_self_loops_ = false;
    std::size_t num_edges_ = 0;
    std::vector<char> adj_;
    std::vector<std::vector<int>> parents_;
};

/// DAG over 2n nodes: Z_0..Z_{n-1} are the current slice and Z_n..Z_{2n-1}
/// the lagged copies. Dynamic edge `j => i` becomes Z_{n+j} -> Z_i.
struct AugmentedGraph {
    int slice_size = 0;
    StaticDag dag;

    int lagged(int node) const { return slice_size + node; }
    bool is_lagged(int z) const { return z >= slice_size; }
};

AugmentedGraph build_augmented(const StaticDag& g, const DynamicGraph& gd);

/// Augmented graph plus two pseudo parents per lagged node. The pseudo
/// parents of lagged node n+j sit at indices 2n+2j and 2n+2j+1.
struct EnlargedGraph {
    int slice_size = 0;
    StaticDag dag;

    int num_core_nodes() const { return 2 * slice_size; }
    int pseudo_parent(int node, int which) const { return 2 * slice_size + 2 * node + which; }
};

EnlargedGraph build_enlarged(const AugmentedGraph& aug);

/// Completed partially directed graph. `slice_size` is 0 for a plain static
/// CPDAG and n for a CPDAG over the 2n augmented nodes.
class Cpdag {
public:
    enum class PairStatus : std::uint8_t { absent, forward, backward, undirected };

    Cpdag() = default;
    explicit Cpdag(int num_nodes, int slice_size = 0);

    int num_nodes() const { return n_; }
    int slice_size() const { return slice_size_; }

    void add_directed(int from, int to);
    void add_undirected(int a, int b);
    void remove(int a, int b);
    void orient(int from, int to);

    bool has_directed(int from, int to) const { return at(from, to) == 1; }
    bool has_undirected(int a, int b) const { return at(a, b) == 2; }
    bool adjacent(int a, int b) const { return at(a, b) != 0 || at(b, a) != 0; }
    /// Status of the pair (a, b) seen from a, i.e. `forward` means a -> b.
    PairStatus status(int a, int b) const;

    EdgeList directed_edges() const;
    std::vector<NodePair> undirected_edges() const;
    /// The subgraph on the first `keep` nodes.
    Cpdag induced_prefix(int keep, int slice_size) const;

    bool operator==(const Cpdag& other) const { return n_ == other.n_ && cell_ == other.cell_; }

private:
    char at(int a, int b) const;
    void check_node(int v) const;

    int n_ = 0;
    int slice_size_ = 0;
    // 0 = no mark, 1 = directed a -> b, 2 = undirected (stored symmetric).
    std::vector<char> cell_;
};

}  // namespace gdbn

#endif  // GDBN_GRAPHS_HPP
