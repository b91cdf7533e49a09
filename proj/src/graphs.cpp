#include <gdbn/graphs.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gdbn {

namespace {

void insert_sorted(std::vector<int>& v, int x) {
    v.insert(std::lower_bound(v.begin(), v.end(), x), x);
}

void erase_sorted(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
}

}  // namespace

// ---------------------------------------------------------------------------
// StaticDag

StaticDag::StaticDag(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("StaticDag: negative node count");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    parents_.resize(n);
}

StaticDag::StaticDag(int n, const EdgeList& edges) : StaticDag(n) {
    for (const auto& e : edges) add_edge(e.from, e.to);
}

void StaticDag::check_node(int v) const {
    if (v < 0 || v >= n_)
        throw std::out_of_range("StaticDag: node index " + std::to_string(v) + " out of range");
}

bool StaticDag::has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    return adj_[static_cast<std::size_t>(from) * n_ + to] != 0;
}

const std::vector<int>& StaticDag::parents(int node) const {
    check_node(node);
    return parents_[node];
}

std::vector<int> StaticDag::children(int node) const {
    check_node(node);
    std::vector<int> out;
    for (int j = 0; j < n_; ++j)
        if (adj_[static_cast<std::size_t>(node) * n_ + j]) out.push_back(j);
    return out;
}

EdgeList StaticDag::edges() const {
    EdgeList out;
    out.reserve(num_edges_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (adj_[static_cast<std::size_t>(i) * n_ + j]) out.push_back({i, j});
    return out;
}

bool StaticDag::reaches(int from, int to) const {
    if (from == to) return true;
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w = 0; w < n_; ++w) {
            if (!adj_[static_cast<std::size_t>(v) * n_ + w] || seen[w]) continue;
            if (w == to) return true;
            seen[w] = 1;
            stack.push_back(w);
        }
    }
    return false;
}

bool StaticDag::can_add_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    if (from == to || has_edge(from, to)) return false;
    return !reaches(to, from);
}

void StaticDag::add_edge(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to) throw std::invalid_argument("StaticDag: self edge");
    if (has_edge(from, to)) return;
    if (reaches(to, from)) throw std::invalid_argument("StaticDag: edge would create a cycle");
    adj_[static_cast<std::size_t>(from) * n_ + to] = 1;
    insert_sorted(parents_[to], from);
    ++num_edges_;
}

void StaticDag::remove_edge(int from, int to) {
    if (!has_edge(from, to)) throw std::invalid_argument("StaticDag: removing absent edge");
    adj_[static_cast<std::size_t>(from) * n_ + to] = 0;
    erase_sorted(parents_[to], from);
    --num_edges_;
}

void StaticDag::reverse_edge(int from, int to) {
    remove_edge(from, to);
    if (reaches(from, to)) {
        add_edge(from, to);
        throw std::invalid_argument("StaticDag: reversal would create a cycle");
    }
    add_edge(to, from);
}

std::vector<int> StaticDag::topological_order() const {
    std::vector<int> indeg(n_);
    for (int i = 0; i < n_; ++i) indeg[i] = static_cast<int>(parents_[i].size());
    std::vector<int> order;
    order.reserve(n_);
    // Smallest available index first, so the order is deterministic.
    std::set<int> ready;
    for (int i = 0; i < n_; ++i)
        if (indeg[i] == 0) ready.insert(i);
    while (!ready.empty()) {
        int v = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(v);
        for (int w = 0; w < n_; ++w)
            if (adj_[static_cast<std::size_t>(v) * n_ + w] && --indeg[w] == 0) ready.insert(w);
    }
    return order;
}

std::vector<std::uint64_t> StaticDag::reachability() const {
    if (n_ > 64) throw std::length_error("StaticDag::reachability supports at most 64 nodes");
    std::vector<std::uint64_t> reach(n_, 0);
    auto order = topological_order();
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int v = *it;
        for (int w = 0; w < n_; ++w)
            if (adj_[static_cast<std::size_t>(v) * n_ + w]) reach[v] |= (std::uint64_t{1} << w) | reach[w];
    }
    return reach;
}

// ---------------------------------------------------------------------------
// DynamicGraph

DynamicGraph::DynamicGraph(int n, bool allow_self_loops) : n_(n), allow_self_loops_(allow_self_loops) {
    if (n < 0) throw std::invalid_argument("DynamicGraph: negative node count");
    adj_.assign(static_cast<std::size_t>(n) * n, 0);
    parents_.resize(n);
}

DynamicGraph::DynamicGraph(int n, const EdgeList& edges, bool allow_self_loops)
    : DynamicGraph(n, allow_self_loops) {
    for (const auto& e : edges) add_edge(e.from, e.to);
}

void DynamicGraph::check_node(int v) const {
    if (v < 0 || v >= n_)
        throw std::out_of_range("DynamicGraph: node index " + std::to_string(v) + " out of range");
}

bool DynamicGraph::has_edge(int from, int to) const {
    check_node(from);
    check_node(to);
    return adj_[static_cast<std::size_t>(from) * n_ + to] != 0;
}

const std::vector<int>& DynamicGraph::parents(int node) const {
    check_node(node);
    return parents_[node];
}

EdgeList DynamicGraph::edges() const {
    EdgeList out;
    out.reserve(num_edges_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            if (adj_[static_cast<std::size_t>(i) * n_ + j]) out.push_back({i, j});
    return out;
}

void DynamicGraph::add_edge(int from, int to) {
    check_node(from);
    check_node(to);
    if (from == to && !allow_self_loops_) throw std::invalid_argument("DynamicGraph: self-loops are disabled");
    if (has_edge(from, to)) return;
    adj_[static_cast<std::size_t>(from) * n_ + to] = 1;
    insert_sorted(parents_[to], from);
    ++num_edges_;
}

void DynamicGraph::remove_edge(int from, int to) {
    if (!has_edge(from, to)) throw std::invalid_argument("DynamicGraph: removing absent edge");
    adj_[static_cast<std::size_t>(from) * n_ + to] = 0;
    erase_sorted(parents_[to], from);
    --num_edges_;
}

// ---------------------------------------------------------------------------
// Augmented / enlarged graphs

AugmentedGraph build_augmented(const StaticDag& g, const DynamicGraph& gd) {
    const int n = g.num_nodes();
    if (gd.num_nodes() != n) throw std::invalid_argument("build_augmented: static and dynamic node counts differ");
    AugmentedGraph aug{n, StaticDag(2 * n)};
    for (const auto& e : g.edges()) aug.dag.add_edge(e.from, e.to);
    for (const auto& e : gd.edges()) aug.dag.add_edge(n + e.from, e.to);
    return aug;
}

EnlargedGraph build_enlarged(const AugmentedGraph& aug) {
    const int n = aug.slice_size;
    EnlargedGraph out{n, StaticDag(4 * n)};
    for (const auto& e : aug.dag.edges()) out.dag.add_edge(e.from, e.to);
    for (int j = 0; j < n; ++j) {
        out.dag.add_edge(out.pseudo_parent(j, 0), n + j);
        out.dag.add_edge(out.pseudo_parent(j, 1), n + j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cpdag

Cpdag::Cpdag(int num_nodes, int slice_size) : n_(num_nodes), slice_size_(slice_size) {
    if (num_nodes < 0) throw std::invalid_argument("Cpdag: negative node count");
    if (slice_size != 0 && 2 * slice_size != num_nodes)
        throw std::invalid_argument("Cpdag: slice size must be half the node count");
    cell_.assign(static_cast<std::size_t>(num_nodes) * num_nodes, 0);
}

void Cpdag::check_node(int v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("Cpdag: node index " + std::to_string(v) + " out of range");
}

char Cpdag::at(int a, int b) const {
    check_node(a);
    check_node(b);
    return cell_[static_cast<std::size_t>(a) * n_ + b];
}

void Cpdag::remove(int a, int b) {
    check_node(a);
    check_node(b);
    cell_[static_cast<std::size_t>(a) * n_ + b] = 0;
    cell_[static_cast<std::size_t>(b) * n_ + a] = 0;
}

void Cpdag::add_directed(int from, int to) {
    if (from == to) throw std::invalid_argument("Cpdag: self edge");
    remove(from, to);
    cell_[static_cast<std::size_t>(from) * n_ + to] = 1;
}

void Cpdag::add_undirected(int a, int b) {
    if (a == b) throw std::invalid_argument("Cpdag: self edge");
    remove(a, b);
    cell_[static_cast<std::size_t>(a) * n_ + b] = 2;
    cell_[static_cast<std::size_t>(b) * n_ + a] = 2;
}

void Cpdag::orient(int from, int to) {
    if (!adjacent(from, to)) throw std::invalid_argument("Cpdag: orienting a non-adjacent pair");
    add_directed(from, to);
}

Cpdag::PairStatus Cpdag::status(int a, int b) const {
    char ab = at(a, b), ba = at(b, a);
    if (ab == 2) return PairStatus::undirected;
    if (ab == 1) return PairStatus::forward;
    if (ba == 1) return PairStatus::backward;
    return PairStatus::absent;
}

EdgeList Cpdag::directed_edges() const {
    EdgeList out;
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            if (cell_[static_cast<std::size_t>(a) * n_ + b] == 1) out.push_back({a, b});
    return out;
}

std::vector<NodePair> Cpdag::undirected_edges() const {
    std::vector<NodePair> out;
    for (int a = 0; a < n_; ++a)
        for (int b = a + 1; b < n_; ++b)
            if (cell_[static_cast<std::size_t>(a) * n_ + b] == 2) out.emplace_back(a, b);
    return out;
}

Cpdag Cpdag::induced_prefix(int keep, int slice_size) const {
    if (keep < 0 || keep > n_) throw std::out_of_range("Cpdag::induced_prefix: bad size");
    Cpdag out(keep, slice_size);
    for (int a = 0; a < keep; ++a)
        for (int b = 0; b < keep; ++b)
            out.cell_[static_cast<std::size_t>(a) * keep + b] = cell_[static_cast<std::size_t>(a) * n_ + b];
    return out;
}

}  // namespace gdbn
