#include <gdbn/cpdag.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gdbn {

bool is_acyclic(int n, const EdgeList& edges) {
    if (n < 0) throw std::invalid_argument("is_acyclic: negative node count");
    std::vector<std::vector<int>> out(n);
    std::vector<int> indeg(n, 0);
    for (const auto& e : edges) {
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw std::out_of_range("is_acyclic: node index out of range");
        out[e.from].push_back(e.to);
        ++indeg[e.to];
    }
    std::vector<int> ready;
    for (int v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push_back(v);
    int visited = 0;
    while (!ready.empty()) {
        int v = ready.back();
        ready.pop_back();
        ++visited;
        for (int w : out[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    return visited == n;
}

std::set<NodePair> skeleton(const StaticDag& dag) {
    std::set<NodePair> out;
    for (const auto& e : dag.edges()) out.emplace(std::min(e.from, e.to), std::max(e.from, e.to));
    return out;
}

std::set<VStructure> v_structures(const StaticDag& dag) {
    std::set<VStructure> out;
    for (int child = 0; child < dag.num_nodes(); ++child) {
        const auto& pa = dag.parents(child);
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b)
                if (!dag.adjacent(pa[a], pa[b])) out.insert({pa[a], child, pa[b]});
    }
    return out;
}

Cpdag dag_to_cpdag(const StaticDag& dag) {
    const int n = dag.num_nodes();
    const auto topo = dag.topological_order();
    std::vector<int> pos(n);
    for (int k = 0; k < n; ++k) pos[topo[k]] = k;

    // Edges ordered by child (lowest first), then by parent (highest first).
    EdgeList order = dag.edges();
    std::sort(order.begin(), order.end(), [&](const Edge& a, const Edge& b) {
        if (pos[a.to] != pos[b.to]) return pos[a.to] < pos[b.to];
        return pos[a.from] > pos[b.from];
    });

    enum Label : char { unknown, compelled, reversible };
    std::vector<char> label(static_cast<std::size_t>(n) * n, unknown);
    auto lab = [&](int from, int to) -> char& { return label[static_cast<std::size_t>(from) * n + to]; };
    auto label_into = [&](int y, Label l, bool only_unknown) {
        for (int p : dag.parents(y))
            if (!only_unknown || lab(p, y) == unknown) lab(p, y) = l;
    };

    for (const auto& e : order) {
        const int x = e.from, y = e.to;
        if (lab(x, y) != unknown) continue;
        bool done = false;
        for (int w : dag.parents(x)) {
            if (lab(w, x) != compelled) continue;
            if (!dag.has_edge(w, y)) {
                lab(x, y) = compelled;
                label_into(y, compelled, false);
                done = true;
                break;
            }
            lab(w, y) = compelled;
        }
        if (done) continue;
        bool other_parent = false;
        for (int z : dag.parents(y))
            if (z != x && !dag.has_edge(z, x)) other_parent = true;
        const Label l = other_parent ? compelled : reversible;
        lab(x, y) = l;
        label_into(y, l, true);
    }

    Cpdag out(n);
    for (const auto& e : order) {
        if (lab(e.from, e.to) == compelled)
            out.add_directed(e.from, e.to);
        else
            out.add_undirected(e.from, e.to);
    }
    return out;
}

void apply_meek_rules(Cpdag& g) {
    const int n = g.num_nodes();
    auto directed = [&](int a, int b) { return g.has_directed(a, b); };
    auto undirected = [&](int a, int b) { return g.has_undirected(a, b); };

    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                if (a == b || !undirected(a, b)) continue;
                bool orient = false;
                for (int c = 0; c < n && !orient; ++c) {
                    if (c == a || c == b) continue;
                    // R1: c -> a - b, c and b non-adjacent.
                    if (directed(c, a) && !g.adjacent(c, b)) orient = true;
                    // R2: a -> c -> b with a - b.
                    else if (directed(a, c) && directed(c, b))
                        orient = true;
                }
                // R3: a - c -> b and a - d -> b, c and d non-adjacent.
                for (int c = 0; c < n && !orient; ++c) {
                    if (c == a || c == b || !undirected(a, c) || !directed(c, b)) continue;
                    for (int d = c + 1; d < n && !orient; ++d) {
                        if (d == a || d == b || !undirected(a, d) || !directed(d, b)) continue;
                        if (!g.adjacent(c, d)) orient = true;
                    }
                }
                // R4: a - c -> d -> b, c and b non-adjacent, a and d adjacent.
                for (int c = 0; c < n && !orient; ++c) {
                    if (c == a || c == b || !undirected(a, c) || g.adjacent(c, b)) continue;
                    for (int d = 0; d < n && !orient; ++d) {
                        if (d == a || d == b || d == c) continue;
                        if (directed(c, d) && directed(d, b) && g.adjacent(a, d)) orient = true;
                    }
                }
                if (orient) {
                    g.orient(a, b);
                    changed = true;
                }
            }
        }
    }
}

Cpdag dag_to_cpdag_constrained(const StaticDag& dag, const EdgeList& fixed) {
    for (const auto& e : fixed)
        if (!dag.has_edge(e.from, e.to))
            throw std::invalid_argument("dag_to_cpdag_constrained: fixed edge " + std::to_string(e.from + 1) + "->" +
                                        std::to_string(e.to + 1) + " is not in the DAG");
    Cpdag out = dag_to_cpdag(dag);
    bool added = false;
    for (const auto& e : fixed) {
        if (out.has_undirected(e.from, e.to)) {
            out.orient(e.from, e.to);
            added = true;
        }
    }
    if (added) apply_meek_rules(out);
    return out;
}

Cpdag mbge_cpdag(const StaticDag& g, const DynamicGraph& gd) {
    const int n = g.num_nodes();
    if (gd.num_nodes() != n) throw std::invalid_argument("mbge_cpdag: static and dynamic node counts differ");
    const Cpdag static_part = dag_to_cpdag(g);
    Cpdag out(2 * n, n);
    for (const auto& e : static_part.directed_edges()) out.add_directed(e.from, e.to);
    for (const auto& [a, b] : static_part.undirected_edges()) out.add_undirected(a, b);
    for (const auto& e : gd.edges()) out.add_directed(n + e.from, e.to);
    return out;
}

Cpdag ebge_cpdag(const StaticDag& g, const DynamicGraph& gd) {
    const EnlargedGraph enlarged = build_enlarged(build_augmented(g, gd));
    const int n = g.num_nodes();
    return dag_to_cpdag(enlarged.dag).induced_prefix(2 * n, n);
}

Cpdag naive_augmented_cpdag(const StaticDag& g, const DynamicGraph& gd) {
    const int n = g.num_nodes();
    const AugmentedGraph aug = build_augmented(g, gd);
    Cpdag full = dag_to_cpdag(aug.dag);
    Cpdag out(2 * n, n);
    for (const auto& e : full.directed_edges()) out.add_directed(e.from, e.to);
    for (const auto& [a, b] : full.undirected_edges()) out.add_undirected(a, b);
    for (const auto& e : gd.edges()) out.add_directed(n + e.from, e.to);
    return out;
}

int shd(const Cpdag& a, const Cpdag& b) {
    if (a.num_nodes() != b.num_nodes()) throw std::invalid_argument("shd: node counts differ");
    int dist = 0;
    for (int u = 0; u < a.num_nodes(); ++u)
        for (int v = u + 1; v < a.num_nodes(); ++v)
            if (a.status(u, v) != b.status(u, v)) ++dist;
    return dist;
}

StaticDag random_dag(int n, int num_edges, Rng& rng) {
    if (n < 0) throw std::invalid_argument("random_dag: negative node count");
    const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
    if (num_edges < 0 || num_edges > max_edges)
        throw std::invalid_argument("random_dag: edge count " + std::to_string(num_edges) + " exceeds " +
                                    std::to_string(max_edges));
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);

    std::vector<NodePair> slots;
    slots.reserve(static_cast<std::size_t>(max_edges));
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) slots.emplace_back(a, b);
    // Partial Fisher-Yates: first num_edges slots are a uniform subset.
    for (int k = 0; k < num_edges; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, slots.size() - 1);
        std::swap(slots[k], slots[pick(rng)]);
    }
    StaticDag dag(n);
    for (int k = 0; k < num_edges; ++k) dag.add_edge(perm[slots[k].first], perm[slots[k].second]);
    return dag;
}

std::pair<StaticDag, DynamicGraph> split_static_dynamic(const StaticDag& dag, int num_static, Rng& rng) {
    EdgeList edges = dag.edges();
    if (num_static < 0 || num_static > static_cast<int>(edges.size()))
        throw std::invalid_argument("split_static_dynamic: static edge count out of range");
    std::shuffle(edges.begin(), edges.end(), rng);
    const int n = dag.num_nodes();
    StaticDag g(n);
    DynamicGraph gd(n);
    for (std::size_t k = 0; k < edges.size(); ++k) {
        if (static_cast<int>(k) < num_static)
            g.add_edge(edges[k].from, edges[k].to);
        else
            gd.add_edge(edges[k].from, edges[k].to);
    }
    return {std::move(g), std::move(gd)};
}

}  // namespace gdbn
