#include <gdbn/cpdag.hpp>
#include <gdbn/equivalence.hpp>

#include <stdexcept>
#include <string>

namespace gdbn {

namespace {

bool pinned_parents_match(const StaticDag& a, const StaticDag& b, const DynamicGraph& gd) {
    for (int i = 0; i < a.num_nodes(); ++i)
        if (!gd.parents(i).empty() && a.parents(i) != b.parents(i)) return false;
    return true;
}

}  // namespace

std::vector<ClassMember> brute_force_class(const StaticDag& g, const DynamicGraph& gd, EquivalenceMode mode,
                                           int max_nodes) {
    const int n = g.num_nodes();
    if (gd.num_nodes() != n) throw std::invalid_argument("brute_force_class: node counts differ");
    if (n > max_nodes)
        throw std::length_error("brute_force_class: " + std::to_string(n) + " nodes exceeds the enumeration cap of " +
                                std::to_string(max_nodes));

    const AugmentedGraph ref = build_augmented(g, gd);
    const auto ref_vs = v_structures(ref.dag);
    const EdgeList static_edges = g.edges();
    const std::size_t k = static_edges.size();

    std::vector<ClassMember> members;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        EdgeList oriented;
        oriented.reserve(k);
        for (std::size_t e = 0; e < k; ++e) {
            const auto& s = static_edges[e];
            oriented.push_back((mask >> e) & 1U ? Edge{s.to, s.from} : s);
        }
        if (!is_acyclic(n, oriented)) continue;
        StaticDag candidate(n, oriented);
        if (mode == EquivalenceMode::ts && !pinned_parents_match(candidate, g, gd)) continue;
        if (v_structures(build_augmented(candidate, gd).dag) != ref_vs) continue;
        members.push_back({std::move(candidate), gd});
    }
    return members;
}

Cpdag class_cpdag(const std::vector<ClassMember>& members) {
    if (members.empty()) throw std::invalid_argument("class_cpdag: empty class");
    const int n = members.front().g.num_nodes();
    Cpdag out(2 * n, n);
    for (const auto& e : members.front().g.edges()) {
        bool flips = false;
        for (const auto& m : members)
            if (!m.g.has_edge(e.from, e.to)) flips = true;
        if (flips)
            out.add_undirected(e.from, e.to);
        else
            out.add_directed(e.from, e.to);
    }
    for (const auto& e : members.front().gd.edges()) out.add_directed(n + e.from, e.to);
    return out;
}

std::vector<StaticDag> enumerate_dags(int n) {
    if (n < 0 || n > 5) throw std::length_error("enumerate_dags: n must be in [0, 5]");
    std::vector<NodePair> pairs;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    // Each pair is absent, a -> b, or b -> a.
    std::uint64_t total = 1;
    for (std::size_t p = 0; p < pairs.size(); ++p) total *= 3;
    std::vector<StaticDag> out;
    for (std::uint64_t code = 0; code < total; ++code) {
        EdgeList edges;
        std::uint64_t c = code;
        for (const auto& [a, b] : pairs) {
            const auto digit = c % 3;
            c /= 3;
            if (digit == 1) edges.push_back({a, b});
            if (digit == 2) edges.push_back({b, a});
        }
        if (is_acyclic(n, edges)) out.emplace_back(n, edges);
    }
    return out;
}

std::vector<DynamicGraph> enumerate_dynamic_graphs(int n, bool allow_self_loops) {
    EdgeList slots;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j || allow_self_loops) slots.push_back({j, i});
    if (slots.size() > 20) throw std::length_error("enumerate_dynamic_graphs: too many candidate edges");
    std::vector<DynamicGraph> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << slots.size()); ++mask) {
        DynamicGraph gd(n, allow_self_loops);
        for (std::size_t e = 0; e < slots.size(); ++e)
            if ((mask >> e) & 1U) gd.add_edge(slots[e].from, slots[e].to);
        out.push_back(std::move(gd));
    }
    return out;
}

std::vector<StaticDag> consistent_extensions(const Cpdag& pdag) {
    const int n = pdag.num_nodes();
    const EdgeList fixed = pdag.directed_edges();
    const auto free_edges = pdag.undirected_edges();
    const StaticDag directed_part(n, fixed);
    std::set<VStructure> ref_vs;
    // v-structures of the pdag: colliders formed by directed edges only.
    for (int child = 0; child < n; ++child) {
        const auto& pa = directed_part.parents(child);
        for (std::size_t a = 0; a < pa.size(); ++a)
            for (std::size_t b = a + 1; b < pa.size(); ++b)
                if (!pdag.adjacent(pa[a], pa[b])) ref_vs.insert({pa[a], child, pa[b]});
    }
    std::vector<StaticDag> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free_edges.size()); ++mask) {
        EdgeList edges = fixed;
        for (std::size_t e = 0; e < free_edges.size(); ++e) {
            const auto& [a, b] = free_edges[e];
            edges.push_back((mask >> e) & 1U ? Edge{b, a} : Edge{a, b});
        }
        if (!is_acyclic(n, edges)) continue;
        StaticDag dag(n, edges);
        if (v_structures(dag) == ref_vs) out.push_back(std::move(dag));
    }
    return out;
}

}  // namespace gdbn
