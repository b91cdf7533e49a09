#ifndef GDBN_CPDAG_HPP
#define GDBN_CPDAG_HPP

#include <gdbn/graphs.hpp>
#include <gdbn/rng.hpp>

#include <set>
#include <tuple>
#include <utility>

namespace gdbn {

/// Collider `left -> child <- right` with non-adjacent parents, `left < right`.
struct VStructure {
    int left = 0;
    int child = 0;
    int right = 0;

    auto operator<=>(const VStructure&) const = default;
};

/// Throws std::out_of_range for indices outside [0, n).
bool is_acyclic(int n, const EdgeList& edges);

std::set<NodePair> skeleton(const StaticDag& dag);
std::set<VStructure> v_structures(const StaticDag& dag);

/// Equivalence-class representative of a DAG: compelled edges directed,
/// reversible edges undirected. Uses edge ordering plus compelled/reversible
/// label propagation over a topological sort.
Cpdag dag_to_cpdag(const StaticDag& dag);

/// CPDAG of the sub-class of DAGs that contain every edge of `fixed` in the
/// given orientation. Throws std::invalid_argument if a fixed edge is not an
/// edge of `dag`.
Cpdag dag_to_cpdag_constrained(const StaticDag& dag, const EdgeList& fixed);

/// Orients undirected edges of `pdag` in place with the four Meek rules until
/// no rule applies.
void apply_meek_rules(Cpdag& pdag);

/// Static CPDAG of g merged with the (always compelled) dynamic edges of gd,
/// laid out over the 2n augmented nodes.
Cpdag mbge_cpdag(const StaticDag& g, const DynamicGraph& gd);

/// CPDAG under the augmented-Gaussian model: attach two pseudo parents to
/// every lagged node, take the CPDAG of that enlarged DAG and drop the pseudo
/// nodes. Every dynamic edge comes out compelled.
Cpdag ebge_cpdag(const StaticDag& g, const DynamicGraph& gd);

/// CPDAG of the plain augmented DAG with dynamic edges forced forward
/// afterwards. Kept to demonstrate why that shortcut is wrong.
Cpdag naive_augmented_cpdag(const StaticDag& g, const DynamicGraph& gd);

/// Structural Hamming distance: number of node pairs whose status (absent,
/// undirected, directed one way or the other) differs.
int shd(const Cpdag& a, const Cpdag& b);

/// Uniform node permutation used as topological order, then `num_edges`
/// pairs drawn without replacement and oriented along it.
StaticDag random_dag(int n, int num_edges, Rng& rng);

/// Keeps `num_static` randomly chosen edges of `dag` as intra-slice edges and
/// turns the rest into lagged edges with the same endpoints.
std::pair<StaticDag, DynamicGraph> split_static_dynamic(const StaticDag& dag, int num_static, Rng& rng);

}  // namespace gdbn

#endif  // GDBN_CPDAG_HPP
