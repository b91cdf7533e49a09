#ifndef GDBN_EQUIVALENCE_HPP
#define GDBN_EQUIVALENCE_HPP

#include <gdbn/graphs.hpp>

#include <vector>

namespace gdbn {

/// Which equivalence notion brute_force_class enumerates.
///
/// `standard`: same skeleton and same v-structures of the augmented graph,
/// dynamic edges held fixed. With an empty dynamic graph this is plain
/// Markov equivalence of the static DAG.
///
/// `ts`: `standard` plus identical static parent sets for every node that
/// has at least one dynamic parent.
enum class EquivalenceMode { standard, ts };

struct ClassMember {
    StaticDag g;
    DynamicGraph gd;
};

/// Default refusal threshold for exhaustive enumeration.
inline constexpr int kDefaultEnumerationCap = 4;

/// All members of the equivalence class of (g, gd). Members share gd; only
/// the orientation of static edges varies. Throws std::length_error when g
/// has more than `max_nodes` nodes.
std::vector<ClassMember> brute_force_class(const StaticDag& g, const DynamicGraph& gd, EquivalenceMode mode,
                                           int max_nodes = kDefaultEnumerationCap);

/// Orientation summary of a class: an edge is directed iff every member
/// orients it the same way. Dynamic edges are always directed.
Cpdag class_cpdag(const std::vector<ClassMember>& members);

/// Every DAG on n labelled nodes (543 for n = 4). Throws above n = 5.
std::vector<StaticDag> enumerate_dags(int n);

/// Every dynamic graph on n nodes (2^(n(n-1)) without self-loops).
std::vector<DynamicGraph> enumerate_dynamic_graphs(int n, bool allow_self_loops = false);

/// All acyclic orientations of the undirected edges of `pdag` that keep its
/// directed edges and create no v-structure absent from `pdag`'s directed
/// part. The DAGs live on pdag's node set.
std::vector<StaticDag> consistent_extensions(const Cpdag& pdag);

}  // namespace gdbn

#endif  // GDBN_EQUIVALENCE_HPP
