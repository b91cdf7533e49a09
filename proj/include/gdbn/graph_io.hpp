#ifndef GDBN_GRAPH_IO_HPP
#define GDBN_GRAPH_IO_HPP

#include <gdbn/graphs.hpp>

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>

namespace gdbn {

/// Plain-text edge list:
///
///     n=<count>
///     S j i [coefficient]    static edge X_j -> X_i
///     D j i [coefficient]    dynamic edge X_{j,t-1} -> X_{i,t}
///     U j i                  undirected CPDAG edge
///
/// Indices are 1-based. Blank lines and lines starting with '#' are skipped.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, int line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

struct StructureFile {
    StaticDag g;
    DynamicGraph gd;
    std::map<Edge, double> static_coefficients;
    std::map<Edge, double> dynamic_coefficients;
};

StructureFile read_structure(std::istream& in);
StructureFile read_structure_file(const std::string& path);
std::string format_structure(const StaticDag& g, const DynamicGraph& gd,
                             const std::map<Edge, double>* static_coefficients = nullptr,
                             const std::map<Edge, double>* dynamic_coefficients = nullptr);

/// `augmented` selects the 2n-node layout (static block plus lagged block);
/// otherwise the CPDAG is a plain n-node graph and `D` lines are rejected.
Cpdag read_cpdag(std::istream& in, bool augmented);
std::string format_cpdag(const Cpdag& cpdag);

}  // namespace gdbn

#endif  // GDBN_GRAPH_IO_HPP
