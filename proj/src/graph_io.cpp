#include <gdbn/graph_io.hpp>

#include <charconv>
#include <fstream>
#include <sstream>
#include <vector>

namespace gdbn {

namespace {

struct EdgeLine {
    char kind = 0;
    int from = 0;
    int to = 0;
    bool has_value = false;
    double value = 0.0;
};

struct ParsedFile {
    int n = -1;
    std::vector<std::pair<EdgeLine, int>> lines;  // with source line numbers
};

int parse_index(const std::string& tok, int n, int line) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) throw FormatError("bad node index '" + tok + "'", line);
    if (v < 1 || v > n) throw FormatError("node index " + tok + " outside 1.." + std::to_string(n), line);
    return v - 1;
}

ParsedFile parse(std::istream& in) {
    ParsedFile out;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        auto first = raw.find_first_not_of(" \t");
        if (first == std::string::npos || raw[first] == '#') continue;
        if (out.n < 0) {
            if (raw.compare(first, 2, "n=") != 0) throw FormatError("expected header 'n=<count>'", line);
            const std::string num = raw.substr(first + 2);
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), out.n);
            if (ec != std::errc() || out.n < 0) throw FormatError("bad node count '" + num + "'", line);
            continue;
        }
        std::istringstream ss(raw);
        std::string kind, a, b, c, extra;
        ss >> kind >> a >> b;
        if (kind.size() != 1 || (kind[0] != 'S' && kind[0] != 'D' && kind[0] != 'U') || b.empty())
            throw FormatError("expected 'S|D|U j i'", line);
        EdgeLine e;
        e.kind = kind[0];
        e.from = parse_index(a, out.n, line);
        e.to = parse_index(b, out.n, line);
        if (ss >> c) {
            auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), e.value);
            if (ec != std::errc() || ptr != c.data() + c.size()) throw FormatError("bad coefficient '" + c + "'", line);
            e.has_value = true;
        }
        if (ss >> extra) throw FormatError("trailing tokens", line);
        out.lines.emplace_back(e, line);
    }
    if (out.n < 0) throw FormatError("missing header 'n=<count>'", line + 1);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

StructureFile read_structure(std::istream& in) {
    const ParsedFile parsed = parse(in);
    bool self_loops = false;
    for (const auto& [e, line] : parsed.lines)
        if (e.kind == 'D' && e.from == e.to) self_loops = true;
    StructureFile out{StaticDag(parsed.n), DynamicGraph(parsed.n, self_loops), {}, {}};
    for (const auto& [e, line] : parsed.lines) {
        try {
            if (e.kind == 'U') throw FormatError("undirected edge in a structure file", line);
            if (e.kind == 'S') {
                out.g.add_edge(e.from, e.to);
                if (e.has_value) out.static_coefficients[{e.from, e.to}] = e.value;
            } else {
                out.gd.add_edge(e.from, e.to);
                if (e.has_value) out.dynamic_coefficients[{e.from, e.to}] = e.value;
            }
        } catch (const std::invalid_argument& err) {
            throw FormatError(err.what(), line);
        }
    }
    return out;
}

StructureFile read_structure_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open structure file '" + path + "'");
    return read_structure(in);
}

std::string format_structure(const StaticDag& g, const DynamicGraph& gd, const std::map<Edge, double>* static_coefficients,
                             const std::map<Edge, double>* dynamic_coefficients) {
    std::ostringstream out;
    out << "n=" << g.num_nodes() << '\n';
    for (const auto& e : g.edges()) {
        out << "S " << e.from + 1 << ' ' << e.to + 1;
        if (static_coefficients) out << ' ' << format_double(static_coefficients->at(e));
        out << '\n';
    }
    for (const auto& e : gd.edges()) {
        out << "D " << e.from + 1 << ' ' << e.to + 1;
        if (dynamic_coefficients) out << ' ' << format_double(dynamic_coefficients->at(e));
        out << '\n';
    }
    return out.str();
}

Cpdag read_cpdag(std::istream& in, bool augmented) {
    const ParsedFile parsed = parse(in);
    const int n = parsed.n;
    Cpdag out = augmented ? Cpdag(2 * n, n) : Cpdag(n);
    for (const auto& [e, line] : parsed.lines) {
        if (e.has_value) throw FormatError("coefficient on a CPDAG edge", line);
        if (e.from == e.to && e.kind != 'D') throw FormatError("self edge", line);
        switch (e.kind) {
            case 'S': out.add_directed(e.from, e.to); break;
            case 'U': out.add_undirected(e.from, e.to); break;
            case 'D':
                if (!augmented) throw FormatError("dynamic edge in a static CPDAG", line);
                out.add_directed(n + e.from, e.to);
                break;
        }
    }
    return out;
}

std::string format_cpdag(const Cpdag& cpdag) {
    const int slice = cpdag.slice_size();
    const int n = slice == 0 ? cpdag.num_nodes() : slice;
    std::ostringstream out;
    out << "n=" << n << '\n';
    std::ostringstream dyn;
    for (const auto& e : cpdag.directed_edges()) {
        if (e.from < n && e.to < n)
            out << "S " << e.from + 1 << ' ' << e.to + 1 << '\n';
        else if (e.from >= n && e.to < n)
            dyn << "D " << e.from - n + 1 << ' ' << e.to + 1 << '\n';
        else
            throw std::invalid_argument("format_cpdag: edge into a lagged node cannot be written");
    }
    for (const auto& [a, b] : cpdag.undirected_edges()) {
        if (a >= n || b >= n) throw std::invalid_argument("format_cpdag: undirected edge touching a lagged node");
        out << "U " << a + 1 << ' ' << b + 1 << '\n';
    }
    out << dyn.str();
    return out.str();
}

}  // namespace gdbn
