#include <gdbn/report.hpp>

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

namespace gdbn {

namespace {

const char* const kMoveKeys[kNumMoveTypes] = {"static_add", "static_delete", "static_reverse", "dynamic_add",
                                              "dynamic_delete"};

Json trace_to_json(const std::vector<double>& trace, int stride) {
    if (stride < 1) throw std::invalid_argument("trace stride must be at least 1");
    Json values = Json::array();
    // Entry k is the score after iteration (k + 1) * stride.
    for (std::size_t k = static_cast<std::size_t>(stride) - 1; k < trace.size(); k += static_cast<std::size_t>(stride))
        values.push_back(trace[k]);
    return Json{{"stride", stride}, {"values", std::move(values)}};
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (int r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class State, class Extra>
Json chain_document(const char* model, const ChainOutput<State>& chain, const McmcConfig& cfg, int num_nodes,
                    int trace_stride, Extra&& extra) {
    Json samples = Json::array();
    for (std::size_t k = 0; k < chain.samples.size(); ++k) {
        const auto& s = chain.samples[k];
        Json item{{"iteration", chain.sample_iterations[k]},
                  {"static", edges_to_json(s.g.edges())},
                  {"dynamic", edges_to_json(s.gd.edges())}};
        extra(s, item);
        samples.push_back(std::move(item));
    }
    return Json{{"format_version", kFormatVersion},
                {"model", model},
                {"num_nodes", num_nodes},
                {"config", config_to_json(cfg)},
                {"retained", chain.samples.size()},
                {"samples", std::move(samples)},
                {"trace", trace_to_json(chain.trace, trace_stride)},
                {"acceptance", acceptance_to_json(chain.acceptance)}};
}

std::string cpdag_label(const Cpdag& c) {
    const int n = c.slice_size() > 0 ? c.slice_size() : c.num_nodes();
    std::string out;
    auto add = [&](const std::string& piece) {
        if (!out.empty()) out += ' ';
        out += piece;
    };
    for (const auto& e : c.directed_edges())
        if (e.from < n && e.to < n) add("S" + std::to_string(e.from + 1) + ">" + std::to_string(e.to + 1));
    for (const auto& [a, b] : c.undirected_edges())
        if (a < n && b < n) add("U" + std::to_string(a + 1) + "-" + std::to_string(b + 1));
    for (const auto& e : c.directed_edges())
        if (e.from >= n && e.to < n) add("D" + std::to_string(e.from - n + 1) + ">" + std::to_string(e.to + 1));
    return out;
}

}  // namespace

Json config_to_json(const McmcConfig& cfg) {
    Json j{{"iterations", cfg.iterations},
           {"burn_in", cfg.burn_in_fraction},
           {"thinning", cfg.thinning},
           {"seed", cfg.seed},
           {"max_fan_in", cfg.max_fan_in ? Json(*cfg.max_fan_in) : Json(nullptr)},
           {"forbid_self_loops", cfg.forbid_self_loops},
           {"forbid_joint", cfg.forbid_joint_static_dynamic_parent}};
    if (cfg.move_probabilities) {
        Json probs = Json::object();
        for (int t = 0; t < kNumMoveTypes; ++t) probs[kMoveKeys[t]] = (*cfg.move_probabilities)[t];
        j["move_probabilities"] = std::move(probs);
    } else {
        j["move_probabilities"] = nullptr;
    }
    return j;
}

McmcConfig config_from_json(const Json& j, McmcConfig base) {
    if (!j.is_object()) throw std::invalid_argument("MCMC configuration must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "iterations")
            base.iterations = value.get<long long>();
        else if (key == "burn_in")
            base.burn_in_fraction = value.get<double>();
        else if (key == "thinning")
            base.thinning = value.get<long long>();
        else if (key == "seed")
            base.seed = value.get<std::uint64_t>();
        else if (key == "max_fan_in")
            base.max_fan_in = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
        else if (key == "forbid_self_loops")
            base.forbid_self_loops = value.get<bool>();
        else if (key == "forbid_joint")
            base.forbid_joint_static_dynamic_parent = value.get<bool>();
        else if (key == "move_probabilities") {
            if (value.is_null()) {
                base.move_probabilities.reset();
                continue;
            }
            std::array<double, kNumMoveTypes> probs{};
            for (const auto& [name, p] : value.items()) {
                int t = 0;
                while (t < kNumMoveTypes && name != kMoveKeys[t]) ++t;
                if (t == kNumMoveTypes) throw std::invalid_argument("unknown move type '" + name + "'");
                probs[t] = p.get<double>();
            }
            base.move_probabilities = probs;
        } else {
            throw std::invalid_argument("unknown MCMC option '" + key + "'");
        }
    }
    return base;
}

Json edges_to_json(const EdgeList& edges) {
    Json out = Json::array();
    for (const auto& e : edges) out.push_back(Json::array({e.from + 1, e.to + 1}));
    return out;
}

EdgeList edges_from_json(const Json& j, int n) {
    EdgeList out;
    for (const auto& pair : j) {
        if (!pair.is_array() || pair.size() != 2) throw std::invalid_argument("edge entries must be [from, to] pairs");
        const int a = pair[0].get<int>(), b = pair[1].get<int>();
        if (a < 1 || a > n || b < 1 || b > n) throw std::invalid_argument("edge endpoint outside 1..n");
        out.push_back({a - 1, b - 1});
    }
    return out;
}

Json acceptance_to_json(const AcceptanceStats& stats) {
    Json per_type = Json::object();
    for (int t = 0; t < kNumMoveTypes; ++t)
        per_type[kMoveKeys[t]] = Json{{"proposed", stats.proposed[t]}, {"accepted", stats.accepted[t]}};
    return Json{{"moves", std::move(per_type)},
                {"null_moves", stats.null_moves},
                {"total_proposed", stats.total_proposed()},
                {"total_accepted", stats.total_accepted()}};
}

Json chain_to_json(const ChainOutput<MbgeState>& chain, const McmcConfig& cfg, int num_nodes, int trace_stride) {
    return chain_document("mbge", chain, cfg, num_nodes, trace_stride, [](const MbgeState& s, Json& item) {
        item["sigma"] = matrix_to_json(s.sigma);
        item["beta"] = Json(std::vector<double>(s.beta.data(), s.beta.data() + s.beta.size()));
    });
}

Json chain_to_json(const ChainOutput<EbgeState>& chain, const McmcConfig& cfg, int num_nodes, int trace_stride) {
    return chain_document("ebge", chain, cfg, num_nodes, trace_stride, [](const EbgeState&, Json&) {});
}

ChainDocument chain_from_json(const Json& j) {
    if (!j.contains("format_version") || j["format_version"].get<int>() != kFormatVersion)
        throw std::invalid_argument("unsupported chain document version");
    ChainDocument doc;
    doc.model = parse_model(j.at("model").get<std::string>());
    doc.num_nodes = j.at("num_nodes").get<int>();
    const bool loops = !j.at("config").at("forbid_self_loops").get<bool>();
    for (const auto& s : j.at("samples")) {
        const int n = doc.num_nodes;
        doc.samples.push_back({StaticDag(n, edges_from_json(s.at("static"), n)),
                               DynamicGraph(n, edges_from_json(s.at("dynamic"), n), loops)});
    }
    return doc;
}

std::string format_double_exact(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

void write_edge_posteriors_csv(std::ostream& out, const EdgePosterior& p) {
    out << "type,from,to,probability\n";
    const int n = static_cast<int>(p.static_edges.rows());
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            if (i != j) out << "static," << j + 1 << ',' << i + 1 << ',' << format_double_exact(p.static_edges(j, i)) << '\n';
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            out << "dynamic," << j + 1 << ',' << i + 1 << ',' << format_double_exact(p.dynamic_edges(j, i)) << '\n';
}

void write_pr_curve_csv(std::ostream& out, const std::string& scope, const PrResult& r) {
    for (const auto& pt : r.curve)
        out << scope << ',' << format_double_exact(pt.threshold) << ',' << format_double_exact(pt.recall) << ','
            << format_double_exact(pt.precision) << '\n';
}

void write_shd_csv(std::ostream& out, const ShdStudyResult& r) {
    out << "x,mean_shd,sd_shd,replicates\n";
    for (const auto& row : r.rows)
        out << row.x << ',' << format_double_exact(row.mean) << ',' << format_double_exact(row.sd) << ','
            << r.replicates << '\n';
}

void write_shd_values_csv(std::ostream& out, const ShdStudyResult& r) {
    out << "x,replicate,shd\n";
    for (const auto& row : r.rows)
        for (std::size_t k = 0; k < row.values.size(); ++k) out << row.x << ',' << k + 1 << ',' << row.values[k] << '\n';
}

void write_predictive_csv(std::ostream& out, const PredictiveResult& r) {
    out << "model,fold,row,log_predictive\n";
    for (const auto& f : r.folds)
        out << model_name(r.model) << ',' << f.fold + 1 << ',' << f.row + 1 << ','
            << format_double_exact(f.log_predictive) << '\n';
}

std::vector<CpdagCount> summarize_cpdags(const std::vector<Cpdag>& cpdags) {
    std::vector<CpdagCount> out;
    for (std::size_t k = 0; k < cpdags.size(); ++k) {
        auto it = std::find_if(out.begin(), out.end(), [&](const CpdagCount& c) { return c.cpdag == cpdags[k]; });
        if (it == out.end())
            out.push_back({cpdags[k], 1, static_cast<int>(k)});
        else
            ++it->count;
    }
    std::stable_sort(out.begin(), out.end(), [](const CpdagCount& a, const CpdagCount& b) { return a.count > b.count; });
    return out;
}

void write_cpdag_summary_csv(std::ostream& out, const std::vector<CpdagCount>& summary) {
    int total = 0;
    for (const auto& c : summary) total += c.count;
    out << "rank,count,frequency,edges\n";
    for (std::size_t k = 0; k < summary.size(); ++k)
        out << k + 1 << ',' << summary[k].count << ','
            << format_double_exact(static_cast<double>(summary[k].count) / total) << ",\""
            << cpdag_label(summary[k].cpdag) << "\"\n";
}

}  // namespace gdbn
