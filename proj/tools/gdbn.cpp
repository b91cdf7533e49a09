#include <gdbn/cpdag.hpp>
#include <gdbn/dataio.hpp>
#include <gdbn/evaluate.hpp>
#include <gdbn/graph_io.hpp>
#include <gdbn/inference.hpp>
#include <gdbn/report.hpp>
#include <gdbn/scores.hpp>
#include <gdbn/simulate.hpp>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef GDBN_VERSION
#define GDBN_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using gdbn::Json;

namespace {

/// Bad flag values or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 initialisation failed");
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
        if (!in) break;
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), md, &len);
    std::string hex;
    char two[3];
    for (unsigned int k = 0; k < len; ++k) {
        std::snprintf(two, sizeof two, "%02x", md[k]);
        hex += two;
    }
    return hex;
}

std::string utc_timestamp(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Options bound to config keys. Each flag that was given on the command line
// overwrites its key after the defaults and the --config file are applied.
class OptionSet {
public:
    explicit OptionSet(CLI::App* app) : app_(app) {
        app_->add_option("--config", config_path_, "JSON file with option values (flags take precedence)");
    }

    template <class T>
    void add(const std::string& flag, const std::string& key, const std::string& help) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app_->add_option(flag, *value, help);
        appliers_.push_back([opt, value, key](Json& j) {
            if (opt->count() > 0) j[key] = *value;
        });
    }

    /// A switch that stores a fixed value in `key` when present.
    void add_switch(const std::string& flag, const std::string& key, Json value, const std::string& help) {
        CLI::Option* opt = app_->add_flag(flag, help);
        appliers_.push_back([opt, value, key](Json& j) {
            if (opt->count() > 0) j[key] = value;
        });
    }

    Json merge(Json defaults) const {
        if (!config_path_.empty()) {
            std::ifstream in(config_path_);
            if (!in) throw UsageError("cannot read config file " + config_path_);
            Json file;
            try {
                file = Json::parse(in);
            } catch (const Json::parse_error& e) {
                throw UsageError("config file " + config_path_ + ": " + e.what());
            }
            if (!file.is_object()) throw UsageError("config file must hold a JSON object");
            for (const auto& [key, value] : file.items()) {
                if (!defaults.contains(key)) throw UsageError("unknown config key '" + key + "'");
                defaults[key] = value;
            }
        }
        for (const auto& apply : appliers_) apply(defaults);
        return defaults;
    }

private:
    CLI::App* app_;
    std::string config_path_;
    std::vector<std::function<void(Json&)>> appliers_;
};

std::uint64_t resolve_seed(Json& config) {
    if (config["seed"].is_null()) {
        std::uint64_t seed = 1;
        if (const char* env = std::getenv("GDBN_SEED"); env && *env) {
            try {
                std::size_t used = 0;
                seed = std::stoull(env, &used);
                if (env[used] != '\0') throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                throw UsageError(std::string("GDBN_SEED is not an unsigned integer: ") + env);
            }
        }
        config["seed"] = seed;
    }
    return config["seed"].get<std::uint64_t>();
}

// Typed access that reports schema problems as usage errors.
template <class T>
T get(const Json& config, const std::string& key) {
    try {
        return config.at(key).get<T>();
    } catch (const Json::exception&) {
        throw UsageError("option '" + key + "' has the wrong type");
    }
}

std::string require_path(const Json& config, const std::string& key) {
    if (config.at(key).is_null()) throw UsageError("missing required option '" + key + "'");
    return get<std::string>(config, key);
}

class Run {
public:
    Run(std::string subcommand, Json config, fs::path out_dir)
        : subcommand_(std::move(subcommand)), config_(std::move(config)), out_(std::move(out_dir)),
          start_(std::chrono::system_clock::now()) {}

    const fs::path& out_dir() const { return out_; }
    const Json& config() const { return config_; }

    void add_input(const fs::path& p) {
        inputs_.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
    }

    void write(const std::string& name, const std::string& content) {
        fs::create_directories(out_);
        const fs::path p = out_ / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + p.string());
        f << content;
        f.close();
        if (!f) throw std::runtime_error("write failed for " + p.string());
        outputs_.push_back(p);
    }

    /// Timestamps live only here, so result files stay byte-identical.
    void finish() {
        const auto end = std::chrono::system_clock::now();
        Json outputs = Json::array();
        for (const auto& p : outputs_) outputs.push_back({{"path", p.string()}, {"sha256", sha256_file(p)}});
        Json m{{"format_version", gdbn::kFormatVersion},
               {"tool", "gdbn"},
               {"version", GDBN_VERSION},
               {"subcommand", subcommand_},
               {"seed", config_.contains("seed") ? config_["seed"] : Json(nullptr)},
               {"config", config_},
               {"inputs", inputs_},
               {"outputs", outputs},
               {"started", utc_timestamp(start_)},
               {"finished", utc_timestamp(end)},
               {"duration_ms", std::chrono::duration_cast<std::chrono::milliseconds>(end - start_).count()}};
        fs::create_directories(out_);
        std::ofstream f(out_ / "manifest.json");
        if (!f) throw std::runtime_error("cannot write manifest");
        f << m.dump(2) << '\n';
    }

private:
    std::string subcommand_;
    Json config_;
    fs::path out_;
    std::chrono::system_clock::time_point start_;
    Json inputs_ = Json::array();
    std::vector<fs::path> outputs_;
};

gdbn::Model model_of(const Json& config, const std::string& key = "model") {
    try {
        return gdbn::parse_model(get<std::string>(config, key));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

std::string numbered(const std::string& stem, int k, const std::string& ext) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", k);
    return stem + "_" + buf + ext;
}

// ---------------------------------------------------------------- simulate

Json simulate_defaults() {
    return Json{{"model", "ebge"}, {"n", 11},   {"edges", 20},        {"static_x", 5},
                {"T", 25},         {"reps", 10}, {"experiments", 1}, {"noise_var", 4.0},
                {"seed", nullptr}};
}

void run_simulate(Run& run) {
    const Json& c = run.config();
    const auto model = model_of(c);
    const int n = get<int>(c, "n"), m = get<int>(c, "edges"), x = get<int>(c, "static_x");
    const int T = get<int>(c, "T"), reps = get<int>(c, "reps"), k = get<int>(c, "experiments");
    const double noise_var = get<double>(c, "noise_var");
    const auto seed = get<std::uint64_t>(c, "seed");
    if (n < 1 || m < 0 || m > n * (n - 1) / 2) throw UsageError("--edges must lie in [0, n(n-1)/2]");
    if (x < 0 || x > m) throw UsageError("--static-x must lie in [0, edges]");
    if (T < 2) throw UsageError("--T must be at least 2");
    if (reps < 0) throw UsageError("--reps must be non-negative");
    if (k < 1) throw UsageError("--experiments must be at least 1");
    if (!(noise_var > 0.0)) throw UsageError("--noise-var must be positive");

    for (int r = 0; r < reps; ++r) {
        gdbn::Rng rng = gdbn::make_stream(seed, static_cast<std::uint64_t>(r));
        auto gt = gdbn::sample_ground_truth(n, m, x, rng);
        gt.noise_var = noise_var;
        const auto data = gdbn::simulate_experiments(model, gt, std::vector<int>(k, T), rng);
        std::ostringstream csv;
        gdbn::write_csv(csv, data);
        run.write(numbered("data", r + 1, ".csv"), csv.str());
        run.write(numbered("truth", r + 1, ".txt"), gdbn::format_ground_truth(gt));
    }
    std::cerr << "simulate: wrote " << reps << " dataset(s) to " << run.out_dir().string() << '\n';
}

// ---------------------------------------------------------- learn / predict

Json chain_defaults() {
    return Json{{"data", nullptr},
                {"model", "mbge"},
                {"iterations", 100000},
                {"burn_in", 0.5},
                {"thinning", 100},
                {"max_fan_in", nullptr},
                {"forbid_self_loops", true},
                {"forbid_joint", false},
                {"move_probabilities", nullptr},
                {"standardize", true},
                {"columns", Json::array()},
                {"experiment_column", "experiment"},
                {"alpha_w", nullptr},
                {"alpha_mu", 1.0},
                {"lambda2", 1.0},
                {"seed", nullptr}};
}

gdbn::McmcConfig mcmc_config(const Json& c) {
    Json sub = Json::object();
    for (const char* key : {"iterations", "burn_in", "thinning", "seed", "max_fan_in", "forbid_self_loops",
                            "forbid_joint", "move_probabilities"})
        sub[key] = c.at(key);
    try {
        auto cfg = gdbn::config_from_json(sub);
        cfg.validate();
        return cfg;
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

gdbn::TimeSeriesData load_data(Run& run, const Json& c) {
    gdbn::DatasetSpec spec;
    spec.path = require_path(c, "data");
    spec.columns = get<std::vector<std::string>>(c, "columns");
    spec.experiment_column = get<std::string>(c, "experiment_column");
    spec.standardize = get<bool>(c, "standardize");
    run.add_input(spec.path);
    return gdbn::load_csv(spec);
}

template <class H>
H with_overrides(H h, const Json& c) {
    if (!c.at("alpha_w").is_null()) h.alpha_w = get<double>(c, "alpha_w");
    h.alpha_mu = get<double>(c, "alpha_mu");
    try {
        h.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return h;
}

gdbn::RegressionPrior regression_prior(const Json& c) {
    gdbn::RegressionPrior prior{get<double>(c, "lambda2")};
    try {
        prior.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return prior;
}

void add_chain_options(OptionSet& opts) {
    opts.add<std::string>("--data", "data", "input CSV (header row, optional experiment column)");
    opts.add<std::string>("--model", "model", "mbge or ebge");
    opts.add<long long>("--iters", "iterations", "MCMC iterations");
    opts.add<double>("--burn-in", "burn_in", "fraction of iterations discarded");
    opts.add<long long>("--thin", "thinning", "keep every k-th iteration after burn-in");
    opts.add<std::uint64_t>("--seed", "seed", "master seed (falls back to GDBN_SEED, then 1)");
    opts.add<int>("--max-fan-in", "max_fan_in", "cap on static and on dynamic parents per node");
    opts.add_switch("--allow-self-loops", "forbid_self_loops", false, "allow dynamic edges X_i,t-1 -> X_i,t");
    opts.add_switch("--forbid-joint", "forbid_joint", true, "forbid a node being both static and dynamic parent");
    opts.add<bool>("--standardize", "standardize", "rescale columns to mean 0, variance 1 (default true)");
    opts.add<std::vector<std::string>>("--columns", "columns", "variables to keep, by header name");
    opts.add<std::string>("--experiment-column", "experiment_column", "column marking experiment blocks");
    opts.add<double>("--alpha-w", "alpha_w", "Wishart degrees of freedom (default dim + 2)");
    opts.add<double>("--alpha-mu", "alpha_mu", "mean precision scale");
    opts.add<double>("--lambda2", "lambda2", "regression prior variance (mBGe)");
}

struct ChainRun {
    Json document;
    std::vector<gdbn::StructureSample> structures;
};

// Adds the per-sample score so that chain.json carries `log_marginal`.
template <class State>
void attach_scores(Json& doc, const gdbn::ChainOutput<State>& chain) {
    auto& samples = doc["samples"];
    for (std::size_t k = 0; k < chain.samples.size(); ++k)
        samples[k]["log_marginal"] = chain.trace[static_cast<std::size_t>(chain.sample_iterations[k] - 1)];
}

void run_learn(Run& run) {
    const Json& c = run.config();
    const auto model = model_of(c);
    const auto cfg = mcmc_config(c);
    const int stride = get<int>(c, "trace_stride");
    if (stride < 1) throw UsageError("--trace-stride must be at least 1");
    const auto data = load_data(run, c);
    const int n = data.num_nodes();
    if (data.effective_size() < 1) throw std::runtime_error("the data contain no transitions");

    gdbn::Rng rng = gdbn::make_stream(cfg.seed, 0);
    ChainRun out;
    double seconds = 0.0;
    gdbn::AcceptanceStats acc;
    if (model == gdbn::Model::mbge) {
        const auto h = with_overrides(gdbn::BgeHyper::defaults(n), c);
        const auto chain = gdbn::run_mbge_chain(data, h, regression_prior(c), cfg, rng);
        out.document = gdbn::chain_to_json(chain, cfg, n, stride);
        attach_scores(out.document, chain);
        out.structures = gdbn::structures_of(chain);
        seconds = chain.duration_ms / 1000.0;
        acc = chain.acceptance;
    } else {
        const auto h = with_overrides(gdbn::EbgeHyper::defaults(n), c);
        const auto chain = gdbn::run_ebge_chain(data, h, cfg, rng);
        out.document = gdbn::chain_to_json(chain, cfg, n, stride);
        attach_scores(out.document, chain);
        out.structures = gdbn::structures_of(chain);
        seconds = chain.duration_ms / 1000.0;
        acc = chain.acceptance;
    }
    out.document["variables"] = data.names();
    run.write("chain.json", out.document.dump(2) + "\n");

    const auto cpdags = gdbn::chain_to_cpdags(out.structures, model);
    std::ostringstream summary, edges;
    gdbn::write_cpdag_summary_csv(summary, gdbn::summarize_cpdags(cpdags));
    run.write("cpdag_summary.csv", summary.str());
    gdbn::write_edge_posteriors_csv(edges, gdbn::edge_posteriors(cpdags));
    run.write("edge_posteriors.csv", edges.str());

    std::cerr << "learn: " << gdbn::model_name(model) << " chain, " << cfg.iterations << " iterations in " << seconds
              << " s, " << out.structures.size() << " samples retained, acceptance "
              << static_cast<double>(acc.total_accepted()) / std::max<long long>(1, acc.total_proposed()) << '\n';
}

void run_predict(Run& run) {
    const Json& c = run.config();
    const auto model = model_of(c);
    const auto cfg = mcmc_config(c);
    const int jobs = get<int>(c, "jobs");
    if (jobs < 1) throw UsageError("--jobs must be at least 1");
    const auto data = load_data(run, c);
    if (data.effective_size() < 2) throw std::runtime_error("prediction needs at least two transitions");
    const int n = data.num_nodes();

    std::cerr << "predict: " << data.effective_size() << " folds on " << jobs << " thread(s)\n";
    const auto result = model == gdbn::Model::mbge
                            ? gdbn::loocv_predict_mbge(data, with_overrides(gdbn::BgeHyper::defaults(n), c),
                                                       regression_prior(c), cfg, jobs)
                            : gdbn::loocv_predict_ebge(data, with_overrides(gdbn::EbgeHyper::defaults(n), c), cfg,
                                                       jobs);
    std::ostringstream csv;
    gdbn::write_predictive_csv(csv, result);
    run.write("predictive.csv", csv.str());
    double total = 0.0;
    for (const auto& f : result.folds) total += f.log_predictive;
    std::cerr << "predict: mean log predictive " << total / static_cast<double>(result.folds.size()) << '\n';
}

// ------------------------------------------------------------------ cpdag

Json cpdag_defaults() { return Json{{"structure", nullptr}, {"mode", "ebge"}, {"fix", Json::array()}}; }

gdbn::EdgeList parse_fixed(const Json& fix, int n) {
    gdbn::EdgeList out;
    for (const auto& item : fix) {
        int a = 0, b = 0;
        if (item.is_string()) {
            const auto s = item.get<std::string>();
            char tail = 0;
            if (std::sscanf(s.c_str(), "%d,%d%c", &a, &b, &tail) != 2) throw UsageError("--fix expects j,i; got " + s);
        } else if (item.is_array() && item.size() == 2 && item[0].is_number_integer() && item[1].is_number_integer()) {
            a = item[0].get<int>();
            b = item[1].get<int>();
        } else {
            throw UsageError("fix entries must be \"j,i\" strings or [j, i] pairs");
        }
        if (a < 1 || a > n || b < 1 || b > n) throw UsageError("--fix endpoint outside 1..n");
        out.push_back({a - 1, b - 1});
    }
    return out;
}

void run_cpdag(Run& run) {
    const Json& c = run.config();
    const auto mode = get<std::string>(c, "mode");
    if (mode != "mbge" && mode != "ebge" && mode != "naive" && mode != "static")
        throw UsageError("--mode must be mbge, ebge, naive or static");
    const auto path = require_path(c, "structure");
    const Json& fix = c.at("fix");
    if (!fix.is_array()) throw UsageError("fix must be a list");
    if (!fix.empty() && mode != "static") throw UsageError("--fix applies to --mode static only");

    run.add_input(path);
    const auto s = gdbn::read_structure_file(path);
    gdbn::Cpdag result;
    if (mode == "static") {
        if (s.gd.num_edges() > 0) throw std::runtime_error("--mode static needs a structure without dynamic edges");
        const auto fixed = parse_fixed(fix, s.g.num_nodes());
        for (const auto& e : fixed)
            if (!s.g.has_edge(e.from, e.to))
                throw std::runtime_error("fixed edge " + std::to_string(e.from + 1) + "->" + std::to_string(e.to + 1) +
                                         " is not in the structure");
        result = fixed.empty() ? gdbn::dag_to_cpdag(s.g) : gdbn::dag_to_cpdag_constrained(s.g, fixed);
    } else if (mode == "mbge") {
        result = gdbn::mbge_cpdag(s.g, s.gd);
    } else if (mode == "ebge") {
        result = gdbn::ebge_cpdag(s.g, s.gd);
    } else {
        result = gdbn::naive_augmented_cpdag(s.g, s.gd);
    }
    run.write("cpdag.txt", gdbn::format_cpdag(result));
}

// -------------------------------------------------------------- shd-study

Json shd_defaults() {
    return Json{{"n", 11}, {"edges", 20}, {"x_grid", nullptr}, {"reps", 25}, {"asset", nullptr}, {"seed", nullptr},
                {"jobs", 1}};
}

std::vector<int> parse_grid(const Json& grid, int m) {
    if (grid.is_null()) {
        std::vector<int> all(static_cast<std::size_t>(m) + 1);
        for (int x = 0; x <= m; ++x) all[static_cast<std::size_t>(x)] = x;
        return all;
    }
    if (grid.is_array()) {
        std::vector<int> out;
        for (const auto& v : grid) {
            if (!v.is_number_integer()) throw UsageError("x_grid entries must be integers");
            out.push_back(v.get<int>());
        }
        return out;
    }
    if (!grid.is_string()) throw UsageError("x_grid must be a string or a list");
    const auto s = grid.get<std::string>();
    std::vector<int> out;
    try {
        if (const auto dots = s.find(".."); dots != std::string::npos) {
            std::size_t used_a = 0, used_b = 0;
            const int a = std::stoi(s.substr(0, dots), &used_a);
            const std::string rest = s.substr(dots + 2);
            const int b = std::stoi(rest, &used_b);
            if (used_a != dots || used_b != rest.size() || a > b) throw std::invalid_argument("range");
            for (int x = a; x <= b; ++x) out.push_back(x);
        } else {
            std::stringstream in(s);
            std::string item;
            while (std::getline(in, item, ',')) {
                std::size_t used = 0;
                out.push_back(std::stoi(item, &used));
                if (used != item.size()) throw std::invalid_argument("item");
            }
        }
    } catch (const std::exception&) {
        throw UsageError("--x-grid expects a..b or a comma-separated list; got " + s);
    }
    if (out.empty()) throw UsageError("--x-grid is empty");
    return out;
}

void run_shd_study(Run& run) {
    const Json& c = run.config();
    int n = get<int>(c, "n"), m = get<int>(c, "edges");
    const int reps = get<int>(c, "reps"), jobs = get<int>(c, "jobs");
    if (reps < 1) throw UsageError("--reps must be at least 1");
    if (jobs < 1) throw UsageError("--jobs must be at least 1");
    gdbn::ShdSource source;
    if (!c.at("asset").is_null()) {
        const auto path = get<std::string>(c, "asset");
        run.add_input(path);
        auto s = gdbn::read_structure_file(path);
        // Dynamic lines of an asset are folded into the base network.
        gdbn::EdgeList all = s.g.edges();
        for (const auto& e : s.gd.edges()) all.push_back(e);
        if (!gdbn::is_acyclic(s.g.num_nodes(), all)) throw std::runtime_error("asset network is not acyclic");
        source.fixed_network = gdbn::StaticDag(s.g.num_nodes(), all);
        n = source.fixed_network->num_nodes();
        m = static_cast<int>(source.fixed_network->num_edges());
    }
    if (n < 1 || m < 0 || m > n * (n - 1) / 2) throw UsageError("--edges must lie in [0, n(n-1)/2]");
    const auto grid = parse_grid(c.at("x_grid"), m);
    for (int x : grid)
        if (x < 0 || x > m) throw UsageError("--x-grid value outside [0, edges]");

    const auto result = gdbn::shd_study(source, n, m, grid, reps, get<std::uint64_t>(c, "seed"), jobs);
    std::ostringstream table, values;
    gdbn::write_shd_csv(table, result);
    gdbn::write_shd_values_csv(values, result);
    run.write("shd.csv", table.str());
    run.write("shd_values.csv", values.str());
    std::cerr << "shd-study: " << grid.size() << " grid points x " << reps << " replicates\n";
}

// ------------------------------------------------------------------- eval

Json eval_defaults() {
    return Json{{"chain", nullptr}, {"truth", nullptr}, {"scope", "pooled"}, {"dynamic_self_loops", false}};
}

void run_eval(Run& run) {
    const Json& c = run.config();
    const auto scope = get<std::string>(c, "scope");
    std::vector<gdbn::EdgeScope> scopes;
    if (scope == "pooled")
        scopes = {gdbn::EdgeScope::pooled};
    else if (scope == "separate")
        scopes = {gdbn::EdgeScope::static_only, gdbn::EdgeScope::dynamic_only};
    else if (scope == "static")
        scopes = {gdbn::EdgeScope::static_only};
    else if (scope == "dynamic")
        scopes = {gdbn::EdgeScope::dynamic_only};
    else
        throw UsageError("--scope must be pooled, separate, static or dynamic");
    const bool loops = get<bool>(c, "dynamic_self_loops");
    const auto chain_path = require_path(c, "chain");
    const auto truth_path = require_path(c, "truth");

    run.add_input(chain_path);
    run.add_input(truth_path);
    std::ifstream in(chain_path);
    if (!in) throw std::runtime_error("cannot read " + chain_path);
    const auto doc = gdbn::chain_from_json(Json::parse(in));
    const auto truth = gdbn::read_structure_file(truth_path);
    if (truth.g.num_nodes() != doc.num_nodes) throw std::runtime_error("truth and chain have different node counts");
    const auto posterior = gdbn::edge_posteriors(gdbn::chain_to_cpdags(doc.samples, doc.model));
    const auto truth_cpdag = gdbn::model_cpdag(doc.model, truth.g, truth.gd);

    std::ostringstream table, curve;
    table << "scope,auprc,positives,candidates,samples\n";
    curve << "scope,threshold,recall,precision\n";
    for (auto s : scopes) {
        const auto r = gdbn::auprc(posterior, truth_cpdag, s, loops);
        const auto name = gdbn::edge_scope_name(s);
        table << name << ',' << gdbn::format_double_exact(r.area) << ',' << r.positives << ',' << r.candidates << ','
              << posterior.num_samples << '\n';
        gdbn::write_pr_curve_csv(curve, name, r);
        std::cerr << "eval: " << name << " AUPRC " << r.area << '\n';
    }
    run.write("auprc.csv", table.str());
    run.write("pr_curve.csv", curve.str());
}

// ------------------------------------------------------------------- main

struct Subcommand {
    CLI::App* app;
    std::unique_ptr<OptionSet> options;
    std::string out = ".";
    std::function<Json()> defaults;
    std::function<void(Run&)> body;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure learning for Gaussian dynamic Bayesian networks (mBGe and eBGe models)"};
    app.set_version_flag("--version", GDBN_VERSION);
    app.require_subcommand(1);

    std::vector<std::unique_ptr<Subcommand>> subs;
    auto make = [&](const std::string& name, const std::string& help, std::function<Json()> defaults,
                    std::function<void(Run&)> body) -> Subcommand& {
        auto s = std::make_unique<Subcommand>();
        s->app = app.add_subcommand(name, help);
        s->options = std::make_unique<OptionSet>(s->app);
        s->app->add_option("--out", s->out, "output directory")->capture_default_str();
        s->defaults = std::move(defaults);
        s->body = std::move(body);
        subs.push_back(std::move(s));
        return *subs.back();
    };

    {
        auto& s = make("simulate",
                       "Simulate datasets. Writes data_NNN.csv and truth_NNN.txt (edge list with coefficients).",
                       simulate_defaults, run_simulate);
        auto& o = *s.options;
        o.add<std::string>("--model", "model", "generator: mbge or ebge");
        o.add<int>("--n", "n", "number of variables");
        o.add<int>("--edges", "edges", "edges of the random network");
        o.add<int>("--static-x", "static_x", "how many of them are static");
        o.add<int>("--T", "T", "time points per experiment");
        o.add<int>("--reps", "reps", "number of datasets");
        o.add<int>("--experiments", "experiments", "independent series per dataset");
        o.add<double>("--noise-var", "noise_var", "noise variance");
        o.add<std::uint64_t>("--seed", "seed", "master seed (falls back to GDBN_SEED, then 1)");
    }
    {
        auto& s = make("learn",
                       "Run an MCMC chain. Writes chain.json, cpdag_summary.csv (rank,count,frequency,edges) and "
                       "edge_posteriors.csv (type,from,to,probability).",
                       [] {
                           auto d = chain_defaults();
                           d["trace_stride"] = 100;
                           return d;
                       },
                       run_learn);
        add_chain_options(*s.options);
        s.options->add<int>("--trace-stride", "trace_stride", "store the score every k iterations");
    }
    {
        auto& s = make("cpdag", "Convert a structure file to a CPDAG. Writes cpdag.txt (S, U and D lines).",
                       cpdag_defaults, run_cpdag);
        auto& o = *s.options;
        o.add<std::string>("--structure", "structure", "structure file (n=..., S j i, D j i lines)");
        o.add<std::string>("--mode", "mode", "mbge, ebge, naive or static");
        o.add<std::vector<std::string>>("--fix", "fix", "static edge j,i whose orientation is known (repeatable)");
    }
    {
        auto& s = make("shd-study",
                       "SHD between the mBGe and eBGe CPDAGs over static/dynamic splits. Writes shd.csv "
                       "(x,mean_shd,sd_shd,replicates) and shd_values.csv (x,replicate,shd).",
                       shd_defaults, run_shd_study);
        auto& o = *s.options;
        o.add<int>("--n", "n", "nodes of the random networks");
        o.add<int>("--edges", "edges", "edges of the random networks");
        o.add<std::string>("--x-grid", "x_grid", "static edge counts: a..b or a,b,c (default 0..edges)");
        o.add<int>("--reps", "reps", "replicates per grid point");
        o.add<std::string>("--asset", "asset", "fixed network as an edge-list file instead of random DAGs");
        o.add<std::uint64_t>("--seed", "seed", "master seed (falls back to GDBN_SEED, then 1)");
        o.add<int>("--jobs", "jobs", "worker threads");
    }
    {
        auto& s = make("eval",
                       "Score edge posteriors of a chain against a true structure. Writes auprc.csv "
                       "(scope,auprc,positives,candidates,samples) and pr_curve.csv (scope,threshold,recall,precision).",
                       eval_defaults, run_eval);
        auto& o = *s.options;
        o.add<std::string>("--chain", "chain", "chain.json from learn");
        o.add<std::string>("--truth", "truth", "true structure file");
        o.add<std::string>("--scope", "scope", "pooled, separate, static or dynamic");
        o.add_switch("--dynamic-self-loops", "dynamic_self_loops", true, "rank dynamic self-loops as candidates");
    }
    {
        auto& s = make("predict",
                       "Leave-one-transition-out predictive densities. Writes predictive.csv "
                       "(model,fold,row,log_predictive).",
                       [] {
                           auto d = chain_defaults();
                           d["jobs"] = 1;
                           return d;
                       },
                       run_predict);
        add_chain_options(*s.options);
        s.options->add<int>("--jobs", "jobs", "folds run in parallel");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto& s : subs) {
        if (!s->app->parsed()) continue;
        std::unique_ptr<Run> run;
        try {
            Json config = s->options->merge(s->defaults());
            if (config.contains("seed")) resolve_seed(config);
            run = std::make_unique<Run>(s->app->get_name(), std::move(config), s->out);
            s->body(*run);
            run->finish();
            return 0;
        } catch (const UsageError& e) {
            std::cerr << "gdbn " << s->app->get_name() << ": " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "gdbn " << s->app->get_name() << ": " << e.what() << '\n';
            return 1;
        }
    }
    return 2;
}
