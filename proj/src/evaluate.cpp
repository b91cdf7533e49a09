#include <gdbn/cpdag.hpp>
#include <gdbn/evaluate.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace gdbn {

namespace {

template <class State>
std::vector<StructureSample> structures_from(const std::vector<State>& samples) {
    std::vector<StructureSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back({s.g, s.gd});
    return out;
}

double log_mean_exp(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("log_mean_exp: no terms");
    const double top = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s / static_cast<double>(v.size()));
}

}  // namespace

std::vector<StructureSample> structures_of(const ChainOutput<MbgeState>& chain) { return structures_from(chain.samples); }
std::vector<StructureSample> structures_of(const ChainOutput<EbgeState>& chain) { return structures_from(chain.samples); }

Cpdag model_cpdag(Model model, const StaticDag& g, const DynamicGraph& gd) {
    return model == Model::mbge ? mbge_cpdag(g, gd) : ebge_cpdag(g, gd);
}

std::vector<Cpdag> chain_to_cpdags(const std::vector<StructureSample>& samples, Model model) {
    std::vector<Cpdag> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(model_cpdag(model, s.g, s.gd));
    return out;
}

EdgePosterior edge_posteriors(const std::vector<Cpdag>& cpdags) {
    if (cpdags.empty()) throw std::invalid_argument("edge_posteriors: no CPDAGs");
    const int n = cpdags.front().slice_size();
    if (n <= 0) throw std::invalid_argument("edge_posteriors: CPDAGs must use the augmented layout");
    EdgePosterior out{Matrix::Zero(n, n), Matrix::Zero(n, n), static_cast<int>(cpdags.size())};
    for (const auto& c : cpdags) {
        if (c.slice_size() != n || c.num_nodes() != 2 * n)
            throw std::invalid_argument("edge_posteriors: CPDAGs of different sizes");
        for (const auto& e : c.directed_edges()) {
            if (e.from < n && e.to < n)
                out.static_edges(e.from, e.to) += 1.0;
            else if (e.from >= n && e.to < n)
                out.dynamic_edges(e.from - n, e.to) += 1.0;
        }
        for (const auto& [a, b] : c.undirected_edges()) {
            if (a >= n || b >= n) continue;
            out.static_edges(a, b) += 1.0;
            out.static_edges(b, a) += 1.0;
        }
    }
    out.static_edges /= static_cast<double>(cpdags.size());
    out.dynamic_edges /= static_cast<double>(cpdags.size());
    return out;
}

std::string edge_scope_name(EdgeScope set) {
    switch (set) {
        case EdgeScope::pooled: return "pooled";
        case EdgeScope::static_only: return "static";
        case EdgeScope::dynamic_only: return "dynamic";
    }
    throw std::invalid_argument("unknown edge set");
}

PrResult auprc(const EdgePosterior& posterior, const Cpdag& truth, EdgeScope set, bool dynamic_self_loops) {
    const int n = static_cast<int>(posterior.static_edges.rows());
    if (truth.slice_size() != n || truth.num_nodes() != 2 * n)
        throw std::invalid_argument("auprc: truth CPDAG does not match the posterior size");
    const EdgePosterior truth_marks = edge_posteriors({truth});

    PrResult out;
    for (int block = 0; block < 2; ++block) {
        const bool dynamic = block == 1;
        if ((dynamic && set == EdgeScope::static_only) || (!dynamic && set == EdgeScope::dynamic_only)) continue;
        const Matrix& score = dynamic ? posterior.dynamic_edges : posterior.static_edges;
        const Matrix& mark = dynamic ? truth_marks.dynamic_edges : truth_marks.static_edges;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                if (i == j && !(dynamic && dynamic_self_loops)) continue;
                out.ranking.push_back({dynamic, j, i, score(j, i), mark(j, i) > 0.5});
            }
    }
    out.candidates = static_cast<int>(out.ranking.size());
    out.positives = static_cast<int>(std::count_if(out.ranking.begin(), out.ranking.end(),
                                                   [](const RankedEdge& e) { return e.positive; }));
    if (out.positives == 0) throw std::invalid_argument("auprc: the truth has no edges in the selected set");

    // Stable sort keeps the candidate order among ties, so output is deterministic.
    std::stable_sort(out.ranking.begin(), out.ranking.end(),
                     [](const RankedEdge& a, const RankedEdge& b) { return a.score > b.score; });
    int tp = 0, predicted = 0;
    for (std::size_t k = 0; k < out.ranking.size(); ++k) {
        ++predicted;
        tp += out.ranking[k].positive;
        const bool last_of_tie = k + 1 == out.ranking.size() || out.ranking[k + 1].score != out.ranking[k].score;
        if (!last_of_tie) continue;
        out.curve.push_back({out.ranking[k].score, static_cast<double>(tp) / out.positives,
                             static_cast<double>(tp) / predicted});
    }
    double prev_recall = 0.0;
    double prev_precision = out.curve.front().precision;
    for (const auto& p : out.curve) {
        out.area += (p.recall - prev_recall) * 0.5 * (p.precision + prev_precision);
        prev_recall = p.recall;
        prev_precision = p.precision;
    }
    return out;
}

// ---------------------------------------------------------------------------

void parallel_for(int count, int jobs, const std::function<void(int)>& body) {
    if (count <= 0) return;
    jobs = std::clamp(jobs, 1, count);
    if (jobs == 1) {
        for (int k = 0; k < count; ++k) body(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (int w = 0; w < jobs; ++w)
        workers.emplace_back([&] {
            for (int k = next++; k < count; k = next++) {
                {
                    std::lock_guard lock(error_mutex);
                    if (error) return;
                }
                try {
                    body(k);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

ShdStudyResult shd_study(const ShdSource& source, int n, int m, const std::vector<int>& x_values, int replicates,
                         std::uint64_t seed, int jobs) {
    if (source.fixed_network) {
        n = source.fixed_network->num_nodes();
        m = static_cast<int>(source.fixed_network->num_edges());
    }
    if (n < 1 || m < 0 || m > n * (n - 1) / 2) throw std::invalid_argument("shd_study: invalid node or edge count");
    if (replicates < 1) throw std::invalid_argument("shd_study: need at least one replicate");
    for (int x : x_values)
        if (x < 0 || x > m) throw std::invalid_argument("shd_study: x outside [0, edges]");

    ShdStudyResult out{n, m, replicates, {}};
    std::vector<std::vector<int>> values(x_values.size(), std::vector<int>(replicates));
    parallel_for(replicates, jobs, [&](int r) {
        StaticDag base;
        if (source.fixed_network) {
            base = *source.fixed_network;
        } else {
            Rng rng = make_stream(seed, static_cast<std::uint64_t>(r));
            base = random_dag(n, m, rng);
        }
        for (std::size_t k = 0; k < x_values.size(); ++k) {
            Rng rng = make_stream(seed, static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(x_values[k]));
            const auto [g, gd] = split_static_dynamic(base, x_values[k], rng);
            values[k][r] = shd(mbge_cpdag(g, gd), ebge_cpdag(g, gd));
        }
    });
    for (std::size_t k = 0; k < x_values.size(); ++k) {
        ShdRow row{x_values[k], 0.0, 0.0, values[k]};
        for (int v : row.values) row.mean += v;
        row.mean /= replicates;
        if (replicates > 1) {
            for (int v : row.values) row.sd += (v - row.mean) * (v - row.mean);
            row.sd = std::sqrt(row.sd / (replicates - 1));
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

// ---------------------------------------------------------------------------

double mbge_log_predictive(const MbgeState& s, const Eigen::Ref<const Vector>& current,
                           const Eigen::Ref<const Vector>& lagged) {
    const int n = static_cast<int>(current.size());
    const Vector mu = DesignMatrix(s.gd).block(lagged) * s.beta;
    const Eigen::LLT<Matrix> llt = checked_cholesky(s.sigma, "predictive covariance");
    const Vector r = llt.matrixL().solve(current - mu);
    const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
    return -0.5 * (n * std::log(2.0 * std::numbers::pi) + logdet + r.squaredNorm());
}

double mbge_log_predictive(const std::vector<MbgeState>& draws, const Eigen::Ref<const Vector>& current,
                           const Eigen::Ref<const Vector>& lagged) {
    std::vector<double> terms;
    terms.reserve(draws.size());
    for (const auto& s : draws) terms.push_back(mbge_log_predictive(s, current, lagged));
    return log_mean_exp(terms);
}

double ebge_log_predictive(const AugmentedData& train, const std::vector<StructureSample>& structures,
                           const Eigen::Ref<const Vector>& z_star, const EbgeHyper& h) {
    if (z_star.size() != train.z.cols()) throw std::invalid_argument("ebge_log_predictive: z* has the wrong length");
    Matrix plus(train.z.rows() + 1, train.z.cols());
    plus << train.z, z_star.transpose();
    SubsetScorer base(train.z, h, SubsetScorer::Mean::estimated);
    SubsetScorer extended(plus, h, SubsetScorer::Mean::estimated);
    std::vector<double> terms;
    terms.reserve(structures.size());
    for (const auto& s : structures) terms.push_back(ebge_logml(extended, s.g, s.gd) - ebge_logml(base, s.g, s.gd));
    return log_mean_exp(terms);
}

namespace {

template <class Fold>
PredictiveResult run_folds(Model model, const TimeSeriesData& data, int jobs, Fold&& fold) {
    const AugmentedData aug = to_augmented(data);
    const int folds = aug.num_rows();
    if (folds < 2) throw std::invalid_argument("leave-one-out prediction needs at least two transitions");
    PredictiveResult out{model, std::vector<FoldResult>(folds)};
    parallel_for(folds, jobs, [&](int k) {
        try {
            out.folds[k] = {k, data.transition_rows()[k], fold(aug, k)};
        } catch (const std::exception& e) {
            throw std::runtime_error("fold " + std::to_string(k) + ": " + e.what());
        }
    });
    return out;
}

}  // namespace

PredictiveResult loocv_predict_mbge(const TimeSeriesData& data, const BgeHyper& h, const RegressionPrior& prior,
                                    const McmcConfig& cfg, int jobs) {
    cfg.validate();
    if (cfg.retained_count() < 1) throw std::invalid_argument("the chain configuration retains no samples");
    const int n = data.num_nodes();
    return run_folds(Model::mbge, data, jobs, [&](const AugmentedData& aug, int k) {
        Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(k));
        const auto chain = run_mbge_chain(aug.without_row(k), h, prior, cfg, rng);
        return mbge_log_predictive(chain.samples, aug.z.row(k).head(n).transpose(), aug.z.row(k).tail(n).transpose());
    });
}

PredictiveResult loocv_predict_ebge(const TimeSeriesData& data, const EbgeHyper& h, const McmcConfig& cfg, int jobs) {
    cfg.validate();
    if (cfg.retained_count() < 1) throw std::invalid_argument("the chain configuration retains no samples");
    return run_folds(Model::ebge, data, jobs, [&](const AugmentedData& aug, int k) {
        Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(k));
        const AugmentedData train = aug.without_row(k);
        const auto chain = run_ebge_chain(train, h, cfg, rng);
        return ebge_log_predictive(train, structures_of(chain), aug.z.row(k).transpose(), h);
    });
}

}  // namespace gdbn
