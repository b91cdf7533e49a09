#ifndef GDBN_EVALUATE_HPP
#define GDBN_EVALUATE_HPP

#include <gdbn/dataio.hpp>
#include <gdbn/graphs.hpp>
#include <gdbn/inference.hpp>
#include <gdbn/rng.hpp>
#include <gdbn/scores.hpp>
#include <gdbn/simulate.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace gdbn {

/// A sampled structure, independent of the model that produced it.
struct StructureSample {
    StaticDag g;
    DynamicGraph gd;
};

std::vector<StructureSample> structures_of(const ChainOutput<MbgeState>& chain);
std::vector<StructureSample> structures_of(const ChainOutput<EbgeState>& chain);

/// The model-appropriate CPDAG of one structure.
Cpdag model_cpdag(Model model, const StaticDag& g, const DynamicGraph& gd);
std::vector<Cpdag> chain_to_cpdags(const std::vector<StructureSample>& samples, Model model);

/// Inclusion frequencies over augmented CPDAGs. static_edges(j, i) is the
/// frequency of X_j -> X_i, counting undirected j - i in both directions;
/// dynamic_edges(j, i) that of X_{j,t-1} -> X_{i,t}.
struct EdgePosterior {
    Matrix static_edges;
    Matrix dynamic_edges;
    int num_samples = 0;
};

/// Throws std::invalid_argument on an empty sequence or mixed node counts.
EdgePosterior edge_posteriors(const std::vector<Cpdag>& cpdags);

enum class EdgeScope { pooled, static_only, dynamic_only };
std::string edge_scope_name(EdgeScope set);

struct RankedEdge {
    bool dynamic = false;
    int from = 0;
    int to = 0;
    double score = 0.0;
    bool positive = false;
};

struct PrPoint {
    double threshold = 0.0;
    double recall = 0.0;
    double precision = 0.0;
};

/// Precision-recall curve over every distinct score threshold. The area is
/// the trapezoid rule over the achievable points, with the curve extended
/// flat from recall 0 to the first point.
struct PrResult {
    std::vector<RankedEdge> ranking;
    std::vector<PrPoint> curve;
    double area = 0.0;
    int positives = 0;
    int candidates = 0;
};

/// Candidates are the ordered static pairs j != i and the dynamic pairs
/// (self-loops only when `dynamic_self_loops`). Throws std::invalid_argument
/// if the selected truth edges are empty or the dimensions differ.
PrResult auprc(const EdgePosterior& posterior, const Cpdag& truth, EdgeScope set = EdgeScope::pooled,
               bool dynamic_self_loops = false);

/// Where the base networks of an SHD study come from.
struct ShdSource {
    /// Unset: a fresh random DAG per replicate. Set: every replicate
    /// re-splits the edges of this DAG.
    std::optional<StaticDag> fixed_network;
};

struct ShdRow {
    int x = 0;
    double mean = 0.0;
    double sd = 0.0;
    std::vector<int> values;  // one per replicate
};

struct ShdStudyResult {
    int n = 0;
    int edges = 0;
    int replicates = 0;
    std::vector<ShdRow> rows;
};

/// For every x and replicate r, split a network into x static and m - x
/// dynamic edges and record shd(mbge_cpdag, ebge_cpdag). Replicate r draws
/// its random network from stream (seed, r) and its split for x from stream
/// (seed, r, x), so results do not depend on `jobs`.
ShdStudyResult shd_study(const ShdSource& source, int n, int m, const std::vector<int>& x_values, int replicates,
                         std::uint64_t seed, int jobs = 1);

struct FoldResult {
    int fold = 0;          // index of the held-out transition
    int row = 0;           // row of that transition's current slice in the input series
    double log_predictive = 0.0;
};

struct PredictiveResult {
    Model model = Model::mbge;
    std::vector<FoldResult> folds;
};

/// Gaussian log density of x_t under one mean-adjusted posterior draw.
double mbge_log_predictive(const MbgeState& s, const Eigen::Ref<const Vector>& current,
                           const Eigen::Ref<const Vector>& lagged);
/// log mean over draws of the Gaussian densities.
double mbge_log_predictive(const std::vector<MbgeState>& draws, const Eigen::Ref<const Vector>& current,
                           const Eigen::Ref<const Vector>& lagged);

/// log p(z* | train) averaged over structures, each term
/// exp(ebge_logml(train + z*) - ebge_logml(train)).
double ebge_log_predictive(const AugmentedData& train, const std::vector<StructureSample>& structures,
                           const Eigen::Ref<const Vector>& z_star, const EbgeHyper& h);

/// Leave-one-transition-out prediction. Fold k holds out augmented row k,
/// runs a chain on the rest with stream (cfg.seed, k) and scores the held-out
/// row. Folds run on `jobs` threads; output does not depend on `jobs`.
PredictiveResult loocv_predict_mbge(const TimeSeriesData& data, const BgeHyper& h, const RegressionPrior& prior,
                                    const McmcConfig& cfg, int jobs = 1);
PredictiveResult loocv_predict_ebge(const TimeSeriesData& data, const EbgeHyper& h, const McmcConfig& cfg,
                                    int jobs = 1);

/// Runs body(0..count-1) on up to `jobs` threads; the first exception is
/// rethrown after all workers stop.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

}  // namespace gdbn

#endif  // GDBN_EVALUATE_HPP
