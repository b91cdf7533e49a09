#ifndef GDBN_INFERENCE_HPP
#define GDBN_INFERENCE_HPP

#include <gdbn/dataio.hpp>
#include <gdbn/graphs.hpp>
#include <gdbn/linalg.hpp>
#include <gdbn/rng.hpp>
#include <gdbn/scores.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gdbn {

enum class MoveType { static_add, static_delete, static_reverse, dynamic_add, dynamic_delete };
inline constexpr int kNumMoveTypes = 5;
std::string move_type_name(MoveType type);

struct Move {
    MoveType type;
    int from;
    int to;
};

struct McmcConfig {
    long long iterations = 100000;
    double burn_in_fraction = 0.5;
    long long thinning = 100;
    std::uint64_t seed = 1;
    /// Cap on the static parent count and, separately, the dynamic parent
    /// count of every node.
    std::optional<int> max_fan_in;
    bool forbid_self_loops = true;
    /// Disallow X_j -> X_i and X_{j,t-1} -> X_{i,t} at the same time.
    bool forbid_joint_static_dynamic_parent = false;
    /// Probability of proposing each move type, indexed by MoveType. When
    /// unset, a move is drawn uniformly from the full neighbor list.
    std::optional<std::array<double, kNumMoveTypes>> move_probabilities;

    /// Throws std::invalid_argument on an inconsistent configuration.
    void validate() const;
    /// floor((1 - burn_in_fraction) * iterations / thinning)
    long long retained_count() const;
};

/// Every single-edge addition, deletion and reversal of g that stays acyclic
/// and within the fan-in cap. `gd` is consulted only when the configuration
/// forbids joint static and dynamic parents.
std::vector<Move> static_neighbors(const StaticDag& g, const McmcConfig& cfg, const DynamicGraph* gd = nullptr);
/// Additions and deletions of lag-1 edges; there are no reversals.
std::vector<Move> dynamic_neighbors(const DynamicGraph& gd, const McmcConfig& cfg, const StaticDag* g = nullptr);

void apply_move(const Move& m, StaticDag& g, DynamicGraph& gd);
Move inverse_move(const Move& m);

/// Accept with probability min(1, exp(new - old) * n_old / n_new).
bool mh_accept(double log_score_new, double log_score_old, std::size_t n_neighbors_old,
               std::size_t n_neighbors_new, Rng& rng);
/// Accept with probability min(1, exp(log_ratio)).
bool mh_accept_log_ratio(double log_ratio, Rng& rng);

/// Draw Sigma from the posterior of a zero-mean Gaussian that is Markov with
/// respect to g. Each node carries a regression on its static parents,
///   y_i = b_i^T y_Pa(i) + e_i,  e_i ~ N(0, s_i^2),
/// with the Normal-inverse-gamma family posteriors implied by the Wishart
/// prior. Sigma = (I - B)^{-1} D (I - B)^{-T}.
Matrix sample_sigma_given_dag(const StaticDag& g, const Matrix& residuals, const BgeHyper& h, Rng& rng);

/// W ~ Wishart(dof, scale), E[W] = dof * scale, by the Bartlett decomposition.
Matrix sample_wishart(double dof, const Matrix& scale, Rng& rng);

struct EbgeParams {
    Vector mean;
    Matrix precision;
};
/// One draw of (mu, W) from the unconstrained Normal-Wishart posterior of the
/// augmented vector.
EbgeParams sample_ebge_params(const AugmentedData& aug, const EbgeHyper& h, Rng& rng);

struct MbgeState {
    StaticDag g;
    DynamicGraph gd;
    Matrix sigma;
    Vector beta;
};

struct EbgeState {
    StaticDag g;
    DynamicGraph gd;
};

struct AcceptanceStats {
    std::array<long long, kNumMoveTypes> proposed{};
    std::array<long long, kNumMoveTypes> accepted{};
    /// Iterations whose proposal list was empty; counted as rejected.
    long long null_moves = 0;

    long long total_proposed() const;
    long long total_accepted() const;
};

template <class State>
struct ChainOutput {
    std::vector<State> samples;
    std::vector<long long> sample_iterations;  // 1-based
    /// Log score of the state after each iteration.
    std::vector<double> trace;
    AcceptanceStats acceptance;
    double duration_ms = 0.0;
};

/// Two-block sampler of the mean-adjusted model. One iteration is a static
/// proposal scored on the residuals of the previous beta, a Sigma draw, a
/// dynamic proposal scored with beta integrated out, and a beta draw. The
/// trace holds the static score on that iteration's residuals plus the
/// dynamic marginal given that iteration's Sigma.
ChainOutput<MbgeState> run_mbge_chain(const TimeSeriesData& data, const BgeHyper& h, const RegressionPrior& prior,
                                      const McmcConfig& cfg, Rng& rng);
ChainOutput<MbgeState> run_mbge_chain(const AugmentedData& aug, const BgeHyper& h, const RegressionPrior& prior,
                                      const McmcConfig& cfg, Rng& rng);

/// Structure sampler of the extended model over (g, gd), scored by the
/// augmented BGe marginal with parameters integrated out.
ChainOutput<EbgeState> run_ebge_chain(const TimeSeriesData& data, const EbgeHyper& h, const McmcConfig& cfg,
                                      Rng& rng);
/// Transition-level entry points; rows of `aug` need not come from one
/// contiguous series, which is what leave-one-out folds rely on.
ChainOutput<EbgeState> run_ebge_chain(const AugmentedData& aug, const EbgeHyper& h, const McmcConfig& cfg, Rng& rng);

}  // namespace gdbn

#endif  // GDBN_INFERENCE_HPP
