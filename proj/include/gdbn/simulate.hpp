#ifndef GDBN_SIMULATE_HPP
#define GDBN_SIMULATE_HPP

#include <gdbn/dataio.hpp>
#include <gdbn/graphs.hpp>
#include <gdbn/rng.hpp>

#include <map>
#include <string>

namespace gdbn {

/// Generating network with coefficients. Intercepts and marginal means
/// default to zero.
struct GroundTruth {
    StaticDag g;
    DynamicGraph gd;
    std::map<Edge, double> beta_s;  // static edge j -> i
    std::map<Edge, double> beta_d;  // dynamic edge j => i
    Vector mu_s;                    // marginal means in the eBGe generator
    Vector mu_d;
    Vector beta0;                   // dynamic intercepts in the mBGe generator
    double noise_var = 4.0;

    GroundTruth() = default;
    GroundTruth(StaticDag g, DynamicGraph gd);

    int num_nodes() const { return g.num_nodes(); }
    /// Throws std::invalid_argument unless the coefficient maps are keyed
    /// exactly by the edges and noise_var > 0.
    void validate() const;
};

/// random_dag(n, m) split into x_static static and m - x_static dynamic
/// edges; |beta| ~ Uniform[0.5, 2] with independent random signs.
GroundTruth sample_ground_truth(int n, int m, int x_static, Rng& rng);

/// T x n matrix of independent N(0, var) draws, filled row by row.
Matrix draw_noise(int T, int n, double var, Rng& rng);

/// One-step generator. Row 0 has no dynamic contribution.
TimeSeriesData simulate_ebge(const GroundTruth& gt, int T, Rng& rng);
TimeSeriesData simulate_ebge(const GroundTruth& gt, const Matrix& noise);

/// Two-step generator: static-BN residuals y, then means mu*_t from y_{t-1}
/// (mu*_1 = 0), and x = y + mu*.
struct MbgeSimulation {
    Matrix x;
    Matrix y;
    Matrix mu;
};
MbgeSimulation simulate_mbge_detailed(const GroundTruth& gt, const Matrix& noise);
TimeSeriesData simulate_mbge(const GroundTruth& gt, int T, Rng& rng);

enum class Model { mbge, ebge };
Model parse_model(const std::string& name);
std::string model_name(Model model);

/// Independent series of the given lengths, concatenated with boundaries.
TimeSeriesData simulate_experiments(Model model, const GroundTruth& gt, const std::vector<int>& lengths, Rng& rng);

/// Ground-truth sidecar in the edge-list format with coefficient columns.
std::string format_ground_truth(const GroundTruth& gt);
GroundTruth read_ground_truth(const std::string& path);

}  // namespace gdbn

#endif  // GDBN_SIMULATE_HPP
