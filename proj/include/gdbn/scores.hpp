#ifndef GDBN_SCORES_HPP
#define GDBN_SCORES_HPP

#include <gdbn/dataio.hpp>
#include <gdbn/graphs.hpp>
#include <gdbn/linalg.hpp>

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace gdbn {

/// Normal-Wishart prior: W ~ Wishart(alpha_w, R) with E[W] = alpha_w R^{-1},
/// mu | W ~ N(nu, (alpha_mu W)^{-1}).
struct BgeHyper {
    double alpha_w = 0.0;
    double alpha_mu = 1.0;
    Matrix R;
    Vector nu;

    int dim() const { return static_cast<int>(R.rows()); }
    /// Throws std::invalid_argument unless R is symmetric positive definite,
    /// alpha_w > dim - 1, alpha_mu > 0 and nu has length dim.
    void validate() const;
    /// alpha_w = dim + 2, alpha_mu = 1, R = I, nu = 0.
    static BgeHyper defaults(int dim);
};

/// The same prior over the 2n-dimensional augmented vector.
struct EbgeHyper : BgeHyper {
    int slice_size() const { return dim() / 2; }
    /// alpha_w = 2n + 2, alpha_mu = 1, R = I_{2n}, nu = 0.
    static EbgeHyper defaults(int n);
};

/// beta ~ N(0, lambda2 I).
struct RegressionPrior {
    double lambda2 = 1.0;
    void validate() const;
};

/// log Gamma_l(a); throws std::domain_error unless a > (l - 1) / 2.
double log_multigamma(int l, double a);

/// Running sums over observation rows, enough to rebuild every scatter
/// matrix. Rows can be added and removed for leave-one-out work.
class ScatterStats {
public:
    explicit ScatterStats(int dim = 0);
    explicit ScatterStats(const Matrix& rows);

    void add_row(const Eigen::Ref<const Vector>& x);
    void remove_row(const Eigen::Ref<const Vector>& x);

    int dim() const { return static_cast<int>(sum_.size()); }
    int count() const { return count_; }
    Vector mean() const;
    /// sum_i (x_i - mean)(x_i - mean)^T
    Matrix centered_scatter() const;
    /// sum_i x_i x_i^T
    const Matrix& raw_scatter() const { return cross_; }

private:
    int count_ = 0;
    Vector sum_;
    Matrix cross_;
};

/// Subset marginal likelihoods p(x^L) for one dataset and one prior, with a
/// per-subset cache keyed by bit mask (so at most 64 variables).
///
/// `estimated` mean: posterior scatter T = centered scatter plus the
/// alpha_mu shrinkage term, and the (alpha_mu / (alpha_mu + N))^{l/2} factor.
/// `zero` mean: S = sum y y^T, no centering and no alpha_mu factor.
class SubsetScorer {
public:
    enum class Mean { estimated, zero };

    SubsetScorer(const ScatterStats& stats, const BgeHyper& h, Mean mode);
    SubsetScorer(const Matrix& rows, const BgeHyper& h, Mean mode);

    double log_ml(std::uint64_t subset);
    double log_ml(const std::vector<int>& nodes);
    /// log p(x^{node, parents}) - log p(x^{parents})
    double family(int node, const std::vector<int>& parents);

    int dim() const { return static_cast<int>(R_.rows()); }
    int sample_size() const { return N_; }
    /// T or S, depending on the mean mode.
    const Matrix& posterior_scatter() const { return scatter_; }
    std::size_t cache_size() const { return cache_.size(); }

private:
    double compute(std::uint64_t subset) const;

    Matrix R_;
    Matrix scatter_;
    double alpha_w_;
    double alpha_mu_;
    Mean mode_;
    int N_;
    std::unordered_map<std::uint64_t, double> cache_;
};

std::uint64_t subset_mask(const std::vector<int>& nodes);

/// Complete-DAG marginal likelihood of N x n data.
double bge_complete_logml(const Matrix& data, const BgeHyper& h);
double bge_subset_logml(const Matrix& data, const std::vector<int>& subset, const BgeHyper& h);
double bge_dag_logml(const Matrix& data, const StaticDag& g, const BgeHyper& h);
double bge_dag_logml(SubsetScorer& scorer, const StaticDag& g);

/// Regression design for the mean-adjusted model.
///
/// Node i owns the coefficient block [offset(i), offset(i) + width(i)):
/// intercept first, then one coefficient per dynamic parent in ascending
/// parent order. Row i of Z_{t-1} is (1, x_{j,t-1} for j in parents(i)).
class DesignMatrix {
public:
    explicit DesignMatrix(const DynamicGraph& gd);

    int num_nodes() const { return static_cast<int>(offsets_.size()); }
    int kappa() const { return kappa_; }
    int offset(int node) const { return offsets_[node]; }
    int width(int node) const { return static_cast<int>(parents_[node].size()) + 1; }
    const std::vector<int>& parents(int node) const { return parents_[node]; }

    /// z_{i,t-1} for lagged values `lag`.
    Vector row(int node, const Eigen::Ref<const Vector>& lag) const;
    /// Z_{t-1}, n x kappa.
    Matrix block(const Eigen::Ref<const Vector>& lag) const;
    /// Stacked Z over every row of `lagged`, (rows * n) x kappa.
    Matrix dense(const Matrix& lagged) const;
    /// mu_t for every row of `lagged`, rows x n.
    Matrix mean(const Matrix& lagged, const Vector& beta) const;

private:
    std::vector<std::vector<int>> parents_;
    std::vector<int> offsets_;
    int kappa_ = 0;
};

/// y_t = x_t - Z_{t-1} beta for every transition.
Matrix mbge_residuals(const AugmentedData& data, const DynamicGraph& gd, const Vector& beta);
Matrix mbge_residuals(const TimeSeriesData& data, const DynamicGraph& gd, const Vector& beta);

/// Simplified (zero-mean) BGe score of the static DAG on residual rows.
double mbge_static_logml(const Matrix& residuals, const StaticDag& g, const BgeHyper& h);

/// Gaussian posterior of beta given (gd, Sigma), kept in precision form:
/// precision = lambda^{-2} I + Z^T (I kron Sigma)^{-1} Z and
/// rhs = Z^T (I kron Sigma)^{-1} vec(x), so mean = precision^{-1} rhs.
struct BetaPosterior {
    Matrix precision;
    Vector rhs;
    Vector mean;
    Eigen::LLT<Matrix> precision_factor;
    double log_marginal = 0.0;  // log N(vec(x); 0, I kron Sigma + lambda2 Z Z^T)

    Matrix covariance() const;
};

BetaPosterior mbge_beta_posterior(const AugmentedData& data, const DynamicGraph& gd, const Matrix& sigma,
                                  const RegressionPrior& prior);
double mbge_dynamic_logml(const AugmentedData& data, const DynamicGraph& gd, const Matrix& sigma,
                          const RegressionPrior& prior);
double mbge_dynamic_logml(const TimeSeriesData& data, const DynamicGraph& gd, const Matrix& sigma,
                          const RegressionPrior& prior);

struct BetaFcd {
    Vector mean;
    Matrix covariance;
};
BetaFcd mbge_beta_fcd_params(const AugmentedData& data, const DynamicGraph& gd, const Matrix& sigma,
                             const RegressionPrior& prior);

/// Augmented subset marginal: subset indices refer to columns of aug.z.
double ebge_subset_logml(const AugmentedData& aug, const std::vector<int>& subset, const EbgeHyper& h);
double ebge_logml(const AugmentedData& aug, const StaticDag& g, const DynamicGraph& gd, const EbgeHyper& h);
/// Scorer over aug.z with mean mode `estimated`.
double ebge_logml(SubsetScorer& scorer, const StaticDag& g, const DynamicGraph& gd);
/// Family of node i in the augmented graph: static parents plus lagged copies of dynamic parents.
std::vector<int> ebge_family_parents(int node, const StaticDag& g, const DynamicGraph& gd);

}  // namespace gdbn

#endif  // GDBN_SCORES_HPP
