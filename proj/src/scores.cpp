#include <gdbn/scores.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gdbn {

namespace {

const double kLogPi = std::log(std::numbers::pi);
const double kLog2Pi = std::log(2.0 * std::numbers::pi);

}  // namespace

void BgeHyper::validate() const {
    const int d = dim();
    if (d < 1 || R.cols() != d) throw std::invalid_argument("BGe prior: R must be a non-empty square matrix");
    if (nu.size() != d) throw std::invalid_argument("BGe prior: nu must have length " + std::to_string(d));
    if (!(alpha_w > d - 1)) throw std::invalid_argument("BGe prior: alpha_w must exceed " + std::to_string(d - 1));
    if (!(alpha_mu > 0.0)) throw std::invalid_argument("BGe prior: alpha_mu must be positive");
    if (!R.allFinite() || !nu.allFinite()) throw std::invalid_argument("BGe prior: non-finite entries");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10 * R.cwiseAbs().maxCoeff())
        throw std::invalid_argument("BGe prior: R is not symmetric");
    try {
        checked_cholesky(R, "R");
    } catch (const DegenerateMatrixError&) {
        throw std::invalid_argument("BGe prior: R is not positive definite");
    }
}

BgeHyper BgeHyper::defaults(int dim) {
    return BgeHyper{dim + 2.0, 1.0, Matrix::Identity(dim, dim), Vector::Zero(dim)};
}

EbgeHyper EbgeHyper::defaults(int n) {
    EbgeHyper h;
    static_cast<BgeHyper&>(h) = BgeHyper::defaults(2 * n);
    return h;
}

void RegressionPrior::validate() const {
    if (!(lambda2 > 0.0) || !std::isfinite(lambda2)) throw std::invalid_argument("regression prior: lambda2 must be positive");
}

double log_multigamma(int l, double a) {
    if (l < 0) throw std::domain_error("log_multigamma: negative dimension");
    if (!(a > 0.5 * (l - 1))) throw std::domain_error("log_multigamma: argument below (l-1)/2");
    double out = 0.25 * l * (l - 1) * kLogPi;
    for (int j = 1; j <= l; ++j) out += std::lgamma(a + 0.5 * (1 - j));
    return out;
}

// ---------------------------------------------------------------------------

ScatterStats::ScatterStats(int dim) : sum_(Vector::Zero(dim)), cross_(Matrix::Zero(dim, dim)) {}

ScatterStats::ScatterStats(const Matrix& rows) : count_(static_cast<int>(rows.rows())) {
    sum_ = rows.colwise().sum().transpose();
    cross_ = rows.transpose() * rows;
}

void ScatterStats::add_row(const Eigen::Ref<const Vector>& x) {
    if (x.size() != dim()) throw std::invalid_argument("ScatterStats: row length mismatch");
    ++count_;
    sum_ += x;
    cross_.noalias() += x * x.transpose();
}

void ScatterStats::remove_row(const Eigen::Ref<const Vector>& x) {
    if (x.size() != dim()) throw std::invalid_argument("ScatterStats: row length mismatch");
    if (count_ == 0) throw std::logic_error("ScatterStats: removing from empty statistics");
    --count_;
    sum_ -= x;
    cross_.noalias() -= x * x.transpose();
}

Vector ScatterStats::mean() const {
    if (count_ == 0) return Vector::Zero(dim());
    return sum_ / static_cast<double>(count_);
}

Matrix ScatterStats::centered_scatter() const {
    if (count_ == 0) return Matrix::Zero(dim(), dim());
    const Vector m = mean();
    Matrix out = cross_ - static_cast<double>(count_) * m * m.transpose();
    return 0.5 * (out + out.transpose());
}

// ---------------------------------------------------------------------------

std::uint64_t subset_mask(const std::vector<int>& nodes) {
    std::uint64_t mask = 0;
    for (int v : nodes) {
        if (v < 0 || v >= 64) throw std::out_of_range("subset index outside 0..63");
        mask |= std::uint64_t{1} << v;
    }
    return mask;
}

SubsetScorer::SubsetScorer(const ScatterStats& stats, const BgeHyper& h, Mean mode)
    : R_(h.R), alpha_w_(h.alpha_w), alpha_mu_(h.alpha_mu), mode_(mode), N_(stats.count()) {
    h.validate();
    if (stats.dim() != h.dim()) throw std::invalid_argument("SubsetScorer: data and prior dimensions differ");
    if (h.dim() > 64) throw std::invalid_argument("SubsetScorer: at most 64 variables");
    if (mode == Mean::zero) {
        scatter_ = stats.raw_scatter();
    } else {
        scatter_ = stats.centered_scatter();
        if (N_ > 0) {
            const Vector d = h.nu - stats.mean();
            scatter_ += (alpha_mu_ * N_ / (alpha_mu_ + N_)) * d * d.transpose();
        }
    }
}

SubsetScorer::SubsetScorer(const Matrix& rows, const BgeHyper& h, Mean mode)
    : SubsetScorer(ScatterStats(rows), h, mode) {
    // Two-pass centering is more accurate than the running sums.
    if (mode == Mean::estimated && N_ > 0) {
        const Vector m = rows.colwise().mean().transpose();
        const Matrix c = rows.rowwise() - m.transpose();
        const Vector d = h.nu - m;
        scatter_ = c.transpose() * c + (alpha_mu_ * N_ / (alpha_mu_ + N_)) * d * d.transpose();
    }
}

double SubsetScorer::log_ml(std::uint64_t subset) {
    if (subset == 0) return 0.0;
    auto it = cache_.find(subset);
    if (it != cache_.end()) return it->second;
    const double v = compute(subset);
    cache_.emplace(subset, v);
    return v;
}

double SubsetScorer::log_ml(const std::vector<int>& nodes) {
    for (int v : nodes)
        if (v >= dim()) throw std::out_of_range("subset index outside the data dimension");
    return log_ml(subset_mask(nodes));
}

double SubsetScorer::family(int node, const std::vector<int>& parents) {
    const std::uint64_t pa = subset_mask(parents);
    return log_ml(pa | (std::uint64_t{1} << node)) - log_ml(pa);
}

double SubsetScorer::compute(std::uint64_t subset) const {
    std::vector<int> idx;
    for (int v = 0; v < dim(); ++v)
        if ((subset >> v) & 1U) idx.push_back(v);
    if (idx.size() != static_cast<std::size_t>(__builtin_popcountll(subset)))
        throw std::out_of_range("subset index outside the data dimension");
    const int l = static_cast<int>(idx.size());
    const double N = N_;
    const double a = alpha_w_ - dim() + l;
    const Matrix r = principal_submatrix(R_, idx);
    const Matrix rt = r + principal_submatrix(scatter_, idx);
    double out = -0.5 * l * N * kLogPi;
    if (mode_ == Mean::estimated) out += 0.5 * l * std::log(alpha_mu_ / (alpha_mu_ + N));
    out += log_multigamma(l, 0.5 * (a + N)) - log_multigamma(l, 0.5 * a);
    out += 0.5 * a * log_det_spd(r, "R subset") - 0.5 * (a + N) * log_det_spd(rt, "R + T subset");
    return out;
}

// ---------------------------------------------------------------------------

double bge_complete_logml(const Matrix& data, const BgeHyper& h) {
    std::vector<int> all(h.dim());
    for (int i = 0; i < h.dim(); ++i) all[i] = i;
    return bge_subset_logml(data, all, h);
}

double bge_subset_logml(const Matrix& data, const std::vector<int>& subset, const BgeHyper& h) {
    if (data.cols() != h.dim()) throw std::invalid_argument("bge_subset_logml: data and prior dimensions differ");
    SubsetScorer scorer(data, h, SubsetScorer::Mean::estimated);
    return scorer.log_ml(subset);
}

double bge_dag_logml(SubsetScorer& scorer, const StaticDag& g) {
    if (g.num_nodes() != scorer.dim()) throw std::invalid_argument("bge_dag_logml: graph and data dimensions differ");
    double out = 0.0;
    for (int i = 0; i < g.num_nodes(); ++i) out += scorer.family(i, g.parents(i));
    return out;
}

double bge_dag_logml(const Matrix& data, const StaticDag& g, const BgeHyper& h) {
    SubsetScorer scorer(data, h, SubsetScorer::Mean::estimated);
    return bge_dag_logml(scorer, g);
}

// ---------------------------------------------------------------------------

DesignMatrix::DesignMatrix(const DynamicGraph& gd) {
    const int n = gd.num_nodes();
    parents_.resize(n);
    offsets_.resize(n);
    for (int i = 0; i < n; ++i) {
        parents_[i] = gd.parents(i);
        offsets_[i] = kappa_;
        kappa_ += width(i);
    }
}

Vector DesignMatrix::row(int node, const Eigen::Ref<const Vector>& lag) const {
    Vector z(width(node));
    z[0] = 1.0;
    for (std::size_t k = 0; k < parents_[node].size(); ++k) z[k + 1] = lag[parents_[node][k]];
    return z;
}

Matrix DesignMatrix::block(const Eigen::Ref<const Vector>& lag) const {
    Matrix out = Matrix::Zero(num_nodes(), kappa_);
    for (int i = 0; i < num_nodes(); ++i) out.row(i).segment(offsets_[i], width(i)) = row(i, lag).transpose();
    return out;
}

Matrix DesignMatrix::dense(const Matrix& lagged) const {
    const int n = num_nodes();
    Matrix out(lagged.rows() * n, kappa_);
    for (Eigen::Index t = 0; t < lagged.rows(); ++t) out.middleRows(t * n, n) = block(lagged.row(t).transpose());
    return out;
}

Matrix DesignMatrix::mean(const Matrix& lagged, const Vector& beta) const {
    if (beta.size() != kappa_) throw std::invalid_argument("coefficient vector length does not match the design");
    if (lagged.cols() != num_nodes()) throw std::invalid_argument("lagged data width does not match the design");
    const int n = num_nodes();
    Matrix mu(lagged.rows(), n);
    for (int i = 0; i < n; ++i) {
        const auto b = beta.segment(offsets_[i], width(i));
        mu.col(i).setConstant(b[0]);
        for (std::size_t k = 0; k < parents_[i].size(); ++k) mu.col(i) += b[k + 1] * lagged.col(parents_[i][k]);
    }
    return mu;
}

Matrix mbge_residuals(const AugmentedData& data, const DynamicGraph& gd, const Vector& beta) {
    if (gd.num_nodes() != data.slice_size) throw std::invalid_argument("mbge_residuals: graph and data dimensions differ");
    const DesignMatrix design(gd);
    return data.current() - design.mean(data.lagged(), beta);
}

Matrix mbge_residuals(const TimeSeriesData& data, const DynamicGraph& gd, const Vector& beta) {
    return mbge_residuals(to_augmented(data), gd, beta);
}

double mbge_static_logml(const Matrix& residuals, const StaticDag& g, const BgeHyper& h) {
    SubsetScorer scorer(residuals, h, SubsetScorer::Mean::zero);
    return bge_dag_logml(scorer, g);
}

Matrix BetaPosterior::covariance() const {
    return precision_factor.solve(Matrix::Identity(precision.rows(), precision.cols()));
}

BetaPosterior mbge_beta_posterior(const AugmentedData& data, const DynamicGraph& gd, const Matrix& sigma,
                                  const RegressionPrior& prior) {
    prior.validate();
    const int n = data.slice_size;
    if (gd.num_nodes() != n || sigma.rows() != n || sigma.cols() != n)
        throw std::invalid_argument("mbge_beta_posterior: dimension mismatch");
    const auto sigma_llt = checked_cholesky(sigma, "Sigma");
    const Matrix prec = sigma_llt.solve(Matrix::Identity(n, n));
    const DesignMatrix design(gd);
    const int kappa = design.kappa();
    const int T = data.num_rows();

    BetaPosterior post;
    post.precision = Matrix::Identity(kappa, kappa) / prior.lambda2;
    post.rhs = Vector::Zero(kappa);
    double quad = 0.0;
    const Matrix x = data.current();
    const Matrix lag = data.lagged();
    std::vector<Vector> z(n);
    // One pass over time: Z_t^T Sigma^{-1} Z_t has block (i, j) = prec(i, j) z_i z_j^T.
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) z[i] = design.row(i, lag.row(t).transpose());
        const Vector px = prec * x.row(t).transpose();
        quad += x.row(t).dot(px);
        for (int i = 0; i < n; ++i) {
            post.rhs.segment(design.offset(i), design.width(i)) += px[i] * z[i];
            for (int j = 0; j < n; ++j)
                post.precision.block(design.offset(i), design.offset(j), design.width(i), design.width(j)).noalias() +=
                    prec(i, j) * z[i] * z[j].transpose();
        }
    }
    post.precision = 0.5 * (post.precision + post.precision.transpose());
    post.precision_factor = checked_cholesky(post.precision, "beta posterior precision");
    post.mean = post.precision_factor.solve(post.rhs);

    const double logdet_sigma = 2.0 * sigma_llt.matrixLLT().diagonal().array().log().sum();
    const double logdet_c = 2.0 * post.precision_factor.matrixLLT().diagonal().array().log().sum();
    const double logdet = T * logdet_sigma + kappa * std::log(prior.lambda2) + logdet_c;
    const double quad_form = quad - post.rhs.dot(post.mean);
    post.log_marginal = -0.5 * (static_cast<double>(T) * n * kLog2Pi + logdet + quad_form);
    return post;
}

double mbge_dynamic_logml(const AugmentedData& data, const DynamicGraph& gd, const Matrix& sigma,
                          const RegressionPrior& prior) {
    return mbge_beta_posterior(data, gd, sigma, prior).log_marginal;
}

double mbge_dynamic_logml(const TimeSeriesData& data, const DynamicGraph& gd, const Matrix& sigma,
                          const RegressionPrior& prior) {
    return mbge_dynamic_logml(to_augmented(data), gd, sigma, prior);
}

BetaFcd mbge_beta_fcd_params(const AugmentedData& data, const DynamicGraph& gd, const Matrix& sigma,
                             const RegressionPrior& prior) {
    const auto post = mbge_beta_posterior(data, gd, sigma, prior);
    return {post.mean, post.covariance()};
}

// ---------------------------------------------------------------------------

std::vector<int> ebge_family_parents(int node, const StaticDag& g, const DynamicGraph& gd) {
    std::vector<int> out = g.parents(node);
    for (int j : gd.parents(node)) out.push_back(g.num_nodes() + j);
    return out;
}

double ebge_logml(SubsetScorer& scorer, const StaticDag& g, const DynamicGraph& gd) {
    const int n = g.num_nodes();
    if (gd.num_nodes() != n || scorer.dim() != 2 * n)
        throw std::invalid_argument("ebge_logml: graph and data dimensions differ");
    double out = 0.0;
    for (int i = 0; i < n; ++i) out += scorer.family(i, ebge_family_parents(i, g, gd));
    return out;
}

double ebge_subset_logml(const AugmentedData& aug, const std::vector<int>& subset, const EbgeHyper& h) {
    if (aug.z.cols() != h.dim()) throw std::invalid_argument("ebge_subset_logml: data and prior dimensions differ");
    SubsetScorer scorer(aug.z, h, SubsetScorer::Mean::estimated);
    return scorer.log_ml(subset);
}

double ebge_logml(const AugmentedData& aug, const StaticDag& g, const DynamicGraph& gd, const EbgeHyper& h) {
    if (aug.z.cols() != h.dim()) throw std::invalid_argument("ebge_logml: data and prior dimensions differ");
    SubsetScorer scorer(aug.z, h, SubsetScorer::Mean::estimated);
    return ebge_logml(scorer, g, gd);
}

}  // namespace gdbn
