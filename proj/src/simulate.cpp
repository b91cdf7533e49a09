#include <gdbn/cpdag.hpp>
#include <gdbn/graph_io.hpp>
#include <gdbn/simulate.hpp>

#include <random>
#include <stdexcept>

namespace gdbn {

GroundTruth::GroundTruth(StaticDag g_, DynamicGraph gd_)
    : g(std::move(g_)), gd(std::move(gd_)) {
    const int n = g.num_nodes();
    mu_s = Vector::Zero(n);
    mu_d = Vector::Zero(n);
    beta0 = Vector::Zero(n);
}

void GroundTruth::validate() const {
    const int n = g.num_nodes();
    if (gd.num_nodes() != n) throw std::invalid_argument("ground truth: static and dynamic graphs differ in size");
    if (mu_s.size() != n || mu_d.size() != n || beta0.size() != n)
        throw std::invalid_argument("ground truth: mean vectors must have one entry per node");
    if (!(noise_var > 0.0)) throw std::invalid_argument("ground truth: noise variance must be positive");
    auto keyed_by = [](const std::map<Edge, double>& coef, const EdgeList& edges) {
        if (coef.size() != edges.size()) return false;
        for (const auto& e : edges)
            if (!coef.count(e)) return false;
        return true;
    };
    if (!keyed_by(beta_s, g.edges())) throw std::invalid_argument("ground truth: static coefficients do not match the edges");
    if (!keyed_by(beta_d, gd.edges())) throw std::invalid_argument("ground truth: dynamic coefficients do not match the edges");
}

GroundTruth sample_ground_truth(int n, int m, int x_static, Rng& rng) {
    if (x_static < 0 || x_static > m) throw std::invalid_argument("static edge count must lie in [0, edges]");
    auto [g, gd] = split_static_dynamic(random_dag(n, m, rng), x_static, rng);
    GroundTruth gt(std::move(g), std::move(gd));
    std::uniform_real_distribution<double> magnitude(0.5, 2.0);
    std::bernoulli_distribution negative(0.5);
    auto draw = [&]() {
        const double b = magnitude(rng);
        return negative(rng) ? -b : b;
    };
    for (const auto& e : gt.g.edges()) gt.beta_s[e] = draw();
    for (const auto& e : gt.gd.edges()) gt.beta_d[e] = draw();
    return gt;
}

Matrix draw_noise(int T, int n, double var, Rng& rng) {
    if (T < 0) throw std::invalid_argument("negative series length");
    std::normal_distribution<double> normal(0.0, std::sqrt(var));
    Matrix out(T, n);
    for (int t = 0; t < T; ++t)
        for (int i = 0; i < n; ++i) out(t, i) = normal(rng);
    return out;
}

TimeSeriesData simulate_ebge(const GroundTruth& gt, const Matrix& noise) {
    gt.validate();
    const int n = gt.num_nodes();
    const int T = static_cast<int>(noise.rows());
    if (noise.cols() != n) throw std::invalid_argument("noise width does not match the network");
    const auto order = gt.g.topological_order();
    Matrix x(T, n);
    for (int t = 0; t < T; ++t) {
        for (int i : order) {
            double v = gt.mu_s[i] + noise(t, i);
            for (int j : gt.g.parents(i)) v += gt.beta_s.at({j, i}) * (x(t, j) - gt.mu_s[j]);
            if (t > 0)
                for (int k : gt.gd.parents(i)) v += gt.beta_d.at({k, i}) * (x(t - 1, k) - gt.mu_d[k]);
            x(t, i) = v;
        }
    }
    if (!x.allFinite()) throw std::overflow_error("simulated series overflowed; the dynamics are explosive at this length");
    return TimeSeriesData(std::move(x));
}

TimeSeriesData simulate_ebge(const GroundTruth& gt, int T, Rng& rng) {
    if (T < 2) throw std::invalid_argument("series length must be at least 2");
    return simulate_ebge(gt, draw_noise(T, gt.num_nodes(), gt.noise_var, rng));
}

MbgeSimulation simulate_mbge_detailed(const GroundTruth& gt, const Matrix& noise) {
    gt.validate();
    const int n = gt.num_nodes();
    const int T = static_cast<int>(noise.rows());
    if (noise.cols() != n) throw std::invalid_argument("noise width does not match the network");
    const auto order = gt.g.topological_order();
    MbgeSimulation out{Matrix(T, n), Matrix(T, n), Matrix::Zero(T, n)};
    for (int t = 0; t < T; ++t)
        for (int i : order) {
            double v = noise(t, i);
            for (int j : gt.g.parents(i)) v += gt.beta_s.at({j, i}) * out.y(t, j);
            out.y(t, i) = v;
        }
    for (int t = 1; t < T; ++t)
        for (int i = 0; i < n; ++i) {
            double m = gt.beta0[i];
            for (int k : gt.gd.parents(i)) m += gt.beta_d.at({k, i}) * out.y(t - 1, k);
            out.mu(t, i) = m;
        }
    out.x = out.y + out.mu;
    if (!out.x.allFinite()) throw std::overflow_error("simulated series overflowed");
    return out;
}

TimeSeriesData simulate_mbge(const GroundTruth& gt, int T, Rng& rng) {
    if (T < 2) throw std::invalid_argument("series length must be at least 2");
    return TimeSeriesData(simulate_mbge_detailed(gt, draw_noise(T, gt.num_nodes(), gt.noise_var, rng)).x);
}

Model parse_model(const std::string& name) {
    if (name == "mbge") return Model::mbge;
    if (name == "ebge") return Model::ebge;
    throw std::invalid_argument("unknown model '" + name + "' (expected mbge or ebge)");
}

std::string model_name(Model model) { return model == Model::mbge ? "mbge" : "ebge"; }

TimeSeriesData simulate_experiments(Model model, const GroundTruth& gt, const std::vector<int>& lengths, Rng& rng) {
    std::vector<TimeSeriesData> parts;
    for (int T : lengths)
        parts.push_back(model == Model::mbge ? simulate_mbge(gt, T, rng) : simulate_ebge(gt, T, rng));
    return concatenate(parts);
}

std::string format_ground_truth(const GroundTruth& gt) {
    return format_structure(gt.g, gt.gd, &gt.beta_s, &gt.beta_d);
}

GroundTruth read_ground_truth(const std::string& path) {
    auto file = read_structure_file(path);
    GroundTruth gt(file.g, file.gd);
    gt.beta_s = file.static_coefficients;
    gt.beta_d = file.dynamic_coefficients;
    return gt;
}

}  // namespace gdbn
