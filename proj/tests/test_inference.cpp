#include <doctest.h>

#include "oracles.hpp"

#include <gdbn/cpdag.hpp>
#include <gdbn/inference.hpp>
#include <gdbn/scores.hpp>
#include <gdbn/simulate.hpp>

#include <algorithm>
#include <cmath>

using namespace gdbn;

namespace {

bool contains(const std::vector<Move>& moves, const Move& m) {
    return std::any_of(moves.begin(), moves.end(),
                       [&](const Move& x) { return x.type == m.type && x.from == m.from && x.to == m.to; });
}

int count_type(const std::vector<Move>& moves, MoveType t) {
    return static_cast<int>(std::count_if(moves.begin(), moves.end(), [&](const Move& m) { return m.type == t; }));
}

TimeSeriesData two_node_series(std::uint64_t seed, int T) {
    Rng rng(seed);
    GroundTruth gt(StaticDag(2, {{0, 1}}), DynamicGraph(2, {{1, 0}}));
    gt.beta_s[{0, 1}] = 0.7;
    gt.beta_d[{1, 0}] = 0.5;
    gt.noise_var = 1.0;
    return standardize(simulate_mbge(gt, T, rng));
}

/// Compares chain visit frequencies with exact probabilities; returns the
/// largest deviation in units of the combined standard error.
template <class State>
double worst_z(const std::vector<State>& samples, const std::vector<double>& exact,
               const std::vector<double>& exact_se) {
    const auto all = oracle::two_node_structures();
    double worst = 0.0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        std::vector<double> hit(samples.size());
        for (std::size_t s = 0; s < samples.size(); ++s)
            hit[s] = oracle::structure_index(all, samples[s].g, samples[s].gd) == static_cast<int>(k);
        const auto est = oracle::batch_means(hit);
        const double se = std::hypot(est.se, exact_se[k]);
        worst = std::max(worst, std::abs(est.mean - exact[k]) / se);
    }
    return worst;
}

}  // namespace

TEST_CASE("McmcConfig validation and retained count") {
    McmcConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.retained_count() == 500);
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.burn_in_fraction = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.thinning = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.move_probabilities = std::array<double, 5>{0.2, 0.2, 0.2, 0.2, 0.1};
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

    cfg = {};
    cfg.iterations = 199;
    cfg.thinning = 100;
    CHECK(cfg.retained_count() == 0);
    cfg.iterations = 1001;
    cfg.burn_in_fraction = 0.3;
    cfg.thinning = 7;
    CHECK(cfg.retained_count() == 100);
}

TEST_CASE("static neighbors") {
    const McmcConfig cfg;
    const auto empty = static_neighbors(StaticDag(2), cfg);
    CHECK(empty.size() == 2);
    CHECK(count_type(empty, MoveType::static_add) == 2);

    const auto full = static_neighbors(StaticDag(3, {{0, 1}, {0, 2}, {1, 2}}), cfg);
    CHECK(count_type(full, MoveType::static_add) == 0);
    CHECK(count_type(full, MoveType::static_delete) == 3);
    // Reversing 0 -> 2 would close the cycle 0 -> 1 -> 2 -> 0.
    CHECK(count_type(full, MoveType::static_reverse) == 2);
    CHECK_FALSE(contains(full, {MoveType::static_reverse, 0, 2}));

    McmcConfig capped;
    capped.max_fan_in = 1;
    const auto c = static_neighbors(StaticDag(3, {{0, 2}}), capped);
    CHECK_FALSE(contains(c, {MoveType::static_add, 1, 2}));
    CHECK(contains(c, {MoveType::static_add, 1, 0}));

    McmcConfig joint;
    joint.forbid_joint_static_dynamic_parent = true;
    const DynamicGraph gd(3, {{1, 2}, {2, 0}});
    const auto j = static_neighbors(StaticDag(3, {{0, 2}}), joint, &gd);
    CHECK_FALSE(contains(j, {MoveType::static_add, 1, 2}));
    CHECK_FALSE(contains(j, {MoveType::static_reverse, 0, 2}));
    CHECK(contains(j, {MoveType::static_add, 2, 1}));
}

TEST_CASE("dynamic neighbors") {
    const McmcConfig cfg;
    CHECK(dynamic_neighbors(DynamicGraph(3), cfg).size() == 6);
    EdgeList all;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            if (a != b) all.push_back({a, b});
    const auto full = dynamic_neighbors(DynamicGraph(3, all), cfg);
    CHECK(full.size() == 6);
    CHECK(count_type(full, MoveType::dynamic_delete) == 6);

    McmcConfig loops = cfg;
    loops.forbid_self_loops = false;
    CHECK(dynamic_neighbors(DynamicGraph(3, true), loops).size() == 9);
    // A graph that cannot hold self-loops never proposes them.
    CHECK(dynamic_neighbors(DynamicGraph(3), loops).size() == 6);

    McmcConfig joint;
    joint.forbid_joint_static_dynamic_parent = true;
    const StaticDag g(3, {{0, 1}});
    const auto j = dynamic_neighbors(DynamicGraph(3), joint, &g);
    CHECK(j.size() == 5);
    CHECK_FALSE(contains(j, {MoveType::dynamic_add, 0, 1}));
}

TEST_CASE("every move has its inverse in the target neighborhood") {
    Rng rng(11);
    for (int rep = 0; rep < 200; ++rep) {
        McmcConfig cfg;
        if (rep % 3 == 1) cfg.max_fan_in = 2;
        if (rep % 3 == 2) cfg.forbid_joint_static_dynamic_parent = true;
        auto [g, gd] = split_static_dynamic(random_dag(6, 7, rng), 3, rng);
        if (cfg.forbid_joint_static_dynamic_parent)
            for (const auto& e : gd.edges())
                if (g.has_edge(e.from, e.to)) gd.remove_edge(e.from, e.to);
        if (cfg.max_fan_in) {
            bool ok = true;
            for (int i = 0; i < 6; ++i) ok = ok && g.parents(i).size() <= 2 && gd.parents(i).size() <= 2;
            if (!ok) continue;
        }
        std::vector<Move> moves = static_neighbors(g, cfg, &gd);
        const auto dyn = dynamic_neighbors(gd, cfg, &g);
        moves.insert(moves.end(), dyn.begin(), dyn.end());
        for (const auto& m : moves) {
            StaticDag g2 = g;
            DynamicGraph gd2 = gd;
            apply_move(m, g2, gd2);
            CHECK(is_acyclic(6, g2.edges()));
            const bool is_static = m.type == MoveType::static_add || m.type == MoveType::static_delete ||
                                   m.type == MoveType::static_reverse;
            const auto back = is_static ? static_neighbors(g2, cfg, &gd2) : dynamic_neighbors(gd2, cfg, &g2);
            CHECK(contains(back, inverse_move(m)));
        }
    }
}

TEST_CASE("mh_accept") {
    Rng rng(12);
    for (int k = 0; k < 1000; ++k) CHECK(mh_accept(-3.0, -3.0, 4, 4, rng));
    CHECK_FALSE(mh_accept(-std::numeric_limits<double>::infinity(), 0.0, 3, 3, rng));

    // p = exp(-1) * 2 / 3
    const double p = std::exp(-1.0) * 2.0 / 3.0;
    const int trials = 200000;
    int hits = 0;
    for (int k = 0; k < trials; ++k) hits += mh_accept(-2.0, -1.0, 2, 3, rng);
    const double se = std::sqrt(p * (1 - p) / trials);
    CHECK(std::abs(hits / double(trials) - p) < 4 * se);
}

TEST_CASE("Sigma draws given a DAG") {
    Rng rng(13);
    const int n = 3;
    const BgeHyper h = BgeHyper::defaults(n);

    SUBCASE("empty DAG gives a diagonal matrix with the right mean") {
        Matrix y = Matrix::Random(40, n);
        const Matrix M = h.R + y.transpose() * y;
        Vector mean = Vector::Zero(n);
        const int draws = 40000;
        for (int k = 0; k < draws; ++k) {
            const Matrix s = sample_sigma_given_dag(StaticDag(n), y, h, rng);
            CHECK((s - Matrix(s.diagonal().asDiagonal())).isZero());
            mean += s.diagonal();
        }
        mean /= draws;
        for (int i = 0; i < n; ++i) CHECK(mean[i] == doctest::Approx(M(i, i) / (h.alpha_w - n + 40 - 1)).epsilon(0.02));
    }
    SUBCASE("complete DAG reproduces the inverse-Wishart mean") {
        Matrix y = Matrix::Random(30, n);
        y.col(1) += 0.8 * y.col(0);
        const Matrix M = h.R + y.transpose() * y;
        const Matrix expected = M / (h.alpha_w + 30 - n - 1);
        for (const auto& g : {StaticDag(n, {{0, 1}, {0, 2}, {1, 2}}), StaticDag(n, {{2, 1}, {2, 0}, {1, 0}})}) {
            Matrix mean = Matrix::Zero(n, n);
            const int draws = 40000;
            for (int k = 0; k < draws; ++k) mean += sample_sigma_given_dag(g, y, h, rng);
            mean /= draws;
            CHECK((mean - expected).cwiseAbs().maxCoeff() < 0.02 * expected.cwiseAbs().maxCoeff());
        }
    }
    SUBCASE("conditional independences of a chain hold exactly") {
        const Matrix y = Matrix::Random(20, n);
        for (int k = 0; k < 100; ++k) {
            const Matrix s = sample_sigma_given_dag(StaticDag(n, {{0, 1}, {1, 2}}), y, h, rng);
            CHECK(checked_cholesky(s, "draw").info() == Eigen::Success);
            CHECK(std::abs(s.inverse()(0, 2)) < 1e-10 * s.inverse().cwiseAbs().maxCoeff());
        }
    }
    SUBCASE("large samples concentrate at the generating covariance") {
        Matrix truth(n, n);
        truth << 1.0, 0.5, 0.25, 0.5, 1.25, 0.625, 0.25, 0.625, 1.3125;  // chain 0 -> 1 -> 2 with b = 0.5
        const Eigen::LLT<Matrix> llt(truth);
        Matrix y(20000, n);
        std::normal_distribution<double> normal;
        for (int r = 0; r < y.rows(); ++r) {
            Vector z(n);
            for (auto& v : z) v = normal(rng);
            y.row(r) = (llt.matrixL() * z).transpose();
        }
        Matrix mean = Matrix::Zero(n, n);
        for (int k = 0; k < 200; ++k) mean += sample_sigma_given_dag(StaticDag(n, {{0, 1}, {1, 2}}), y, h, rng);
        mean /= 200;
        CHECK((mean - truth).cwiseAbs().maxCoeff() < 0.05);
    }
    CHECK_THROWS_AS(sample_sigma_given_dag(StaticDag(2), Matrix::Zero(3, 3), BgeHyper::defaults(2), rng),
                    std::invalid_argument);
}

TEST_CASE("Wishart and Normal-Wishart parameter draws") {
    Rng rng(14);
    Matrix scale(2, 2);
    scale << 2.0, 0.3, 0.3, 0.5;
    Matrix mean = Matrix::Zero(2, 2);
    const int draws = 50000;
    for (int k = 0; k < draws; ++k) mean += sample_wishart(7.0, scale, rng);
    mean /= draws;
    CHECK((mean - 7.0 * scale).cwiseAbs().maxCoeff() < 0.02 * 14.0);

    const int n = 2;
    const EbgeHyper h = EbgeHyper::defaults(n);
    SUBCASE("no transitions gives a prior draw") {
        AugmentedData empty{Matrix(0, 2 * n), n};
        Matrix w = Matrix::Zero(2 * n, 2 * n);
        for (int k = 0; k < draws; ++k) w += sample_ebge_params(empty, h, rng).precision;
        w /= draws;
        CHECK((w - h.alpha_w * h.R.inverse()).cwiseAbs().maxCoeff() < 0.1);
    }
    SUBCASE("the mean shrinks toward the prior location") {
        EbgeHyper shifted = h;
        shifted.nu = Vector::Constant(2 * n, 3.0);
        shifted.alpha_mu = 4.0;
        const AugmentedData aug = to_augmented(TimeSeriesData(Matrix::Random(9, n)));
        const Vector xbar = aug.z.colwise().mean().transpose();
        const Vector expected = (4.0 * shifted.nu + 8.0 * xbar) / 12.0;
        Vector m = Vector::Zero(2 * n);
        for (int k = 0; k < draws; ++k) m += sample_ebge_params(aug, shifted, rng).mean;
        m /= draws;
        CHECK((m - expected).cwiseAbs().maxCoeff() < 0.02);
    }
    SUBCASE("large samples concentrate at the empirical moments") {
        Rng sim(3);
        GroundTruth gt(StaticDag(2, {{0, 1}}), DynamicGraph(2, EdgeList{{1, 0}}));
        gt.beta_s[{0, 1}] = 0.8;
        gt.beta_d[{1, 0}] = 0.4;
        gt.noise_var = 1.0;
        const AugmentedData aug = to_augmented(simulate_ebge(gt, 20000, sim));
        const Matrix c = aug.z.rowwise() - aug.z.colwise().mean();
        const Matrix cov = c.transpose() * c / aug.num_rows();
        const auto p = sample_ebge_params(aug, h, rng);
        CHECK((p.precision.inverse() - cov).cwiseAbs().maxCoeff() < 0.05 * cov.cwiseAbs().maxCoeff());
        CHECK((p.mean - aug.z.colwise().mean().transpose()).cwiseAbs().maxCoeff() < 0.05);
    }
}

TEST_CASE("chains are reproducible and keep their invariants") {
    Rng sim(15);
    const auto gt = sample_ground_truth(4, 5, 2, sim);
    const auto data = standardize(simulate_mbge(gt, 40, sim));
    McmcConfig cfg;
    cfg.iterations = 3000;
    cfg.thinning = 10;

    Rng a(99), b(99);
    const auto m1 = run_mbge_chain(data, BgeHyper::defaults(4), {}, cfg, a);
    const auto m2 = run_mbge_chain(data, BgeHyper::defaults(4), {}, cfg, b);
    CHECK(m1.trace == m2.trace);
    REQUIRE(m1.samples.size() == 150);
    CHECK(m1.sample_iterations.front() == 1510);
    CHECK(m1.sample_iterations.back() == 3000);
    CHECK(m1.acceptance.total_proposed() == 2 * cfg.iterations);
    CHECK(m1.duration_ms >= 0.0);
    for (std::size_t k = 0; k < m1.samples.size(); ++k) {
        const auto& s = m1.samples[k];
        CHECK(s.g == m2.samples[k].g);
        CHECK(s.beta == m2.samples[k].beta);
        CHECK(is_acyclic(4, s.g.edges()));
        CHECK(s.beta.size() == DesignMatrix(s.gd).kappa());
        CHECK(Eigen::LLT<Matrix>(s.sigma).info() == Eigen::Success);
        for (int i = 0; i < 4; ++i) CHECK_FALSE(s.gd.has_edge(i, i));
    }

    Rng c(7), d(7);
    const auto e1 = run_ebge_chain(data, EbgeHyper::defaults(4), cfg, c);
    const auto e2 = run_ebge_chain(data, EbgeHyper::defaults(4), cfg, d);
    CHECK(e1.trace == e2.trace);
    CHECK(e1.acceptance.total_proposed() == cfg.iterations);
    CHECK(e1.acceptance.total_accepted() <= cfg.iterations);
    for (const auto& s : e1.samples)
        CHECK(s.g.edges().size() + s.gd.edges().size() <= 4 * 3 + 4 * 3);
}

TEST_CASE("constraints hold along the chain") {
    Rng sim(16);
    const auto data = standardize(simulate_ebge(sample_ground_truth(4, 6, 2, sim), 60, sim));
    McmcConfig cfg;
    cfg.iterations = 4000;
    cfg.thinning = 1;
    cfg.max_fan_in = 1;
    cfg.forbid_joint_static_dynamic_parent = true;
    cfg.forbid_self_loops = false;
    Rng rng(1);
    bool saw_loop = false;
    for (const auto& s : run_ebge_chain(data, EbgeHyper::defaults(4), cfg, rng).samples)
        for (int i = 0; i < 4; ++i) {
            CHECK(s.g.parents(i).size() <= 1);
            CHECK(s.gd.parents(i).size() <= 1);
            for (int j : s.g.parents(i)) CHECK_FALSE(s.gd.has_edge(j, i));
            saw_loop = saw_loop || s.gd.has_edge(i, i);
        }
    CHECK(saw_loop);
}

TEST_CASE("a single transition still gives finite scores") {
    Matrix x(2, 3);
    x << 0.1, -0.4, 1.0, 0.7, 0.2, -1.1;
    McmcConfig cfg;
    cfg.iterations = 500;
    cfg.thinning = 5;
    Rng rng(2);
    const auto out = run_ebge_chain(TimeSeriesData(x), EbgeHyper::defaults(3), cfg, rng);
    CHECK(std::all_of(out.trace.begin(), out.trace.end(), [](double v) { return std::isfinite(v); }));
    CHECK(out.samples.size() == 50);
}

TEST_CASE("eBGe chain targets the enumerated posterior") {
    const auto data = two_node_series(21, 12);
    const EbgeHyper h = EbgeHyper::defaults(2);
    const AugmentedData aug = to_augmented(data);
    std::vector<double> logs;
    for (const auto& s : oracle::two_node_structures()) logs.push_back(ebge_logml(aug, s.g, s.gd, h));
    const auto exact = oracle::normalize_logs(logs);
    const std::vector<double> no_error(exact.size(), 0.0);

    McmcConfig cfg;
    cfg.iterations = 300000;
    cfg.burn_in_fraction = 0.01;
    cfg.thinning = 1;
    Rng rng(5);
    CHECK(worst_z(run_ebge_chain(data, h, cfg, rng).samples, exact, no_error) < 3.0);

    // A non-uniform move-type mix must leave the target unchanged.
    cfg.move_probabilities = std::array<double, 5>{0.4, 0.1, 0.2, 0.25, 0.05};
    Rng rng2(6);
    CHECK(worst_z(run_ebge_chain(data, h, cfg, rng2).samples, exact, no_error) < 3.0);
}

TEST_CASE("mBGe chain targets the structure marginal") {
    const auto data = two_node_series(22, 12);
    const BgeHyper h = BgeHyper::defaults(2);
    const AugmentedData aug = to_augmented(data);
    const auto all = oracle::two_node_structures();
    std::vector<double> logs, rel;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const auto est = oracle::is_mbge_structure_marginal(aug, all[k].g, all[k].gd, h.alpha_w, 1.0, 100000, 500 + k);
        logs.push_back(est.log_value);
        rel.push_back(est.log_se);
    }
    const auto exact = oracle::normalize_logs(logs);
    std::vector<double> se(exact.size());
    for (std::size_t k = 0; k < exact.size(); ++k) {
        double var = 0.0;
        for (std::size_t j = 0; j < exact.size(); ++j) {
            const double d = (j == k ? 1.0 - exact[k] : -exact[j]) * rel[j];
            var += d * d;
        }
        se[k] = exact[k] * std::sqrt(var);
    }

    McmcConfig cfg;
    cfg.iterations = 200000;
    cfg.burn_in_fraction = 0.01;
    cfg.thinning = 1;
    Rng rng(8);
    CHECK(worst_z(run_mbge_chain(data, h, {}, cfg, rng).samples, exact, se) < 3.0);
}
