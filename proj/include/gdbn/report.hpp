#ifndef GDBN_REPORT_HPP
#define GDBN_REPORT_HPP

#include <gdbn/evaluate.hpp>
#include <gdbn/inference.hpp>
#include <gdbn/simulate.hpp>

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace gdbn {

using Json = nlohmann::ordered_json;

inline constexpr int kFormatVersion = 1;

Json config_to_json(const McmcConfig& cfg);
/// Overlays the keys present in `j` on `base`. Unknown keys are rejected so
/// that a misspelt option does not silently fall back to its default.
McmcConfig config_from_json(const Json& j, McmcConfig base = {});

Json edges_to_json(const EdgeList& edges);  // 1-based pairs
EdgeList edges_from_json(const Json& j, int n);

/// Chain document: format_version, model, config echo, node count, retained
/// samples with their iteration numbers, the score trace every
/// `trace_stride` iterations and the acceptance counters. Wall-clock time is
/// left out so that reruns produce identical bytes.
Json chain_to_json(const ChainOutput<MbgeState>& chain, const McmcConfig& cfg, int num_nodes, int trace_stride = 1);
Json chain_to_json(const ChainOutput<EbgeState>& chain, const McmcConfig& cfg, int num_nodes, int trace_stride = 1);

struct ChainDocument {
    Model model = Model::mbge;
    int num_nodes = 0;
    std::vector<StructureSample> samples;
};
ChainDocument chain_from_json(const Json& j);

Json acceptance_to_json(const AcceptanceStats& stats);

/// CSV writers; doubles use the shortest round-trip representation.
std::string format_double_exact(double v);
void write_edge_posteriors_csv(std::ostream& out, const EdgePosterior& p);
void write_pr_curve_csv(std::ostream& out, const std::string& scope, const PrResult& r);
void write_shd_csv(std::ostream& out, const ShdStudyResult& r);
void write_shd_values_csv(std::ostream& out, const ShdStudyResult& r);
void write_predictive_csv(std::ostream& out, const PredictiveResult& r);

/// Distinct CPDAGs of a sample sequence with their visit counts, most
/// frequent first; ties keep first-visit order.
struct CpdagCount {
    Cpdag cpdag;
    int count = 0;
    int first_index = 0;
};
std::vector<CpdagCount> summarize_cpdags(const std::vector<Cpdag>& cpdags);
void write_cpdag_summary_csv(std::ostream& out, const std::vector<CpdagCount>& summary);

}  // namespace gdbn

#endif  // GDBN_REPORT_HPP
