#ifndef LUMPKIT_REPORT_HPP
#define LUMPKIT_REPORT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lumpkit/entropy.hpp"
#include "lumpkit/lumpability.hpp"
#include "lumpkit/model.hpp"

namespace lumpkit {

inline constexpr int kReportSchemaVersion = 1;

struct AnalysisConfig {
    std::vector<int> horizons{1, 2, 3, 4, 5, 6};
    std::vector<int> sfs_orders{2, 3, 4};
    std::vector<int> strong_orders{1, 2, 3};
    std::vector<int> weak_orders{1, 2, 3};
    int weak_horizon = 6;
    double tol = kLumpabilityTolerance;
    // Blackwell estimate only when set
    std::optional<BlackwellConfig> blackwell;
    EnumerationLimits limits;
};

struct AnalysisReport {
    int schema_version = kReportSchemaVersion;
    std::string model_name;
    std::vector<std::string> states;
    std::vector<std::string> blocks;

    // nullopt means infinity
    std::optional<std::size_t> kappa;
    std::size_t kappa_depth_cap = 0;
    std::optional<SplitMergeWitness> kappa_witness;
    bool se = false;
    std::map<int, bool> sfs;
    std::map<int, bool> strong;
    std::map<int, WeakVerdict> weak;
    double chain_rate = 0.0;
    std::vector<EntropyBounds> bounds;
    // at the largest horizon
    std::optional<LossInterval> loss_interval;
    std::optional<LossBound> loss_bound;
    std::optional<BlackwellEstimate> blackwell;

    bool operator==(const AnalysisReport&) const = default;
};

AnalysisReport run_analysis(const Model& model, const AnalysisConfig& config = {});

enum class ReportFormat { Human, Json };

nlohmann::json report_to_json(const AnalysisReport& report);
// throws Error(ParseError) on schema mismatch
AnalysisReport report_from_json(const nlohmann::json& doc);
std::string format_report(const AnalysisReport& report, ReportFormat format);

// pieces shared with the command-line front end
nlohmann::json witness_to_json(const SplitMergeWitness& witness, const std::vector<std::string>& states,
                               const std::vector<std::string>& blocks);
SplitMergeWitness witness_from_json(const nlohmann::json& doc, const std::vector<std::string>& states,
                                    const std::vector<std::string>& blocks);
nlohmann::json loss_bound_to_json(const LossBound& bound, const std::vector<std::string>& states,
                                  const std::vector<std::string>& blocks);
nlohmann::json verdict_to_json(const LumpabilityVerdict& verdict, const std::vector<std::string>& states,
                               const std::vector<std::string>& blocks);
nlohmann::json blackwell_to_json(const BlackwellEstimate& estimate);

// "a-b-c"
std::string join_labels(const StateWord& word, const std::vector<std::string>& labels,
                        const std::string& sep = "-");

} // namespace lumpkit

#endif
