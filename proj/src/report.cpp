#include "lumpkit/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace lumpkit {

using nlohmann::json;

namespace {

std::size_t index_in(const std::vector<std::string>& labels, const std::string& label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw Error(ErrorCode::ParseError, "unknown label '" + label + "' in report");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

std::vector<std::string> labels_of(const StateWord& word, const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    for (auto i : word) {
        out.push_back(labels.at(i));
    }
    return out;
}

StateWord indices_of(const json& array, const std::vector<std::string>& labels) {
    StateWord out;
    for (const auto& label : array) {
        out.push_back(index_in(labels, label.get<std::string>()));
    }
    return out;
}

template <class V>
json keyed(const std::map<int, V>& values) {
    json out = json::object();
    for (const auto& [k, v] : values) {
        out[std::to_string(k)] = v;
    }
    return out;
}

std::string fixed(double v, int digits = 7) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

} // namespace

std::string join_labels(const StateWord& word, const std::vector<std::string>& labels, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += labels.at(word[i]);
    }
    return out;
}

json witness_to_json(const SplitMergeWitness& witness, const std::vector<std::string>& states,
                     const std::vector<std::string>& blocks) {
    return {{"kappa", witness.kappa},
            {"check_state", states.at(witness.check_state)},
            {"hat_state", states.at(witness.hat_state)},
            {"lumped_word", labels_of(witness.lumped_word, blocks)},
            {"path_a", labels_of(witness.path_a, states)},
            {"path_b", labels_of(witness.path_b, states)}};
}

SplitMergeWitness witness_from_json(const json& doc, const std::vector<std::string>& states,
                                    const std::vector<std::string>& blocks) {
    SplitMergeWitness w;
    w.kappa = doc.at("kappa").get<std::size_t>();
    w.check_state = index_in(states, doc.at("check_state").get<std::string>());
    w.hat_state = index_in(states, doc.at("hat_state").get<std::string>());
    w.lumped_word = indices_of(doc.at("lumped_word"), blocks);
    w.path_a = indices_of(doc.at("path_a"), states);
    w.path_b = indices_of(doc.at("path_b"), states);
    return w;
}

json loss_bound_to_json(const LossBound& bound, const std::vector<std::string>& states,
                        const std::vector<std::string>& blocks) {
    return {{"witness", witness_to_json(bound.witness, states, blocks)},
            {"loss_entropy", bound.loss_entropy},
            {"alpha", bound.alpha},
            {"rate_lower_bound", bound.rate_lower_bound},
            {"growth_constant", bound.growth_constant},
            {"ambiguous_paths", bound.ambiguous_paths}};
}

json verdict_to_json(const LumpabilityVerdict& verdict, const std::vector<std::string>& states,
                     const std::vector<std::string>& blocks) {
    json out = {{"k", verdict.order_k}};
    if (verdict.strong) {
        out["strong"] = *verdict.strong;
        out["entropy_given_state"] = *verdict.entropy_given_state;
        out["entropy_given_block"] = *verdict.entropy_given_block;
        out["entropy_agrees"] = *verdict.entropy_agrees;
    }
    if (verdict.weak) {
        out["weak"] = {{"verdict", verdict.weak->verdict}, {"horizon", verdict.weak->horizon}};
        out["conditional_entropies"] = verdict.conditional_entropies;
    }
    if (verdict.witness) {
        const auto& w = *verdict.witness;
        json witness = {{"word", labels_of(w.word, blocks)},
                        {"next_block", blocks.at(w.next_block)},
                        {"p_fine", w.p_fine},
                        {"p_coarse", w.p_coarse}};
        if (w.state) {
            witness["state"] = states.at(*w.state);
        }
        out["witness"] = witness;
    } else {
        out["witness"] = nullptr;
    }
    return out;
}

json blackwell_to_json(const BlackwellEstimate& estimate) {
    return {{"estimate", estimate.estimate}, {"stderr", estimate.stderr_}, {"steps", estimate.steps},
            {"burn_in", estimate.burn_in},   {"seed", estimate.seed},      {"caveat", estimate.caveat}};
}

AnalysisReport run_analysis(const Model& model, const AnalysisConfig& config) {
    const auto& chain = model.chain;
    const auto& lumping = model.lumping;
    require_ergodic(chain);

    AnalysisReport report;
    report.model_name = model.name;
    report.states = chain.labels();
    report.blocks = lumping.block_labels();

    const auto index = split_merge_index(chain, lumping);
    report.kappa = index.kappa;
    report.kappa_depth_cap = index.depth_cap;
    report.kappa_witness = index.witness;
    report.se = check_single_entry(chain, lumping).holds;
    for (int k : config.sfs_orders) {
        report.sfs[k] = check_sfs(chain, lumping, k, config.limits).holds;
    }
    for (int k : config.strong_orders) {
        report.strong[k] = *check_strong_lumpable(chain, lumping, k, config.tol, config.limits).strong;
    }
    for (int k : config.weak_orders) {
        if (k > config.weak_horizon) {
            continue;
        }
        report.weak[k] = *check_weak_lumpable(chain, lumping, k, config.weak_horizon, config.tol, config.limits).weak;
    }
    report.chain_rate = chain_entropy_rate(chain);
    for (int n : config.horizons) {
        report.bounds.push_back(lumped_rate_bounds(chain, lumping, n, config.limits));
    }
    if (!config.horizons.empty()) {
        const int top = *std::max_element(config.horizons.begin(), config.horizons.end());
        report.loss_interval = conditional_entropy_rate_estimate(chain, lumping, top, config.limits);
    }
    report.loss_bound = entropy_loss_bound(chain, lumping);
    if (config.blackwell) {
        report.blackwell = blackwell_entropy_estimate(chain, lumping, *config.blackwell);
    }
    return report;
}

json report_to_json(const AnalysisReport& report) {
    json doc;
    doc["schema_version"] = report.schema_version;
    doc["model"] = report.model_name;
    doc["states"] = report.states;
    doc["blocks"] = report.blocks;
    doc["kappa"] = report.kappa ? json(*report.kappa) : json("infinity");
    doc["kappa_depth_cap"] = report.kappa_depth_cap;
    doc["kappa_witness"] =
        report.kappa_witness ? witness_to_json(*report.kappa_witness, report.states, report.blocks) : json(nullptr);
    doc["se"] = report.se;
    doc["sfs"] = keyed(report.sfs);
    doc["strong"] = keyed(report.strong);
    json weak = json::object();
    for (const auto& [k, v] : report.weak) {
        weak[std::to_string(k)] = {{"verdict", v.verdict}, {"horizon", v.horizon}};
    }
    doc["weak"] = weak;
    doc["chain_rate"] = report.chain_rate;
    json bounds = json::array();
    for (const auto& b : report.bounds) {
        bounds.push_back({{"horizon", b.horizon}, {"lower", b.lower}, {"upper", b.upper}});
    }
    doc["bounds"] = bounds;
    if (report.loss_interval) {
        doc["loss_interval"] = {{"horizon", report.loss_interval->horizon},
                                {"lower", report.loss_interval->loss_lower},
                                {"upper", report.loss_interval->loss_upper}};
    } else {
        doc["loss_interval"] = nullptr;
    }
    doc["loss_bound"] =
        report.loss_bound ? loss_bound_to_json(*report.loss_bound, report.states, report.blocks) : json(nullptr);
    doc["blackwell"] = report.blackwell ? blackwell_to_json(*report.blackwell) : json(nullptr);
    return doc;
}

AnalysisReport report_from_json(const json& doc) {
    try {
        AnalysisReport report;
        report.schema_version = doc.at("schema_version").get<int>();
        if (report.schema_version != kReportSchemaVersion) {
            throw Error(ErrorCode::ParseError,
                        "unsupported report schema version " + std::to_string(report.schema_version));
        }
        report.model_name = doc.at("model").get<std::string>();
        report.states = doc.at("states").get<std::vector<std::string>>();
        report.blocks = doc.at("blocks").get<std::vector<std::string>>();
        const auto& kappa = doc.at("kappa");
        if (kappa.is_string()) {
            if (kappa.get<std::string>() != "infinity") {
                throw Error(ErrorCode::ParseError, "kappa must be an integer or \"infinity\"");
            }
        } else {
            report.kappa = kappa.get<std::size_t>();
        }
        report.kappa_depth_cap = doc.at("kappa_depth_cap").get<std::size_t>();
        if (!doc.at("kappa_witness").is_null()) {
            report.kappa_witness = witness_from_json(doc.at("kappa_witness"), report.states, report.blocks);
        }
        report.se = doc.at("se").get<bool>();
        for (const auto& [k, v] : doc.at("sfs").items()) {
            report.sfs[std::stoi(k)] = v.get<bool>();
        }
        for (const auto& [k, v] : doc.at("strong").items()) {
            report.strong[std::stoi(k)] = v.get<bool>();
        }
        for (const auto& [k, v] : doc.at("weak").items()) {
            report.weak[std::stoi(k)] = WeakVerdict{v.at("verdict").get<bool>(), v.at("horizon").get<int>()};
        }
        report.chain_rate = doc.at("chain_rate").get<double>();
        for (const auto& b : doc.at("bounds")) {
            report.bounds.push_back(
                EntropyBounds{b.at("horizon").get<int>(), b.at("lower").get<double>(), b.at("upper").get<double>()});
        }
        if (const auto& li = doc.at("loss_interval"); !li.is_null()) {
            report.loss_interval =
                LossInterval{li.at("horizon").get<int>(), li.at("lower").get<double>(), li.at("upper").get<double>()};
        }
        if (const auto& lb = doc.at("loss_bound"); !lb.is_null()) {
            LossBound bound;
            bound.witness = witness_from_json(lb.at("witness"), report.states, report.blocks);
            bound.loss_entropy = lb.at("loss_entropy").get<double>();
            bound.alpha = lb.at("alpha").get<double>();
            bound.rate_lower_bound = lb.at("rate_lower_bound").get<double>();
            bound.growth_constant = lb.at("growth_constant").get<double>();
            bound.ambiguous_paths = lb.at("ambiguous_paths").get<std::size_t>();
            report.loss_bound = bound;
        }
        if (const auto& bw = doc.at("blackwell"); !bw.is_null()) {
            BlackwellEstimate est;
            est.estimate = bw.at("estimate").get<double>();
            est.stderr_ = bw.at("stderr").get<double>();
            est.steps = bw.at("steps").get<std::uint64_t>();
            est.burn_in = bw.at("burn_in").get<std::uint64_t>();
            est.seed = bw.at("seed").get<std::uint64_t>();
            est.caveat = bw.at("caveat").get<std::string>();
            report.blackwell = est;
        }
        return report;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
    }
}

std::string format_report(const AnalysisReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) {
        return report_to_json(report).dump(2) + "\n";
    }
    const auto& states = report.states;
    const auto& blocks = report.blocks;
    std::ostringstream out;
    if (!report.model_name.empty()) {
        out << "model: " << report.model_name << "\n";
    }
    out << "states: " << states.size() << ", blocks: " << blocks.size() << "\n";
    out << "split-merge index: " << (report.kappa ? std::to_string(*report.kappa) : std::string("infinity"))
        << " (depth cap " << report.kappa_depth_cap << ")\n";
    if (report.kappa_witness) {
        const auto& w = *report.kappa_witness;
        out << "  witness: " << states.at(w.check_state) << "-" << join_labels(w.path_a, states) << "-"
            << states.at(w.hat_state) << " / " << states.at(w.check_state) << "-" << join_labels(w.path_b, states)
            << "-" << states.at(w.hat_state) << "\n";
    }
    out << "single entry: " << (report.se ? "yes" : "no") << "\n";
    for (const auto& [k, v] : report.sfs) {
        out << "single forward " << k << "-sequence: " << (v ? "yes" : "no") << "\n";
    }
    for (const auto& [k, v] : report.strong) {
        out << "strongly " << k << "-lumpable: " << (v ? "yes" : "no") << "\n";
    }
    for (const auto& [k, v] : report.weak) {
        out << "weakly " << k << "-lumpable: " << (v.verdict ? "yes" : "no") << " up to horizon " << v.horizon
            << "\n";
    }
    out << "chain entropy rate: " << fixed(report.chain_rate) << " bits\n";
    if (!report.bounds.empty()) {
        out << "lumped entropy rate bounds:\n";
        for (const auto& b : report.bounds) {
            out << "  n=" << b.horizon << "  lower " << fixed(b.lower) << "  upper " << fixed(b.upper) << "\n";
        }
    }
    if (report.loss_interval) {
        out << "information loss per step at n=" << report.loss_interval->horizon << ": ["
            << fixed(report.loss_interval->loss_lower) << ", " << fixed(report.loss_interval->loss_upper) << "]\n";
    }
    if (report.loss_bound) {
        const auto& lb = *report.loss_bound;
        out << "loss lower bound: alpha " << fixed(lb.alpha, 9) << ", L " << fixed(lb.loss_entropy) << ", alpha*L "
            << fixed(lb.rate_lower_bound, 9) << ", growth constant " << fixed(lb.growth_constant, 9) << "\n";
    } else {
        out << "loss lower bound: none (entropy rate preserved)\n";
    }
    if (report.blackwell) {
        const auto& bw = *report.blackwell;
        out << "blackwell estimate: " << fixed(bw.estimate) << " +/- " << fixed(bw.stderr_) << " bits (seed "
            << bw.seed << ", " << bw.steps << " steps; " << bw.caveat << ")\n";
    }
    return out.str();
}

} // namespace lumpkit
