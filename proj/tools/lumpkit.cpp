// Command-line front end for lumped Markov chain analysis.

#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lumpkit/chain.hpp"
#include "lumpkit/entropy.hpp"
#include "lumpkit/lumpability.hpp"
#include "lumpkit/lumping.hpp"
#include "lumpkit/model.hpp"
#include "lumpkit/report.hpp"
#include "lumpkit/simulate.hpp"

using namespace lumpkit;
using nlohmann::json;

namespace {

struct Globals {
    std::string format = "human";
    double tol = kLumpabilityTolerance;
    bool allow_trivial = false;
    int max_horizon = EnumerationLimits{}.max_horizon;

    bool json_out() const { return format == "json"; }
    EnumerationLimits limits() const {
        EnumerationLimits l;
        l.max_horizon = max_horizon;
        return l;
    }
};

std::string num(double v, int digits = 7) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(digits) << v;
    return out.str();
}

void emit(const json& doc) { std::cout << doc.dump(2) << "\n"; }

std::string witness_line(const SplitMergeWitness& w, const Model& m) {
    const auto& s = m.chain.labels();
    return s.at(w.check_state) + "-" + join_labels(w.path_a, s) + "-" + s.at(w.hat_state) + " / " +
           s.at(w.check_state) + "-" + join_labels(w.path_b, s) + "-" + s.at(w.hat_state);
}

void print_verdict_witness(const LumpabilityVerdict& v, const Model& m) {
    if (!v.witness) {
        return;
    }
    const auto& w = *v.witness;
    std::cout << "  counterexample: after word [" << join_labels(w.word, m.lumping.block_labels(), " ") << "]";
    if (w.state) {
        std::cout << " from state " << m.chain.label(*w.state);
    }
    std::cout << ", next block " << m.lumping.block_label(w.next_block) << ": " << num(w.p_fine, 9) << " vs "
              << num(w.p_coarse, 9) << "\n";
}

std::vector<std::uint64_t> parse_seeds(const std::vector<std::string>& raw) {
    std::vector<std::uint64_t> seeds;
    for (const auto& item : raw) {
        std::stringstream ss(item);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (piece.empty()) {
                continue;
            }
            const auto dash = piece.find('-');
            if (dash != std::string::npos && dash > 0) {
                auto lo = std::stoull(piece.substr(0, dash));
                auto hi = std::stoull(piece.substr(dash + 1));
                for (auto s = lo; s <= hi; ++s) {
                    seeds.push_back(s);
                }
            } else {
                seeds.push_back(std::stoull(piece));
            }
        }
    }
    return seeds;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Entropy-rate and lumpability analysis of lumped Markov chains"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"human", "json"}));
    app.add_option("--tol", g.tol, "Absolute tolerance for probability comparisons")->check(CLI::PositiveNumber);
    app.add_flag("--allow-trivial-lumping", g.allow_trivial, "Accept lumpings with one block or singleton blocks");
    app.add_option("--max-horizon", g.max_horizon, "Cap on enumerated word length")->check(CLI::Range(1, 30));

    std::string model_path;
    auto add_model = [&](CLI::App* sub) { sub->add_option("model", model_path, "Model file (JSON)")->required(); };

    auto* analyze = app.add_subcommand("analyze", "Run every check and print a report");
    int analyze_horizon = 6, analyze_kmax = 3, analyze_weak_horizon = 6;
    std::optional<std::uint64_t> bw_seed;
    std::uint64_t bw_steps = 100000;
    add_model(analyze);
    analyze->add_option("--horizon", analyze_horizon, "Largest horizon for the entropy bounds")->check(CLI::PositiveNumber);
    analyze->add_option("--k-max", analyze_kmax, "Largest lumpability order checked")->check(CLI::PositiveNumber);
    analyze->add_option("--weak-horizon", analyze_weak_horizon, "Horizon of the weak lumpability check")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--blackwell-seed", bw_seed, "Include a Blackwell estimate with this seed");
    analyze->add_option("--blackwell-steps", bw_steps, "Steps of the Blackwell estimate");

    auto* kappa = app.add_subcommand("kappa", "Split-merge index and witness");
    add_model(kappa);
    auto* se = app.add_subcommand("check-se", "Single-entry property");
    add_model(se);

    int k = 2;
    int horizon = 6;
    auto* sfs = app.add_subcommand("check-sfs", "Single forward k-sequence property");
    add_model(sfs);
    sfs->add_option("--k", k, "Order k >= 2")->required();
    auto* strong = app.add_subcommand("check-strong", "Strong k-lumpability");
    add_model(strong);
    strong->add_option("--k", k, "Order k >= 1")->required();
    auto* weak = app.add_subcommand("check-weak", "Weak k-lumpability up to a horizon");
    add_model(weak);
    weak->add_option("--k", k, "Order k >= 1")->required();
    weak->add_option("--horizon", horizon, "Largest word length checked")->required();

    int n = 1;
    auto* bounds = app.add_subcommand("bounds", "Entropy-rate bounds for horizons 1..n");
    add_model(bounds);
    bounds->add_option("--n", n, "Largest horizon")->required()->check(CLI::PositiveNumber);

    auto* loss = app.add_subcommand("loss-bound", "Certified lower bound on the information loss");
    add_model(loss);

    std::uint64_t steps = 100000, seed = 0;
    std::optional<std::uint64_t> burn_in;
    auto* blackwell = app.add_subcommand("blackwell", "Monte Carlo estimate of the lumped entropy rate");
    add_model(blackwell);
    blackwell->add_option("--steps", steps, "Number of filter steps")->required();
    blackwell->add_option("--seed", seed, "Random seed")->required();
    blackwell->add_option("--burn-in", burn_in, "Discarded steps (default 10%)");

    std::size_t length = 2000;
    std::vector<std::string> seed_args{"1"};
    std::vector<std::size_t> checkpoints = kDefaultCheckpoints;
    auto* simulate = app.add_subcommand("simulate", "Preimage-count growth along sampled trajectories");
    add_model(simulate);
    simulate->add_option("--length", length, "Trajectory length")->required()->check(CLI::PositiveNumber);
    simulate->add_option("--seeds", seed_args, "Seeds, e.g. 1,2,3 or 1-10")->required();
    simulate->add_option("--checkpoints", checkpoints, "Lengths at which the preimage count is reported");

    auto* dot = app.add_subcommand("export-dot", "Graphviz description of the chain and its blocks");
    add_model(dot);
    auto* reverse = app.add_subcommand("reverse", "Time-reversed model");
    add_model(reverse);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const Model model = parse_model_file(model_path, ModelOverrides{g.allow_trivial});
        const auto& chain = model.chain;
        const auto& lumping = model.lumping;
        const auto& states = chain.labels();
        const auto& blocks = lumping.block_labels();
        const auto limits = g.limits();

        if (*analyze) {
            AnalysisConfig config;
            config.horizons.clear();
            for (int h = 1; h <= analyze_horizon; ++h) {
                config.horizons.push_back(h);
            }
            config.sfs_orders.clear();
            config.strong_orders.clear();
            config.weak_orders.clear();
            for (int order = 1; order <= analyze_kmax; ++order) {
                config.strong_orders.push_back(order);
                config.weak_orders.push_back(order);
                config.sfs_orders.push_back(order + 1);
            }
            config.weak_horizon = analyze_weak_horizon;
            config.tol = g.tol;
            config.limits = limits;
            if (bw_seed) {
                BlackwellConfig bw;
                bw.seed = *bw_seed;
                bw.steps = bw_steps;
                config.blackwell = bw;
            }
            const auto report = run_analysis(model, config);
            std::cout << format_report(report, g.json_out() ? ReportFormat::Json : ReportFormat::Human);
        } else if (*kappa) {
            const auto r = split_merge_index(chain, lumping);
            if (g.json_out()) {
                emit({{"kappa", r.kappa ? json(*r.kappa) : json("infinity")},
                      {"depth_cap", r.depth_cap},
                      {"witness", r.witness ? witness_to_json(*r.witness, states, blocks) : json(nullptr)}});
            } else {
                std::cout << "split-merge index: " << (r.kappa ? std::to_string(*r.kappa) : "infinity")
                          << " (depth cap " << r.depth_cap << ")\n";
                if (r.witness) {
                    std::cout << "witness: " << witness_line(*r.witness, model) << "\n";
                }
            }
        } else if (*se) {
            const auto r = check_single_entry(chain, lumping);
            json violation = nullptr;
            if (r.violation) {
                const auto& v = *r.violation;
                violation = {{"state", states.at(v.state)},
                             {"block", blocks.at(v.block)},
                             {"successors", {states.at(v.first), states.at(v.second)}}};
            }
            if (g.json_out()) {
                emit({{"se", r.holds}, {"violation", violation}});
            } else {
                std::cout << "single entry: " << (r.holds ? "yes" : "no") << "\n";
                if (r.violation) {
                    const auto& v = *r.violation;
                    std::cout << "  " << states.at(v.state) << " enters " << blocks.at(v.block) << " at both "
                              << states.at(v.first) << " and " << states.at(v.second) << "\n";
                }
            }
        } else if (*sfs) {
            const auto r = check_sfs(chain, lumping, k, limits);
            json violation = nullptr;
            if (r.violation) {
                const auto& v = *r.violation;
                violation = {{"start_block", blocks.at(v.start_block)},
                             {"lumped_word", json(std::vector<std::string>())},
                             {"start_a", states.at(v.start_a)},
                             {"start_b", states.at(v.start_b)},
                             {"path_a", json::array()},
                             {"path_b", json::array()}};
                for (auto y : v.lumped_word) violation["lumped_word"].push_back(blocks.at(y));
                for (auto x : v.path_a) violation["path_a"].push_back(states.at(x));
                for (auto x : v.path_b) violation["path_b"].push_back(states.at(x));
            }
            if (g.json_out()) {
                emit({{"k", k}, {"sfs", r.holds}, {"violation", violation}});
            } else {
                std::cout << "single forward " << k << "-sequence: " << (r.holds ? "yes" : "no") << "\n";
                if (r.violation) {
                    const auto& v = *r.violation;
                    std::cout << "  from block " << blocks.at(v.start_block) << ": " << states.at(v.start_a) << "-"
                              << join_labels(v.path_a, states) << " and " << states.at(v.start_b) << "-"
                              << join_labels(v.path_b, states) << "\n";
                }
            }
        } else if (*strong) {
            const auto v = check_strong_lumpable(chain, lumping, k, g.tol, limits);
            if (g.json_out()) {
                emit(verdict_to_json(v, states, blocks));
            } else {
                std::cout << "strongly " << k << "-lumpable: " << (*v.strong ? "yes" : "no") << "\n";
                std::cout << "  H(Y_k | Y_[1,k-1], X_0) = " << num(*v.entropy_given_state)
                          << ", H(Y_k | Y_[0,k-1]) = " << num(*v.entropy_given_block)
                          << (*v.entropy_agrees ? "" : "  (entropy test disagrees)") << "\n";
                print_verdict_witness(v, model);
            }
        } else if (*weak) {
            const auto v = check_weak_lumpable(chain, lumping, k, horizon, g.tol, limits);
            if (g.json_out()) {
                emit(verdict_to_json(v, states, blocks));
            } else {
                std::cout << "weakly " << k << "-lumpable: " << (v.weak->verdict ? "yes" : "no")
                          << " up to horizon " << v.weak->horizon << "\n";
                for (std::size_t m = 0; m < v.conditional_entropies.size(); ++m) {
                    std::cout << "  H(Y_" << m + 1 << " | Y_[0," << m << "]) = " << num(v.conditional_entropies[m])
                              << "\n";
                }
                print_verdict_witness(v, model);
            }
        } else if (*bounds) {
            check_horizon(lumping.num_blocks(), n, limits);
            const double rate = chain_entropy_rate(chain);
            std::vector<EntropyBounds> all;
            for (int h = 1; h <= n; ++h) {
                all.push_back(lumped_rate_bounds(chain, lumping, h, limits));
            }
            const auto li = conditional_entropy_rate_estimate(chain, lumping, n, limits);
            if (g.json_out()) {
                json rows = json::array();
                for (const auto& b : all) {
                    rows.push_back({{"horizon", b.horizon}, {"lower", b.lower}, {"upper", b.upper}});
                }
                emit({{"chain_rate", rate},
                      {"bounds", rows},
                      {"loss_interval", {{"horizon", n}, {"lower", li.loss_lower}, {"upper", li.loss_upper}}}});
            } else {
                std::cout << "chain entropy rate: " << num(rate) << " bits\n";
                for (const auto& b : all) {
                    std::cout << "n=" << b.horizon << "  lower " << num(b.lower) << "  upper " << num(b.upper) << "\n";
                }
                std::cout << "information loss per step: [" << num(li.loss_lower) << ", " << num(li.loss_upper)
                          << "]\n";
            }
        } else if (*loss) {
            const auto b = entropy_loss_bound(chain, lumping);
            if (g.json_out()) {
                emit({{"loss_bound", b ? loss_bound_to_json(*b, states, blocks) : json(nullptr)}});
            } else if (!b) {
                std::cout << "split-merge index is infinite: no loss bound, the entropy rate is preserved\n";
            } else {
                std::cout << "witness: " << witness_line(b->witness, model) << "\n";
                std::cout << "L = " << num(b->loss_entropy) << " bits over " << b->ambiguous_paths << " paths\n";
                std::cout << "alpha = " << num(b->alpha, 9) << "\n";
                std::cout << "alpha*L = " << num(b->rate_lower_bound, 9) << " bits per step\n";
                std::cout << "growth constant 2^alpha = " << num(b->growth_constant, 9) << "\n";
            }
        } else if (*blackwell) {
            BlackwellConfig config;
            config.steps = steps;
            config.seed = seed;
            config.burn_in = burn_in;
            const auto est = blackwell_entropy_estimate(chain, lumping, config);
            if (g.json_out()) {
                emit(blackwell_to_json(est));
            } else {
                std::cout << "estimate: " << num(est.estimate) << " +/- " << num(est.stderr_) << " bits\n";
                std::cout << "steps " << est.steps << ", burn-in " << est.burn_in << ", seed " << est.seed << "\n";
                std::cout << "note: " << est.caveat << "\n";
            }
        } else if (*simulate) {
            const auto stats = empirical_growth(chain, lumping, length, parse_seeds(seed_args), checkpoints);
            if (g.json_out()) {
                json points = json::array();
                for (const auto& p : stats.points) {
                    points.push_back({{"n", p.n},
                                      {"counts", p.counts},
                                      {"log2_counts", p.log2_counts},
                                      {"max_count", p.max_count},
                                      {"mean_rate", p.mean_rate},
                                      {"min_rate", p.min_rate}});
                }
                emit({{"length", stats.length}, {"seeds", stats.seeds}, {"points", points}});
            } else {
                std::cout << "preimage count growth over " << stats.seeds.size() << " seeds\n";
                for (const auto& p : stats.points) {
                    std::cout << "n=" << p.n << "  max T_n " << p.max_count << "  mean T_n^(1/n) "
                              << num(p.mean_rate, 6) << "  min " << num(p.min_rate, 6) << "\n";
                }
            }
        } else if (*dot) {
            std::cout << export_dot(model);
        } else if (*reverse) {
            const auto reversed = make_model(model.name.empty() ? "reversed" : model.name + "_reversed",
                                             reverse_chain(chain), lumping, model.options);
            if (g.json_out()) {
                emit(model_to_json(reversed));
            } else {
                for (std::size_t i = 0; i < reversed.chain.size(); ++i) {
                    std::cout << std::setw(8) << states.at(i);
                    for (std::size_t j = 0; j < reversed.chain.size(); ++j) {
                        std::cout << " " << num(reversed.chain.prob(i, j), 9);
                    }
                    std::cout << "\n";
                }
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_validation_error(e.code()) ? 1 : 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad argument: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
