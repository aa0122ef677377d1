#include "lumpkit/model.hpp"

#include <fstream>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

namespace lumpkit {

using Rational = boost::multiprecision::cpp_rational;
using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& field, const std::string& what) {
    throw Error(ErrorCode::ParseError, "field '" + field + "': " + what);
}

// boost reads a leading zero as an octal prefix
boost::multiprecision::cpp_int decimal_int(std::string_view digits) {
    const auto first = digits.find_first_not_of('0');
    return boost::multiprecision::cpp_int(first == std::string_view::npos ? std::string("0")
                                                                         : std::string(digits.substr(first)));
}

// "p/q", "n" or "d.ddd"
Rational parse_exact(const std::string& text, const std::string& field) {
    auto digits_only = [](std::string_view s) {
        return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
    };
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string_view num(text.data(), slash), den(text.data() + slash + 1, text.size() - slash - 1);
        if (!digits_only(num) || !digits_only(den)) {
            parse_fail(field, "'" + text + "' is not a fraction p/q");
        }
        const auto q = decimal_int(den);
        if (q == 0) {
            parse_fail(field, "'" + text + "' has a zero denominator");
        }
        return Rational(decimal_int(num), q);
    }
    const auto dot = text.find('.');
    std::string whole = text.substr(0, dot);
    std::string frac = dot == std::string::npos ? "" : text.substr(dot + 1);
    if (whole.empty()) {
        whole = "0";
    }
    if (!digits_only(whole) || (dot != std::string::npos && !digits_only(frac))) {
        parse_fail(field, "'" + text + "' is not a fraction or decimal");
    }
    boost::multiprecision::cpp_int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) {
        scale *= 10;
    }
    return Rational(decimal_int(whole + frac), scale);
}

struct Entry {
    double value = 0.0;
    std::string text;
    std::optional<Rational> exact;
};

Entry read_entry(const json& value, const std::string& field) {
    Entry entry;
    if (value.is_number()) {
        entry.value = value.get<double>();
        entry.text = value.dump();
    } else if (value.is_string()) {
        entry.text = value.get<std::string>();
        entry.exact = parse_exact(entry.text, field);
        entry.value = static_cast<double>(*entry.exact);
    } else {
        parse_fail(field, "expected a number or a string, got " + std::string(value.type_name()));
    }
    return entry;
}

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        parse_fail(key, "missing");
    }
    return *it;
}

bool read_flag(const json& options, const char* key) {
    auto it = options.find(key);
    if (it == options.end()) {
        return false;
    }
    if (!it->is_boolean()) {
        parse_fail(std::string("options.") + key, "expected a boolean");
    }
    return it->get<bool>();
}

template <class F>
auto validated(const std::string& field, F&& make) {
    try {
        return make();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw;
        }
        throw Error(ErrorCode::ValidationError, "field '" + field + "': " + e.what());
    }
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out + "\"";
}

} // namespace

Model parse_model(const json& doc, const ModelOverrides& overrides) {
    if (!doc.is_object()) {
        throw Error(ErrorCode::ParseError, "model must be a JSON object");
    }
    std::string name;
    if (auto it = doc.find("name"); it != doc.end()) {
        if (!it->is_string()) {
            parse_fail("name", "expected a string");
        }
        name = it->get<std::string>();
    }

    ModelOptions options;
    if (auto it = doc.find("options"); it != doc.end()) {
        if (!it->is_object()) {
            parse_fail("options", "expected an object");
        }
        options.allow_trivial_lumping = read_flag(*it, "allow_trivial_lumping");
        options.exact_zero_mode = read_flag(*it, "exact_zero_mode");
        options.allow_periodic = read_flag(*it, "allow_periodic");
    }
    options.allow_trivial_lumping = options.allow_trivial_lumping || overrides.allow_trivial_lumping;

    const auto& states_json = require(doc, "states");
    if (!states_json.is_array()) {
        parse_fail("states", "expected an array of labels");
    }
    std::vector<std::string> states;
    for (std::size_t i = 0; i < states_json.size(); ++i) {
        if (!states_json[i].is_string()) {
            parse_fail("states[" + std::to_string(i) + "]", "expected a string");
        }
        states.push_back(states_json[i].get<std::string>());
    }

    const auto& matrix_json = require(doc, "transition_matrix");
    if (!matrix_json.is_array()) {
        parse_fail("transition_matrix", "expected an array of rows");
    }
    const auto n = states.size();
    if (matrix_json.size() != n) {
        std::ostringstream msg;
        msg << "field 'transition_matrix': " << matrix_json.size() << " rows for " << n << " states";
        throw Error(ErrorCode::ValidationError, msg.str());
    }
    Eigen::MatrixXd matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    std::vector<std::vector<std::string>> text(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto field = "transition_matrix[" + std::to_string(i) + "]";
        const auto& row = matrix_json[i];
        if (!row.is_array()) {
            parse_fail(field, "expected an array");
        }
        if (row.size() != n) {
            std::ostringstream msg;
            msg << "field '" << field << "': " << row.size() << " entries for " << n << " states";
            throw Error(ErrorCode::ValidationError, msg.str());
        }
        Rational exact_sum = 0;
        bool all_exact = true;
        for (std::size_t j = 0; j < n; ++j) {
            auto entry = read_entry(row[j], field + "[" + std::to_string(j) + "]");
            matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry.value;
            text[i].push_back(entry.text);
            if (entry.exact) {
                exact_sum += *entry.exact;
            } else {
                all_exact = false;
            }
        }
        if (all_exact && exact_sum != 1) {
            throw Error(ErrorCode::ValidationError,
                        "field '" + field + "': exact entries sum to " + exact_sum.str() + ", not 1");
        }
    }

    std::optional<Eigen::VectorXd> initial;
    if (auto it = doc.find("initial"); it != doc.end() && !it->is_null()) {
        if (!it->is_array()) {
            parse_fail("initial", "expected an array");
        }
        Eigen::VectorXd v(static_cast<Eigen::Index>(it->size()));
        for (std::size_t i = 0; i < it->size(); ++i) {
            v[static_cast<Eigen::Index>(i)] = read_entry((*it)[i], "initial[" + std::to_string(i) + "]").value;
        }
        initial = v;
    }

    const auto& lumping_json = require(doc, "lumping");
    if (!lumping_json.is_object()) {
        parse_fail("lumping", "expected an object mapping state labels to block labels");
    }
    std::map<std::string, std::string> block_of;
    for (const auto& [state, block] : lumping_json.items()) {
        if (!block.is_string()) {
            parse_fail("lumping." + state, "expected a block label string");
        }
        block_of[state] = block.get<std::string>();
    }

    ChainOptions chain_options;
    chain_options.exact_zero = options.exact_zero_mode;
    chain_options.allow_periodic = options.allow_periodic;
    auto chain = validated("transition_matrix", [&] {
        return MarkovChain(matrix, states, initial, chain_options);
    });
    auto lumping = validated("lumping", [&] {
        return Lumping::from_labels(chain, block_of, options.allow_trivial_lumping);
    });
    return Model{std::move(name), std::move(chain), std::move(lumping), options, std::move(text)};
}

Model parse_model_text(const std::string& text, const ModelOverrides& overrides) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, e.what());
    }
    return parse_model(doc, overrides);
}

Model parse_model_file(const std::filesystem::path& path, const ModelOverrides& overrides) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot read model file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    Model model = parse_model_text(buffer.str(), overrides);
    if (model.name.empty()) {
        model.name = path.stem().string();
    }
    return model;
}

Model make_model(std::string name, MarkovChain chain, Lumping lumping, ModelOptions options) {
    require_compatible(chain, lumping);
    std::vector<std::vector<std::string>> text(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (std::size_t j = 0; j < chain.size(); ++j) {
            text[i].push_back(json(chain.prob(i, j)).dump());
        }
    }
    return Model{std::move(name), std::move(chain), std::move(lumping), options, std::move(text)};
}

json model_to_json(const Model& model) {
    json doc = json::object();
    if (!model.name.empty()) {
        doc["name"] = model.name;
    }
    doc["states"] = model.chain.labels();
    json matrix = json::array();
    for (std::size_t i = 0; i < model.chain.size(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < model.chain.size(); ++j) {
            const auto& text = model.entry_text[i][j];
            json parsed = json::parse(text, nullptr, false);
            if (!parsed.is_discarded() && parsed.is_number()) {
                row.push_back(parsed);
            } else {
                row.push_back(text);
            }
        }
        matrix.push_back(row);
    }
    doc["transition_matrix"] = matrix;
    json lumping = json::object();
    for (std::size_t x = 0; x < model.chain.size(); ++x) {
        lumping[model.chain.label(x)] = model.lumping.block_label(model.lumping.block_of(x));
    }
    doc["lumping"] = lumping;
    if (const auto& initial = model.chain.initial()) {
        doc["initial"] = std::vector<double>(initial->data(), initial->data() + initial->size());
    }
    doc["options"] = {{"allow_trivial_lumping", model.options.allow_trivial_lumping},
                      {"exact_zero_mode", model.options.exact_zero_mode},
                      {"allow_periodic", model.options.allow_periodic}};
    return doc;
}

std::string export_dot(const Model& model) {
    const auto& chain = model.chain;
    const auto& lumping = model.lumping;
    std::ostringstream out;
    out << "digraph " << dot_quote(model.name.empty() ? "chain" : model.name) << " {\n";
    out << "  rankdir=LR;\n";
    out << "  node [shape=circle];\n";
    for (std::size_t y = 0; y < lumping.num_blocks(); ++y) {
        out << "  subgraph cluster_" << y << " {\n";
        out << "    label=" << dot_quote(lumping.block_label(y)) << ";\n";
        out << "    color=red;\n";
        for (auto x : lumping.preimage(y)) {
            out << "    " << dot_quote(chain.label(x)) << ";\n";
        }
        out << "  }\n";
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
        for (auto j : chain.successors()[i]) {
            out << "  " << dot_quote(chain.label(i)) << " -> " << dot_quote(chain.label(j))
                << " [label=" << dot_quote(model.entry_text[i][j]) << "];\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace lumpkit
