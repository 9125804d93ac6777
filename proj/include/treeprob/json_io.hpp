#pragma once

#include <json.hpp>

#include "treeprob/graph.hpp"
#include "treeprob/measures.hpp"
#include "treeprob/mst_exact.hpp"
#include "treeprob/word_maps.hpp"

namespace treeprob {

using Json = nlohmann::ordered_json;

// Graph JSON: {"n": <int>, "edges": [[u,v], ...]}; edge index = position.
inline Graph graph_from_json(const Json& j) {
    if (!j.contains("n") || !j.contains("edges")) throw std::invalid_argument("graph JSON needs n and edges");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return Graph(j.at("n").get<int>(), std::move(edges));
}

inline Json graph_to_json(const Graph& g) {
    Json j;
    j["n"] = g.n;
    Json edges = Json::array();
    for (auto [u, v] : g.edges) edges.push_back(Json::array({u, v}));
    j["edges"] = edges;
    return j;
}

inline std::vector<int> tree_from_json(const Json& j) {
    std::vector<int> t;
    for (const auto& e : j) t.push_back(e.get<int>());
    std::sort(t.begin(), t.end());
    return t;
}

inline std::string tree_key(const std::vector<int>& tree) {
    std::string key = "[";
    for (size_t i = 0; i < tree.size(); ++i) {
        if (i) key += ",";
        key += std::to_string(tree[i]);
    }
    return key + "]";
}

inline Json tree_distribution_to_json(const TreeDistribution& dist) {
    Json j = Json::object();
    for (const auto& [tree, p] : dist) j[tree_key(tree)] = format_rational(p);
    return j;
}

// Measure JSON: array (one entry per edge) of
// {"atoms": [[loc, mass], ...], "uniform": [[a, b, mass], ...]},
// with rationals as "p/q" strings.
inline ProductMeasureSpec measure_from_json(const Json& j) {
    const Json& vars = j.is_array() ? j : j.at("edges");
    ProductMeasureSpec spec;
    for (const auto& v : vars) {
        EdgeMeasure m;
        if (v.contains("atoms"))
            for (const auto& a : v.at("atoms"))
                m.atoms.push_back({parse_rational(a.at(0).get<std::string>()),
                                   parse_rational(a.at(1).get<std::string>())});
        if (v.contains("uniform"))
            for (const auto& u : v.at("uniform"))
                m.uniforms.push_back({parse_rational(u.at(0).get<std::string>()),
                                      parse_rational(u.at(1).get<std::string>()),
                                      parse_rational(u.at(2).get<std::string>())});
        spec.vars.push_back(std::move(m));
    }
    spec.validate();
    return spec;
}

inline Json measure_to_json(const ProductMeasureSpec& spec) {
    Json out = Json::array();
    for (const auto& v : spec.vars) {
        Json e = Json::object();
        Json atoms = Json::array();
        for (const auto& a : v.atoms)
            atoms.push_back(Json::array({format_rational(a.loc), format_rational(a.mass)}));
        Json uniforms = Json::array();
        for (const auto& u : v.uniforms)
            uniforms.push_back(Json::array(
                {format_rational(u.lo), format_rational(u.hi), format_rational(u.mass)}));
        e["atoms"] = atoms;
        e["uniform"] = uniforms;
        out.push_back(e);
    }
    return out;
}

// WordMap JSON: {"word": "abcab...", "weights": ["p/q", ...]}.
inline WordMap word_map_from_json(const Json& j) {
    std::string word = j.at("word").get<std::string>();
    std::vector<Rational> weights;
    if (j.contains("weights"))
        for (const auto& w : j.at("weights")) weights.push_back(parse_rational(w.get<std::string>()));
    else
        weights.assign(word.size(), Rational(1));
    return WordMap(std::move(word), std::move(weights));
}

inline Json word_map_to_json(const WordMap& wm) {
    Json j;
    j["word"] = wm.word;
    Json weights = Json::array();
    for (const auto& w : wm.weights) weights.push_back(format_rational(w));
    j["weights"] = weights;
    return j;
}

inline std::vector<Rational> rational_list_from_json(const Json& j) {
    std::vector<Rational> out;
    for (const auto& v : j) {
        if (v.is_string()) out.push_back(parse_rational(v.get<std::string>()));
        else if (v.is_number_integer()) out.push_back(Rational(v.get<long>()));
        else throw std::invalid_argument("rationals must be \"p/q\" strings or integers");
    }
    return out;
}

}  // namespace treeprob
