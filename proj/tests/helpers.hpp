#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hinsim/eval.hpp"
#include "hinsim/hin.hpp"
#include "hinsim/matrix.hpp"
#include "hinsim/similarity.hpp"
#include "hinsim/sms.hpp"

namespace testutil {

using namespace hinsim;

inline std::string fixture(const std::string& name) { return std::string(HINSIM_FIXTURES) + "/" + name; }

inline Hin toy() { return load_hin_files(fixture("toy_dblp_nodes.tsv"), fixture("toy_dblp_edges.tsv")); }

inline Hin from_text(const std::string& nodes, const std::string& edges) {
    std::istringstream n(nodes), e(edges);
    return load_hin(n, e);
}

inline ObjectId obj(const Hin& hin, const std::string& name) { return *hin.find_object(name); }
inline TypeId typ(const Hin& hin, const std::string& name) { return *hin.find_type(name); }

// Schema from an undirected type edge list; names are "T0", "T1", ...
inline NetworkSchema make_schema(int n, const std::vector<std::pair<int, int>>& edges) {
    NetworkSchema s;
    s.adj.resize(n);
    s.self_loop.assign(n, false);
    for (int i = 0; i < n; ++i) s.names.push_back("T" + std::to_string(i));
    for (auto [a, b] : edges) {
        s.adj[a].push_back(b);
        s.adj[b].push_back(a);
    }
    for (int i = 0; i < n; ++i) {
        std::sort(s.adj[i].begin(), s.adj[i].end());
        s.adj[i].erase(std::unique(s.adj[i].begin(), s.adj[i].end()), s.adj[i].end());
        s.self_loop[i] = std::binary_search(s.adj[i].begin(), s.adj[i].end(), i);
    }
    return s;
}

// Named schema built through a tiny HIN so type names are real.
inline NetworkSchema named_schema(const std::vector<std::string>& names,
                                  const std::vector<std::pair<std::string, std::string>>& edges) {
    std::string nodes, es;
    for (const auto& n : names) nodes += "x_" + n + "\t" + n + "\n";
    for (const auto& [a, b] : edges) es += "x_" + a + "\tx_" + b + "\n";
    return extract_schema(from_text(nodes, es));
}

inline NetworkSchema bio_schema() {
    return named_schema({"G", "T", "GO", "CC", "Si", "Sub"},
                        {{"GO", "G"}, {"T", "G"}, {"G", "CC"}, {"CC", "Si"}, {"CC", "Sub"}});
}

// Random connected type graph over `types` nodes (spanning tree plus extras).
inline std::vector<std::pair<int, int>> random_type_edges(std::mt19937_64& rng, int types, double extra) {
    std::vector<std::pair<int, int>> edges;
    std::uniform_real_distribution<double> coin(0, 1);
    for (int t = 1; t < types; ++t) edges.emplace_back(std::uniform_int_distribution<int>(0, t - 1)(rng), t);
    for (int a = 0; a < types; ++a)
        for (int b = a + 1; b < types; ++b)
            if (coin(rng) < extra) edges.emplace_back(a, b);
    return edges;
}

// Random HIN with at most `max_objects` objects over a random connected schema.
inline Hin random_hin(std::mt19937_64& rng, int max_types, int max_objects, double link_p) {
    int types = std::uniform_int_distribution<int>(2, max_types)(rng);
    auto tedges = random_type_edges(rng, types, 0.3);
    std::vector<std::vector<std::string>> objs(types);
    std::string nodes;
    int budget = max_objects;
    for (int t = 0; t < types; ++t) {
        int left = types - t - 1;
        int n = std::uniform_int_distribution<int>(1, std::max(1, std::min(6, budget - left)))(rng);
        budget -= n;
        for (int i = 0; i < n; ++i) {
            objs[t].push_back("o" + std::to_string(t) + "_" + std::to_string(i));
            nodes += objs[t].back() + "\tT" + std::to_string(t) + "\n";
        }
    }
    std::string edges;
    std::uniform_real_distribution<double> coin(0, 1);
    for (auto [a, b] : tedges) {
        bool any = false;
        for (const auto& u : objs[a])
            for (const auto& v : objs[b])
                if (coin(rng) < link_p) {
                    edges += u + "\t" + v + "\n";
                    any = true;
                }
        if (!any) edges += objs[a][0] + "\t" + objs[b][0] + "\n";
    }
    return from_text(nodes, edges);
}

// Random meta structure of height 1..max_h starting at a random type.
inline MetaStructure random_structure(std::mt19937_64& rng, const NetworkSchema& schema, int max_h) {
    std::uniform_int_distribution<int> pick_type(0, schema.type_count() - 1);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        int h = std::uniform_int_distribution<int>(1, max_h)(rng);
        std::vector<TypeSet> layers{{pick_type(rng)}};
        bool ok = true;
        for (int i = 1; i <= h && ok; ++i) {
            std::set<TypeId> cand;
            for (TypeId t : layers.back())
                for (TypeId u : schema.adj[t]) cand.insert(u);
            std::vector<TypeId> c(cand.begin(), cand.end());
            std::shuffle(c.begin(), c.end(), rng);
            std::size_t k = i == h ? 1 : std::uniform_int_distribution<std::size_t>(1, std::min<std::size_t>(2, c.size()))(rng);
            TypeSet next(c.begin(), c.begin() + std::min(k, c.size()));
            std::sort(next.begin(), next.end());
            if (next.empty()) ok = false;
            layers.push_back(next);
        }
        if (!ok) continue;
        MetaStructure s;
        try {
            s = make_meta_structure(layers);
            validate_structure(s, schema);
        } catch (const std::invalid_argument&) {
            continue;
        }
        return s;
    }
    throw std::runtime_error("could not draw a meta structure");
}

// Number of instances of `s` from every source object to every target object,
// by enumerating tuple sequences with the all-pairs rule.
inline Dense brute_force_counts(const Hin& hin, const NetworkSchema& schema, const std::vector<TypeSet>& types) {
    std::vector<LayerProduct> layers;
    for (const auto& l : types) layers.push_back(layer_product(hin, l));
    Dense out = Dense::Zero(layers.front().size(), layers.back().size());
    std::vector<int> path;
    auto rec = [&](auto&& self, int i, int cur) -> void {
        if (i + 1 == static_cast<int>(layers.size())) {
            out(path.front(), cur) += 1;
            return;
        }
        for (int j = 0; j < layers[i + 1].size(); ++j)
            if (tuple_adjacent(hin, schema, types[i], layers[i].tuples[cur], types[i + 1], layers[i + 1].tuples[j]))
                self(self, i + 1, j);
    };
    for (int r = 0; r < layers.front().size(); ++r) {
        path = {r};
        rec(rec, 0, r);
    }
    return out;
}

inline Dense brute_force_counts(const Hin& hin, const NetworkSchema& schema, const MetaStructure& s) {
    return brute_force_counts(hin, schema, s.layers);
}

// Product of row-normalized relation matrices along `types`; the last layer
// may hold several types.
inline Dense normalized_chain(const Hin& hin, const NetworkSchema& schema, const std::vector<TypeSet>& types) {
    LayerProduct prev = layer_product(hin, types[0]);
    Dense acc = Dense::Identity(prev.size(), prev.size());
    for (std::size_t i = 1; i < types.size(); ++i) {
        LayerProduct next = layer_product(hin, types[i]);
        acc = acc * row_normalize(Dense(relation_matrix(hin, schema, prev, next)));
        prev = std::move(next);
    }
    return acc;
}

}  // namespace testutil
