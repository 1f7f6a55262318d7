#include "hinsim/sms.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace hinsim {

namespace {

void canonicalize(TypeSet& s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

}  // namespace

bool MetaStructure::is_path() const {
    return std::all_of(layers.begin(), layers.end(), [](const TypeSet& l) { return l.size() == 1; });
}

MetaStructure make_meta_structure(std::vector<TypeSet> layers) {
    if (layers.empty()) throw std::invalid_argument("meta structure needs at least one layer");
    for (auto& l : layers) canonicalize(l);
    if (layers.front().size() != 1 || layers.back().size() != 1)
        throw std::invalid_argument("meta structure must have a single source and a single target type");
    MetaStructure s;
    s.source_type = layers.front()[0];
    s.target_type = layers.back()[0];
    s.layers = std::move(layers);
    return s;
}

MetaStructure make_meta_path(const std::vector<TypeId>& types) {
    std::vector<TypeSet> layers;
    for (TypeId t : types) layers.push_back({t});
    return make_meta_structure(std::move(layers));
}

MetaStructure parse_structure(const std::string& text, const NetworkSchema& schema) {
    auto lookup = [&](const std::string& raw) {
        std::string name = trim(raw);
        for (int t = 0; t < schema.type_count(); ++t)
            if (schema.names[t] == name) return t;
        throw std::invalid_argument("unknown type '" + name + "' in structure '" + text + "'");
    };
    std::string body = trim(text);
    // Allow the fully parenthesized notation printed by notation().
    if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
        int depth = 0;
        bool wraps = true;
        for (std::size_t i = 0; i < body.size(); ++i) {
            depth += body[i] == '(' ? 1 : body[i] == ')' ? -1 : 0;
            if (depth == 0 && i + 1 < body.size()) wraps = false;
        }
        if (wraps) body = body.substr(1, body.size() - 2);
    }
    std::vector<TypeSet> layers;
    std::size_t i = 0;
    while (i <= body.size()) {
        std::size_t j = i;
        TypeSet layer;
        if (j < body.size() && trim(body.substr(j, 1)) == "(") {
            auto close = body.find(')', j);
            if (close == std::string::npos) throw std::invalid_argument("unbalanced '(' in '" + text + "'");
            std::stringstream ss(body.substr(j + 1, close - j - 1));
            std::string item;
            while (std::getline(ss, item, ',')) layer.push_back(lookup(item));
            j = body.find(',', close);
        } else {
            j = body.find(',', i);
            layer.push_back(lookup(body.substr(i, j == std::string::npos ? std::string::npos : j - i)));
        }
        layers.push_back(layer);
        if (j == std::string::npos) break;
        i = j + 1;
        while (i < body.size() && body[i] == ' ') ++i;
    }
    auto s = make_meta_structure(std::move(layers));
    validate_structure(s, schema);
    return s;
}

std::string notation(const MetaStructure& s, const NetworkSchema& schema) {
    std::string out = "(";
    for (std::size_t i = 0; i < s.layers.size(); ++i) {
        if (i) out += ",";
        const auto& l = s.layers[i];
        if (l.size() > 1) out += "(";
        for (std::size_t k = 0; k < l.size(); ++k) out += (k ? "," : "") + schema.names.at(l[k]);
        if (l.size() > 1) out += ")";
    }
    return out + ")";
}

MetaStructure reverse(const MetaStructure& s) {
    MetaStructure r = s;
    std::reverse(r.layers.begin(), r.layers.end());
    std::swap(r.source_type, r.target_type);
    return r;
}

void validate_structure(const MetaStructure& s, const NetworkSchema& schema) {
    for (const auto& l : s.layers) {
        if (l.empty()) throw std::invalid_argument("empty layer in meta structure");
        for (TypeId t : l)
            if (t < 0 || t >= schema.type_count()) throw std::invalid_argument("type handle out of range");
    }
    auto covered = [&](const TypeSet& from, const TypeSet& to) {
        return std::all_of(from.begin(), from.end(), [&](TypeId a) {
            return std::any_of(to.begin(), to.end(), [&](TypeId b) { return schema.adjacent(a, b); });
        });
    };
    for (std::size_t i = 0; i + 1 < s.layers.size(); ++i)
        if (!covered(s.layers[i], s.layers[i + 1]) || !covered(s.layers[i + 1], s.layers[i]))
            throw std::invalid_argument("layers " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                        " are not adjacent in the schema");
}

std::vector<ExpandedLayer> expand_layers(const NetworkSchema& schema, TypeId source, int depth) {
    std::vector<ExpandedLayer> out;
    out.push_back({{source}, false});
    for (int l = 1; l <= depth; ++l) {
        ExpandedLayer next;
        for (TypeId x : out.back().types)
            for (TypeId y : schema.adj[x]) {
                if (y != source) {
                    next.types.push_back(y);
                } else {
                    next.has_target = true;
                    // Two roles on a self-looped target: pruned copy plus an
                    // intermediate copy that keeps expanding.
                    if (schema.self_loop[source]) next.types.push_back(y);
                }
            }
        canonicalize(next.types);
        out.push_back(std::move(next));
    }
    return out;
}

Sms build_sms(const NetworkSchema& schema, TypeId source) {
    auto dist = bfs_distances(schema, source);
    Sms sms;
    sms.source_type = sms.target_type = source;
    sms.schema = schema;
    for (int t = 0; t < schema.type_count(); ++t)
        if (dist[t] < 0) sms.dropped_types.push_back(t);
    sms.h0 = *std::max_element(dist.begin(), dist.end());
    if (sms.h0 == 0) throw std::invalid_argument("no SMS exists: source type '" + schema.names[source] +
                                                 "' has no neighbor types");
    const int h0 = sms.h0;
    auto layers = expand_layers(schema, source, 2 * h0 + 6);
    for (int h = 0; h <= h0 + 1; ++h) sms.basic_layers.push_back(layers[h].types);
    for (int h = 1; h < static_cast<int>(layers.size()); h += 2)
        if (layers[h].has_target) sms.odd_target_layers = true;
    sms.degree1_flag = schema.degree(source) == 1;
    for (TypeId t : sms.basic_layers[1])
        if (schema.degree(t) > 1) sms.l1_prime.push_back(t);
    sms.recurrent_first = sms.basic_layers[h0];
    if (sms.basic_layers[h0 + 1].empty()) {
        sms.degenerate = true;
        sms.recurrent_second = {source};
    } else {
        if (layers[h0 + 2].types != layers[h0].types || layers[h0 + 3].types != layers[h0 + 1].types)
            throw std::invalid_argument("schema layers are not periodic from h0=" + std::to_string(h0) +
                                        " for source type '" + schema.names[source] + "'");
        sms.recurrent_second = sms.basic_layers[h0 + 1];
    }
    return sms;
}

TypeSet layer_types(const Sms& sms, int h) {
    if (h < 0) throw std::invalid_argument("layer index must be non-negative");
    if (h <= sms.h0 + 1) return sms.basic_layers[h];
    if (sms.degenerate) return {};
    return sms.basic_layers[sms.h0 + (h - sms.h0) % 2];
}

int n_recurrences(int h, int h0) {
    if (h < 2 || h % 2) throw std::invalid_argument("n_recurrences needs an even h >= 2");
    return h >= 2 * h0 ? h / 2 - h0 : 0;
}

MetaStructure meta_structure_at(const Sms& sms, int h) {
    if (h < 2 || h % 2) throw std::invalid_argument("meta_structure_at needs an even h >= 2");
    const TypeId target = sms.target_type;
    std::vector<TypeSet> layers(h + 1);
    layers[0] = {sms.source_type};
    layers[h] = {target};
    if (sms.degenerate) {
        for (int i = 1; i < h; ++i) layers[i] = i % 2 ? sms.basic_layers[1] : TypeSet{target};
        return make_meta_structure(std::move(layers));
    }
    for (int i = h - 1; i >= 1; --i) {
        for (TypeId x : layer_types(sms, i))
            for (TypeId y : layers[i + 1])
                if (sms.schema.adjacent(x, y)) {
                    layers[i].push_back(x);
                    break;
                }
        if (layers[i].empty())
            throw std::logic_error("layer " + std::to_string(i) + " cannot reach the target at layer " +
                                   std::to_string(h));
    }
    return make_meta_structure(std::move(layers));
}

}  // namespace hinsim
