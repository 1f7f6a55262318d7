#include "hinsim/hin.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <queue>
#include <sstream>

namespace hinsim {

IngestError::IngestError(const std::string& file, std::size_t line, const std::string& what)
    : std::runtime_error(line ? file + ":" + std::to_string(line) + ": " + what : file + ": " + what),
      line_(line) {}

TypeId Hin::add_type(const std::string& name) {
    auto it = type_index_.find(name);
    if (it != type_index_.end()) return it->second;
    TypeId id = static_cast<TypeId>(types_.size());
    types_.push_back({id, name});
    type_index_.emplace(name, id);
    by_type_.emplace_back();
    return id;
}

ObjectId Hin::add_object(const std::string& name, TypeId type) {
    if (type < 0 || type >= type_count()) throw std::out_of_range("unknown type handle");
    auto it = object_index_.find(name);
    if (it != object_index_.end()) {
        if (object_types_[it->second] != type)
            throw std::invalid_argument("object '" + name + "' already declared with type " +
                                        types_[object_types_[it->second]].name);
        return it->second;
    }
    ObjectId id = static_cast<ObjectId>(object_names_.size());
    object_names_.push_back(name);
    object_types_.push_back(type);
    ordinals_.push_back(static_cast<int>(by_type_[type].size()));
    by_type_[type].push_back(id);
    object_index_.emplace(name, id);
    adj_.emplace_back();
    return id;
}

void Hin::add_link(ObjectId src, ObjectId dst, const std::string& link_name) {
    TypeId st = object_type(src), dt = object_type(dst);
    int lt = -1;
    bool reversed = false;
    auto lookup = [&](const std::string& n) -> const LinkType* {
        auto it = link_type_index_.find(n);
        return it == link_type_index_.end() ? nullptr : &link_types_[it->second];
    };
    std::string name = link_name;
    if (name.empty()) {
        name = types_[st].name + "-" + types_[dt].name;
        if (!lookup(name)) {
            const LinkType* rev = lookup(types_[dt].name + "-" + types_[st].name);
            if (rev && rev->source_type == dt && rev->target_type == st) name = rev->name;
        }
    }
    if (const LinkType* known = lookup(name)) {
        if (known->source_type == st && known->target_type == dt) {
            lt = known->id;
        } else if (known->source_type == dt && known->target_type == st) {
            lt = known->id;
            reversed = true;
        } else {
            throw std::invalid_argument("link type '" + name + "' used between " + types_[st].name + " and " +
                                        types_[dt].name);
        }
    } else {
        lt = static_cast<int>(link_types_.size());
        link_types_.push_back({lt, st, dt, name});
        link_type_index_.emplace(name, lt);
    }
    links_.push_back({src, dst, lt, reversed});
    links_.push_back({dst, src, lt, !reversed});
    auto insert_sorted = [](std::vector<ObjectId>& v, ObjectId x) {
        auto pos = std::lower_bound(v.begin(), v.end(), x);
        if (pos == v.end() || *pos != x) v.insert(pos, x);
    };
    insert_sorted(adj_[src], dst);
    insert_sorted(adj_[dst], src);
}

std::optional<TypeId> Hin::find_type(const std::string& name) const {
    auto it = type_index_.find(name);
    if (it == type_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<ObjectId> Hin::find_object(const std::string& name) const {
    auto it = object_index_.find(name);
    if (it == object_index_.end()) return std::nullopt;
    return it->second;
}

const std::vector<ObjectId>& Hin::neighbors(ObjectId o) const { return adj_.at(o); }

bool Hin::linked(ObjectId u, ObjectId v) const {
    const auto& a = adj_.at(u);
    return std::binary_search(a.begin(), a.end(), v);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find('\t', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

bool skip_line(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line.empty() || line[0] == '#';
}

}  // namespace

Hin load_hin(std::istream& nodes, std::istream& edges) {
    Hin hin;
    std::string line;
    std::size_t n = 0;
    while (std::getline(nodes, line)) {
        ++n;
        if (skip_line(line)) continue;
        auto f = split_tabs(line);
        if (f.size() != 2 || f[0].empty() || f[1].empty())
            throw IngestError("nodes", n, "expected '<object_id>\\t<type_name>'");
        try {
            hin.add_object(f[0], hin.add_type(f[1]));
        } catch (const std::invalid_argument& e) {
            throw IngestError("nodes", n, e.what());
        }
    }
    n = 0;
    while (std::getline(edges, line)) {
        ++n;
        if (skip_line(line)) continue;
        auto f = split_tabs(line);
        if (f.size() < 2 || f.size() > 3) throw IngestError("edges", n, "expected '<src>\\t<dst>[\\t<link_type>]'");
        auto s = hin.find_object(f[0]);
        auto d = hin.find_object(f[1]);
        if (!s) throw IngestError("edges", n, "unknown object id '" + f[0] + "'");
        if (!d) throw IngestError("edges", n, "unknown object id '" + f[1] + "'");
        try {
            hin.add_link(*s, *d, f.size() == 3 ? f[2] : "");
        } catch (const std::invalid_argument& e) {
            throw IngestError("edges", n, e.what());
        }
    }
    return hin;
}

Hin load_hin_files(const std::string& nodes_path, const std::string& edges_path) {
    std::ifstream nodes(nodes_path);
    if (!nodes) throw IngestError(nodes_path, 0, "cannot open");
    std::ifstream edges(edges_path);
    if (!edges) throw IngestError(edges_path, 0, "cannot open");
    return load_hin(nodes, edges);
}

bool NetworkSchema::adjacent(TypeId a, TypeId b) const {
    const auto& v = adj.at(a);
    return std::binary_search(v.begin(), v.end(), b);
}

NetworkSchema extract_schema(const Hin& hin) {
    NetworkSchema s;
    int n = hin.type_count();
    s.adj.resize(n);
    s.self_loop.assign(n, false);
    for (int t = 0; t < n; ++t) s.names.push_back(hin.type(t).name);
    for (const auto& l : hin.links()) {
        TypeId a = hin.object_type(l.src), b = hin.object_type(l.dst);
        s.adj[a].push_back(b);
        s.adj[b].push_back(a);
    }
    for (int t = 0; t < n; ++t) {
        auto& v = s.adj[t];
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        s.self_loop[t] = std::binary_search(v.begin(), v.end(), t);
    }
    return s;
}

std::vector<int> bfs_distances(const NetworkSchema& schema, TypeId source) {
    if (source < 0 || source >= schema.type_count()) throw std::out_of_range("source type not in schema");
    std::vector<int> dist(schema.type_count(), -1);
    std::queue<TypeId> q;
    dist[source] = 0;
    q.push(source);
    while (!q.empty()) {
        TypeId u = q.front();
        q.pop();
        for (TypeId v : schema.adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
    }
    return dist;
}

int bfs_tree_height(const NetworkSchema& schema, TypeId source) {
    auto d = bfs_distances(schema, source);
    return *std::max_element(d.begin(), d.end());
}

}  // namespace hinsim
