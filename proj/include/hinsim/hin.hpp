#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace hinsim {

using TypeId = int;
using ObjectId = int;

// Raised on malformed input files; `line` is 1-based, 0 when not tied to a line.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& file, std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

struct ObjectType {
    TypeId id;
    std::string name;
};

struct LinkType {
    int id;
    TypeId source_type;
    TypeId target_type;
    std::string name;
};

struct Link {
    ObjectId src;
    ObjectId dst;
    int link_type;
    bool reversed;  // stored reverse copy of an input edge
};

class Hin {
public:
    TypeId add_type(const std::string& name);
    ObjectId add_object(const std::string& name, TypeId type);
    // Adds src->dst and dst->src. Empty name derives "<srcType>-<dstType>".
    void add_link(ObjectId src, ObjectId dst, const std::string& link_name = "");

    int type_count() const { return static_cast<int>(types_.size()); }
    const ObjectType& type(TypeId t) const { return types_.at(t); }
    std::optional<TypeId> find_type(const std::string& name) const;

    int object_count() const { return static_cast<int>(object_names_.size()); }
    const std::string& object_name(ObjectId o) const { return object_names_.at(o); }
    TypeId object_type(ObjectId o) const { return object_types_.at(o); }
    // Dense ordinal of `o` among the objects of its type, first-seen order.
    int ordinal(ObjectId o) const { return ordinals_.at(o); }
    const std::vector<ObjectId>& objects_of(TypeId t) const { return by_type_.at(t); }
    std::optional<ObjectId> find_object(const std::string& name) const;

    const std::vector<LinkType>& link_types() const { return link_types_; }
    const std::vector<Link>& links() const { return links_; }
    // Sorted, duplicate-free neighbor list.
    const std::vector<ObjectId>& neighbors(ObjectId o) const;
    bool linked(ObjectId u, ObjectId v) const;

private:
    std::vector<ObjectType> types_;
    std::unordered_map<std::string, TypeId> type_index_;
    std::vector<std::string> object_names_;
    std::vector<TypeId> object_types_;
    std::vector<int> ordinals_;
    std::vector<std::vector<ObjectId>> by_type_;
    std::unordered_map<std::string, ObjectId> object_index_;
    std::vector<LinkType> link_types_;
    std::unordered_map<std::string, int> link_type_index_;
    std::vector<Link> links_;
    std::vector<std::vector<ObjectId>> adj_;
};

Hin load_hin(std::istream& nodes, std::istream& edges);
Hin load_hin_files(const std::string& nodes_path, const std::string& edges_path);

struct NetworkSchema {
    std::vector<std::string> names;
    std::vector<std::vector<TypeId>> adj;  // sorted; contains t itself on a self-loop
    std::vector<bool> self_loop;

    int type_count() const { return static_cast<int>(names.size()); }
    bool adjacent(TypeId a, TypeId b) const;
    int degree(TypeId t) const { return static_cast<int>(adj.at(t).size()); }
};

NetworkSchema extract_schema(const Hin& hin);

// BFS distances from `source`; -1 for unreachable types.
std::vector<int> bfs_distances(const NetworkSchema& schema, TypeId source);
int bfs_tree_height(const NetworkSchema& schema, TypeId source);

}  // namespace hinsim
