#pragma once

#include <string>
#include <vector>

#include "hinsim/hin.hpp"

namespace hinsim {

// Sorted by type handle.
using TypeSet = std::vector<TypeId>;

// Layered structure with a single source and target type. A meta path is the
// special case where every layer holds exactly one type.
struct MetaStructure {
    std::vector<TypeSet> layers;
    TypeId source_type = -1;
    TypeId target_type = -1;

    bool is_path() const;
    int height() const { return static_cast<int>(layers.size()) - 1; }
    bool operator==(const MetaStructure&) const = default;
};

MetaStructure make_meta_path(const std::vector<TypeId>& types);
MetaStructure make_meta_structure(std::vector<TypeSet> layers);
// Parses "A,P,(V,T),P,A" against the type names of `schema`.
MetaStructure parse_structure(const std::string& text, const NetworkSchema& schema);
std::string notation(const MetaStructure& s, const NetworkSchema& schema);
MetaStructure reverse(const MetaStructure& s);
// Throws std::invalid_argument when some type in layer i has no schema
// neighbor in layer i+1 (or the reverse).
void validate_structure(const MetaStructure& s, const NetworkSchema& schema);

// One layer of the explicit (unpruned to infinity) expansion. `types` are the
// expandable entries; `has_target` marks a pruned target occurrence.
struct ExpandedLayer {
    TypeSet types;
    bool has_target = false;
    bool operator==(const ExpandedLayer&) const = default;
};

std::vector<ExpandedLayer> expand_layers(const NetworkSchema& schema, TypeId source, int depth);

struct Sms {
    TypeId source_type = -1;
    TypeId target_type = -1;
    int h0 = 0;
    std::vector<TypeSet> basic_layers;  // L_0 .. L_{h0+1}
    TypeSet recurrent_first;            // L_{h0}
    TypeSet recurrent_second;           // L_{h0+1}, or {target} when degenerate
    bool degree1_flag = false;
    TypeSet l1_prime;
    // Every neighbor of the source is a leaf, so L_2 is empty and the
    // recurrent block falls back to (L_1, {target}).
    bool degenerate = false;
    bool odd_target_layers = false;
    std::vector<TypeId> dropped_types;  // unreachable from the source
    NetworkSchema schema;
};

Sms build_sms(const NetworkSchema& schema, TypeId source);
TypeSet layer_types(const Sms& sms, int h);
int n_recurrences(int h, int h0);
MetaStructure meta_structure_at(const Sms& sms, int h);

}  // namespace hinsim
