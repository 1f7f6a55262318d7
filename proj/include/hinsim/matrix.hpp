#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hinsim/hin.hpp"
#include "hinsim/sms.hpp"

namespace hinsim {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Dense = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Tuple = std::vector<ObjectId>;  // one object per type of the owning TypeSet

// Ordered set of object tuples over a type-set. Tuples are kept in
// lexicographic order of (type handle, per-type ordinal); `codes` holds the
// mixed-radix rank of each tuple inside the full cartesian product.
struct LayerProduct {
    TypeSet types;
    std::vector<Tuple> tuples;
    std::vector<std::int64_t> codes;
    std::vector<std::int64_t> strides;

    int size() const { return static_cast<int>(tuples.size()); }
    bool full() const;
    std::int64_t code_of(const Hin& hin, const Tuple& t) const;
    // Row of `t`, or nullopt when the tuple is not part of this set.
    std::optional<int> find(const Hin& hin, const Tuple& t) const;
};

LayerProduct layer_product(const Hin& hin, const TypeSet& types);
// Subset of the cartesian product over `types`; duplicates are dropped.
LayerProduct layer_subset(const Hin& hin, const TypeSet& types, std::vector<Tuple> tuples);

bool tuple_adjacent(const Hin& hin, const NetworkSchema& schema, const TypeSet& s_types, const Tuple& s,
                    const TypeSet& t_types, const Tuple& t);
// All tuples over `t_types` adjacent to `s`, in LayerProduct order.
std::vector<Tuple> adjacent_tuples(const Hin& hin, const NetworkSchema& schema, const TypeSet& s_types,
                                   const Tuple& s, const TypeSet& t_types);
std::int64_t adjacent_count(const Hin& hin, const NetworkSchema& schema, const TypeSet& s_types, const Tuple& s,
                            const TypeSet& t_types);

SpMat relation_matrix(const Hin& hin, const NetworkSchema& schema, const LayerProduct& rows,
                      const LayerProduct& cols);

struct PrunedPair {
    SpMat prev;
    SpMat next;
    std::vector<int> kept;  // surviving column indices of the original `prev`
};
PrunedPair prune_zero_columns(const SpMat& prev, const SpMat& next);

SpMat row_normalize(const SpMat& m);
Dense row_normalize(const Dense& m);

// Rows and columns follow per-type ordinals of the source and target types.
SpMat commuting_matrix(const Hin& hin, const NetworkSchema& schema, const MetaStructure& s, bool normalized);

Vec lu_solve(const Dense& a, const Vec& b);
Dense lu_solve(const Dense& a, const Dense& b);

// (1-lambda) * left * (sum_{j=0..K} lambda^j rbar^j) * right
Dense truncated_series(const Dense& left, const Dense& rbar, const Dense& right, double lambda, int k);

void write_matrix(std::ostream& os, const SpMat& m);
void write_matrix(std::ostream& os, const Dense& m);

struct SmsWeights {
    double lambda = 0.5;
    std::vector<double> w;
    void validate(int h0) const;
};

enum class Locality { local, global };

// Forward half of S_{2k} restricted to what the source reaches.
struct HalfChain {
    std::vector<TypeSet> layer_types;
    std::vector<LayerProduct> sets;  // sets[0] = {source}
    std::vector<SpMat> raw;          // raw[i] : sets[i] x sets[i+1], 0/1
};

struct LocalChain {
    ObjectId source = -1;
    std::vector<HalfChain> terms;  // terms[k-1] covers S_{2k}, k = 1..h0
    LayerProduct rec_first;        // frozen C_{L_{h0}}
    LayerProduct rec_second;       // frozen C_{L_{h0+1}}
    SpMat rec;                     // rec_first x rec_second
    std::vector<Tuple> dropped;    // C_{L_{h0+2}} minus C_{L_{h0}}
};

LocalChain localized_chain(const Hin& hin, const Sms& sms, ObjectId source);

// One row per weight slot, indexed by target-type ordinal. Row k-1 is the
// S_{2k} contribution; the last row carries the (1-lambda) recurrent factor.
std::vector<Vec> sms_term_rows(const Hin& hin, const Sms& sms, const LocalChain& chain, double lambda);
Vec sms_commuting_row(const Hin& hin, const Sms& sms, ObjectId source, const SmsWeights& weights);

// Same terms over full (non-localized) layer products, one matrix per slot.
std::vector<Dense> sms_term_matrices_global(const Hin& hin, const Sms& sms, double lambda);
std::vector<Dense> sms_term_matrices(const Hin& hin, const Sms& sms, double lambda, Locality locality,
                                     int threads = 1);
Dense combine_terms(const std::vector<Dense>& terms, const std::vector<double>& w);

}  // namespace hinsim
