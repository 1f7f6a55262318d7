#include "hinsim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

namespace hinsim {

namespace {

constexpr std::int64_t kMaxProduct = 50'000'000;

std::int64_t type_count_of(const Hin& hin, TypeId t) { return static_cast<std::int64_t>(hin.objects_of(t).size()); }

void check_types(const Hin& hin, const TypeSet& types) {
    if (types.empty()) throw std::invalid_argument("layer product over an empty type-set");
    if (!std::is_sorted(types.begin(), types.end()) ||
        std::adjacent_find(types.begin(), types.end()) != types.end())
        throw std::invalid_argument("type-set must be sorted and duplicate-free");
    for (TypeId t : types)
        if (t < 0 || t >= hin.type_count()) throw std::invalid_argument("type handle not present in the HIN");
}

std::vector<std::int64_t> make_strides(const Hin& hin, const TypeSet& types) {
    std::vector<std::int64_t> strides(types.size(), 1);
    for (int j = static_cast<int>(types.size()) - 2; j >= 0; --j) {
        strides[j] = strides[j + 1] * type_count_of(hin, types[j + 1]);
        if (strides[j] > kMaxProduct) throw std::length_error("cartesian product too large");
    }
    return strides;
}

// Objects allowed at each position of a tuple over `t_types` adjacent to `s`.
std::vector<std::vector<ObjectId>> allowed_sets(const Hin& hin, const NetworkSchema& schema,
                                                const TypeSet& s_types, const Tuple& s, const TypeSet& t_types) {
    std::vector<std::vector<ObjectId>> out(t_types.size());
    for (std::size_t j = 0; j < t_types.size(); ++j) {
        TypeId tt = t_types[j];
        bool constrained = false;
        std::vector<ObjectId> cur;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (!schema.adjacent(s_types[i], tt)) continue;
            if (!constrained) {
                for (ObjectId v : hin.neighbors(s[i]))
                    if (hin.object_type(v) == tt) cur.push_back(v);
                constrained = true;
            } else {
                std::vector<ObjectId> keep;
                for (ObjectId v : cur)
                    if (hin.linked(s[i], v)) keep.push_back(v);
                cur.swap(keep);
            }
            if (cur.empty()) break;
        }
        out[j] = constrained ? std::move(cur) : hin.objects_of(tt);
    }
    return out;
}

template <class F>
void for_each_product(const std::vector<std::vector<ObjectId>>& sets, F&& f) {
    for (const auto& s : sets)
        if (s.empty()) return;
    std::vector<std::size_t> idx(sets.size(), 0);
    Tuple t(sets.size());
    while (true) {
        for (std::size_t j = 0; j < sets.size(); ++j) t[j] = sets[j][idx[j]];
        f(t);
        int j = static_cast<int>(sets.size()) - 1;
        while (j >= 0 && ++idx[j] == sets[j].size()) idx[j--] = 0;
        if (j < 0) return;
    }
}

std::vector<Tuple> expand_set(const Hin& hin, const NetworkSchema& schema, const LayerProduct& from,
                              const TypeSet& to_types) {
    std::vector<Tuple> out;
    for (const auto& t : from.tuples) {
        auto adj = adjacent_tuples(hin, schema, from.types, t, to_types);
        out.insert(out.end(), adj.begin(), adj.end());
    }
    return out;
}

}  // namespace

bool LayerProduct::full() const {
    if (tuples.empty()) return false;
    return codes.back() == static_cast<std::int64_t>(tuples.size()) - 1;
}

std::int64_t LayerProduct::code_of(const Hin& hin, const Tuple& t) const {
    std::int64_t c = 0;
    for (std::size_t j = 0; j < t.size(); ++j) c += hin.ordinal(t[j]) * strides[j];
    return c;
}

std::optional<int> LayerProduct::find(const Hin& hin, const Tuple& t) const {
    if (t.size() != types.size()) return std::nullopt;
    for (std::size_t j = 0; j < t.size(); ++j)
        if (hin.object_type(t[j]) != types[j]) return std::nullopt;
    std::int64_t c = code_of(hin, t);
    if (full()) {
        if (c < size()) return static_cast<int>(c);
        return std::nullopt;
    }
    auto it = std::lower_bound(codes.begin(), codes.end(), c);
    if (it == codes.end() || *it != c) return std::nullopt;
    return static_cast<int>(it - codes.begin());
}

LayerProduct layer_product(const Hin& hin, const TypeSet& types) {
    check_types(hin, types);
    LayerProduct p;
    p.types = types;
    p.strides = make_strides(hin, types);
    std::int64_t total = p.strides[0] * type_count_of(hin, types[0]);
    if (total > kMaxProduct) throw std::length_error("cartesian product too large");
    std::vector<std::vector<ObjectId>> sets;
    for (TypeId t : types) sets.push_back(hin.objects_of(t));
    p.tuples.reserve(static_cast<std::size_t>(total));
    for_each_product(sets, [&](const Tuple& t) { p.tuples.push_back(t); });
    p.codes.resize(p.tuples.size());
    std::iota(p.codes.begin(), p.codes.end(), std::int64_t{0});
    return p;
}

LayerProduct layer_subset(const Hin& hin, const TypeSet& types, std::vector<Tuple> tuples) {
    check_types(hin, types);
    LayerProduct p;
    p.types = types;
    p.strides = make_strides(hin, types);
    std::vector<std::pair<std::int64_t, Tuple>> keyed;
    keyed.reserve(tuples.size());
    for (auto& t : tuples) {
        if (t.size() != types.size()) throw std::invalid_argument("tuple arity does not match type-set");
        for (std::size_t j = 0; j < t.size(); ++j)
            if (hin.object_type(t[j]) != types[j]) throw std::invalid_argument("tuple element has the wrong type");
        keyed.emplace_back(p.code_of(hin, t), std::move(t));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first == b.first; }),
                keyed.end());
    for (auto& [c, t] : keyed) {
        p.codes.push_back(c);
        p.tuples.push_back(std::move(t));
    }
    return p;
}

bool tuple_adjacent(const Hin& hin, const NetworkSchema& schema, const TypeSet& s_types, const Tuple& s,
                    const TypeSet& t_types, const Tuple& t) {
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < t.size(); ++j)
            if (schema.adjacent(s_types[i], t_types[j]) && !hin.linked(s[i], t[j])) return false;
    return true;
}

std::vector<Tuple> adjacent_tuples(const Hin& hin, const NetworkSchema& schema, const TypeSet& s_types,
                                   const Tuple& s, const TypeSet& t_types) {
    std::vector<Tuple> out;
    for_each_product(allowed_sets(hin, schema, s_types, s, t_types), [&](const Tuple& t) { out.push_back(t); });
    return out;
}

std::int64_t adjacent_count(const Hin& hin, const NetworkSchema& schema, const TypeSet& s_types, const Tuple& s,
                            const TypeSet& t_types) {
    std::int64_t n = 1;
    for (const auto& a : allowed_sets(hin, schema, s_types, s, t_types)) n *= static_cast<std::int64_t>(a.size());
    return n;
}

SpMat relation_matrix(const Hin& hin, const NetworkSchema& schema, const LayerProduct& rows,
                      const LayerProduct& cols) {
    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < rows.size(); ++r)
        for (const auto& t : adjacent_tuples(hin, schema, rows.types, rows.tuples[r], cols.types))
            if (auto c = cols.find(hin, t)) trips.emplace_back(r, *c, 1.0);
    SpMat m(rows.size(), cols.size());
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
}

PrunedPair prune_zero_columns(const SpMat& prev, const SpMat& next) {
    if (prev.cols() != next.rows()) throw std::invalid_argument("prune_zero_columns: inner dimensions differ");
    std::vector<bool> nonzero(prev.cols(), false);
    for (int r = 0; r < prev.outerSize(); ++r)
        for (SpMat::InnerIterator it(prev, r); it; ++it)
            if (it.value() != 0.0) nonzero[it.col()] = true;
    PrunedPair out;
    std::vector<int> remap(prev.cols(), -1);
    for (int c = 0; c < prev.cols(); ++c)
        if (nonzero[c]) {
            remap[c] = static_cast<int>(out.kept.size());
            out.kept.push_back(c);
        }
    const int k = static_cast<int>(out.kept.size());
    std::vector<Eigen::Triplet<double>> tp, tn;
    for (int r = 0; r < prev.outerSize(); ++r)
        for (SpMat::InnerIterator it(prev, r); it; ++it)
            if (remap[it.col()] >= 0) tp.emplace_back(r, remap[it.col()], it.value());
    for (int r = 0; r < next.outerSize(); ++r)
        if (remap[r] >= 0)
            for (SpMat::InnerIterator it(next, r); it; ++it) tn.emplace_back(remap[r], it.col(), it.value());
    out.prev.resize(prev.rows(), k);
    out.prev.setFromTriplets(tp.begin(), tp.end());
    out.next.resize(k, next.cols());
    out.next.setFromTriplets(tn.begin(), tn.end());
    return out;
}

SpMat row_normalize(const SpMat& m) {
    SpMat out = m;
    for (int r = 0; r < out.outerSize(); ++r) {
        double sum = 0.0;
        for (SpMat::InnerIterator it(out, r); it; ++it) {
            if (it.value() < 0.0) throw std::invalid_argument("row_normalize: negative entry");
            sum += it.value();
        }
        if (sum > 0.0)
            for (SpMat::InnerIterator it(out, r); it; ++it) it.valueRef() /= sum;
    }
    return out;
}

Dense row_normalize(const Dense& m) {
    if ((m.array() < 0.0).any()) throw std::invalid_argument("row_normalize: negative entry");
    Dense out = m;
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        double sum = out.row(r).sum();
        if (sum > 0.0) out.row(r) /= sum;
    }
    return out;
}

SpMat commuting_matrix(const Hin& hin, const NetworkSchema& schema, const MetaStructure& s, bool normalized) {
    validate_structure(s, schema);
    LayerProduct prev = layer_product(hin, s.layers[0]);
    SpMat acc(prev.size(), prev.size());
    acc.setIdentity();
    for (std::size_t i = 0; i + 1 < s.layers.size(); ++i) {
        LayerProduct next = layer_product(hin, s.layers[i + 1]);
        SpMat w = relation_matrix(hin, schema, prev, next);
        if (normalized) w = row_normalize(w);
        acc = (acc * w).pruned();
        prev = std::move(next);
    }
    return acc;
}

Vec lu_solve(const Dense& a, const Vec& b) {
    Dense x = lu_solve(a, Dense(b));
    return x.col(0);
}

Dense lu_solve(const Dense& a, const Dense& b) {
    if (a.rows() != a.cols()) throw std::invalid_argument("lu_solve: matrix is not square");
    if (a.rows() != b.rows()) throw std::invalid_argument("lu_solve: right-hand side has the wrong length");
    if (a.rows() == 0) return Dense(0, b.cols());
    Eigen::PartialPivLU<Dense> lu(a);
    if (!(lu.rcond() > 1e-14)) throw std::runtime_error("lu_solve: matrix is singular to working precision");
    return lu.solve(b);
}

Dense truncated_series(const Dense& left, const Dense& rbar, const Dense& right, double lambda, int k) {
    Dense term = left;
    Dense acc = left;
    for (int j = 1; j <= k; ++j) {
        term = lambda * (term * rbar);
        acc += term;
    }
    return (1.0 - lambda) * acc * right;
}

void write_matrix(std::ostream& os, const SpMat& m) {
    os << "# rows=" << m.rows() << " cols=" << m.cols() << "\n";
    char buf[64];
    for (int r = 0; r < m.outerSize(); ++r)
        for (SpMat::InnerIterator it(m, r); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.17g", it.value());
            os << r << " " << it.col() << " " << buf << "\n";
        }
}

void write_matrix(std::ostream& os, const Dense& m) { write_matrix(os, SpMat(m.sparseView())); }

void SmsWeights::validate(int h0) const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie strictly inside (0,1)");
    if (static_cast<int>(w.size()) != h0)
        throw std::invalid_argument("expected " + std::to_string(h0) + " weights, got " + std::to_string(w.size()));
    double sum = 0.0;
    for (double x : w) {
        if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("weights must lie in [0,1]");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("weights must sum to 1");
}

LocalChain localized_chain(const Hin& hin, const Sms& sms, ObjectId source) {
    if (hin.object_type(source) != sms.source_type)
        throw std::invalid_argument("source object '" + hin.object_name(source) + "' is not of the SMS source type");
    const NetworkSchema& schema = sms.schema;
    LocalChain chain;
    chain.source = source;
    for (int k = 1; k <= sms.h0; ++k) {
        MetaStructure ms = meta_structure_at(sms, 2 * k);
        HalfChain hc;
        hc.layer_types.assign(ms.layers.begin(), ms.layers.begin() + k + 1);
        hc.sets.push_back(layer_subset(hin, hc.layer_types[0], std::vector<Tuple>{Tuple{source}}));
        for (int i = 0; i < k; ++i) {
            hc.sets.push_back(
                layer_subset(hin, hc.layer_types[i + 1], expand_set(hin, schema, hc.sets[i], hc.layer_types[i + 1])));
            hc.raw.push_back(relation_matrix(hin, schema, hc.sets[i], hc.sets[i + 1]));
        }
        chain.terms.push_back(std::move(hc));
    }
    const HalfChain& last = chain.terms.back();
    if (last.layer_types.back() != sms.recurrent_first)
        throw std::logic_error("middle layer of S_2h0 differs from the recurrent block");
    chain.rec_first = last.sets.back();
    chain.rec_second =
        layer_subset(hin, sms.recurrent_second, expand_set(hin, schema, chain.rec_first, sms.recurrent_second));
    chain.rec = relation_matrix(hin, schema, chain.rec_first, chain.rec_second);
    for (auto& t : expand_set(hin, schema, chain.rec_second, sms.recurrent_first))
        if (!chain.rec_first.find(hin, t)) chain.dropped.push_back(std::move(t));
    std::sort(chain.dropped.begin(), chain.dropped.end());
    chain.dropped.erase(std::unique(chain.dropped.begin(), chain.dropped.end()), chain.dropped.end());
    return chain;
}

namespace {

// Pushes `z` (over hc.sets[k]) back to layer 0 through the globally
// row-normalized relation matrices, i.e. evaluates A_2k(t, C_k) z for every t.
Vec backward_to_targets(const Hin& hin, const Sms& sms, const HalfChain& hc, Vec z) {
    const NetworkSchema& schema = sms.schema;
    const int k = static_cast<int>(hc.sets.size()) - 1;
    LayerProduct support = hc.sets[k];
    for (int i = k - 1; i >= 0; --i) {
        std::vector<Tuple> keep;
        for (int r = 0; r < support.size(); ++r)
            if (z[r] != 0.0) keep.push_back(support.tuples[r]);
        LayerProduct nz = layer_subset(hin, support.types, keep);
        Vec znz(nz.size());
        for (int r = 0; r < nz.size(); ++r) znz[r] = z[*support.find(hin, nz.tuples[r])];
        const TypeSet& up = hc.layer_types[i];
        LayerProduct prev = layer_subset(hin, up, expand_set(hin, schema, nz, up));
        SpMat b = relation_matrix(hin, schema, prev, nz);
        Vec y = b * znz;
        for (int r = 0; r < prev.size(); ++r) {
            auto deg = adjacent_count(hin, schema, up, prev.tuples[r], hc.layer_types[i + 1]);
            y[r] = deg ? y[r] / static_cast<double>(deg) : 0.0;
        }
        support = std::move(prev);
        z = std::move(y);
    }
    const auto& targets = hin.objects_of(sms.target_type);
    Vec out = Vec::Zero(static_cast<Eigen::Index>(targets.size()));
    for (int r = 0; r < support.size(); ++r) out[hin.ordinal(support.tuples[r][0])] += z[r];
    return out;
}

}  // namespace

std::vector<Vec> sms_term_rows(const Hin& hin, const Sms& sms, const LocalChain& chain, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie strictly inside (0,1)");
    std::vector<Vec> rows;
    for (int k = 1; k <= sms.h0; ++k) {
        const HalfChain& hc = chain.terms[k - 1];
        Eigen::RowVectorXd a = Eigen::RowVectorXd::Ones(1);
        for (const auto& w : hc.raw) a = a * row_normalize(w);
        Vec z = a.transpose();
        if (k == sms.h0 && z.size() > 0) {
            Dense r = Dense(chain.rec) * Dense(chain.rec).transpose();
            Dense m = Dense::Identity(r.rows(), r.cols()) - lambda * row_normalize(r);
            z = (1.0 - lambda) * lu_solve(Dense(m.transpose()), z);
        }
        rows.push_back(backward_to_targets(hin, sms, hc, z));
    }
    return rows;
}

Vec sms_commuting_row(const Hin& hin, const Sms& sms, ObjectId source, const SmsWeights& weights) {
    weights.validate(sms.h0);
    auto rows = sms_term_rows(hin, sms, localized_chain(hin, sms, source), weights.lambda);
    Vec out = Vec::Zero(rows[0].size());
    for (int k = 0; k < sms.h0; ++k) out += weights.w[k] * rows[k];
    return out;
}

std::vector<Dense> sms_term_matrices_global(const Hin& hin, const Sms& sms, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie strictly inside (0,1)");
    const NetworkSchema& schema = sms.schema;
    std::vector<Dense> out;
    for (int k = 1; k <= sms.h0; ++k) {
        MetaStructure ms = meta_structure_at(sms, 2 * k);
        LayerProduct prev = layer_product(hin, ms.layers[0]);
        SpMat a(prev.size(), prev.size());
        a.setIdentity();
        for (int i = 0; i < k; ++i) {
            LayerProduct next = layer_product(hin, ms.layers[i + 1]);
            a = (a * row_normalize(relation_matrix(hin, schema, prev, next))).pruned();
            prev = std::move(next);
        }
        if (k < sms.h0) {
            out.push_back(Dense(a * SpMat(a.transpose())));
            continue;
        }
        if (prev.size() > 20000) throw std::length_error("recurrent layer too large for the global variant");
        LayerProduct second = layer_product(hin, sms.recurrent_second);
        SpMat w = relation_matrix(hin, schema, prev, second);
        Dense r = row_normalize(Dense(w * SpMat(w.transpose())));
        Dense m = Dense::Identity(r.rows(), r.cols()) - lambda * r;
        Dense y = lu_solve(m, Dense(SpMat(a.transpose())));
        out.push_back((1.0 - lambda) * (a * y));
    }
    return out;
}

std::vector<Dense> sms_term_matrices(const Hin& hin, const Sms& sms, double lambda, Locality locality,
                                     int threads) {
    if (locality == Locality::global) return sms_term_matrices_global(hin, sms, lambda);
    const auto& sources = hin.objects_of(sms.source_type);
    const auto n = static_cast<Eigen::Index>(sources.size());
    std::vector<Dense> out(sms.h0, Dense::Zero(n, static_cast<Eigen::Index>(hin.objects_of(sms.target_type).size())));
    std::vector<std::exception_ptr> errors(std::max(1, threads));
    auto work = [&](std::size_t begin, std::size_t step) {
        try {
            for (std::size_t i = begin; i < sources.size(); i += step) {
                auto rows = sms_term_rows(hin, sms, localized_chain(hin, sms, sources[i]), lambda);
                for (int k = 0; k < sms.h0; ++k) out[k].row(static_cast<Eigen::Index>(i)) = rows[k].transpose();
            }
        } catch (...) {
            errors[begin] = std::current_exception();
        }
    };
    threads = std::max(1, threads);
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(work, static_cast<std::size_t>(t), static_cast<std::size_t>(threads));
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

Dense combine_terms(const std::vector<Dense>& terms, const std::vector<double>& w) {
    if (terms.size() != w.size()) throw std::invalid_argument("weight count does not match term count");
    Dense out = Dense::Zero(terms[0].rows(), terms[0].cols());
    for (std::size_t k = 0; k < terms.size(); ++k) out += w[k] * terms[k];
    return out;
}

}  // namespace hinsim
