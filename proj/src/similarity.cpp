#include "hinsim/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <stdexcept>

namespace hinsim {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

SimilarityResult blank(const Hin& hin, TypeId target, ObjectId source, std::string metric) {
    SimilarityResult r;
    r.source = source;
    r.metric = std::move(metric);
    r.targets = hin.objects_of(target);
    r.scores = Vec::Zero(static_cast<Eigen::Index>(r.targets.size()));
    return r;
}

void check_source(const Hin& hin, const MetaStructure& s, ObjectId o) {
    if (o < 0 || o >= hin.object_count()) throw std::invalid_argument("unknown object handle");
    if (hin.object_type(o) != s.source_type)
        throw std::invalid_argument("object '" + hin.object_name(o) + "' does not match the structure's source type");
}

bool is_symmetric(const MetaStructure& s) {
    for (std::size_t i = 0, j = s.layers.size() - 1; i < j; ++i, --j)
        if (s.layers[i] != s.layers[j]) return false;
    return true;
}

}  // namespace

std::vector<std::pair<ObjectId, double>> SimilarityResult::ranked(const Hin& hin) const {
    std::vector<std::pair<ObjectId, double>> out;
    for (std::size_t i = 0; i < targets.size(); ++i) out.emplace_back(targets[i], scores[static_cast<Eigen::Index>(i)]);
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return hin.object_name(a.first) < hin.object_name(b.first);
    });
    return out;
}

Dense smss_from_commuting(const Dense& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("SMSS needs a square commuting matrix");
    Dense out = Dense::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double den = m(i, i) + m(j, j);
            out(i, j) = den > 0.0 ? 2.0 * m(i, j) / den : 0.0;
        }
    return out;
}

SmssEngine::SmssEngine(const Hin& hin, const Sms& sms, SmsWeights weights, Locality locality)
    : hin_(hin), sms_(sms), weights_(std::move(weights)), locality_(locality) {
    weights_.validate(sms.h0);
}

Vec SmssEngine::commuting_row(ObjectId source) {
    if (hin_.object_type(source) != sms_.source_type)
        throw std::invalid_argument("object '" + hin_.object_name(source) + "' is not of the SMS source type");
    if (locality_ == Locality::global) {
        std::lock_guard<std::mutex> lock(mu_);
        if (!full_)
            full_ = combine_terms(sms_term_matrices_global(hin_, sms_, weights_.lambda), weights_.w);
        return full_->row(hin_.ordinal(source)).transpose();
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = rows_.find(source);
        if (it != rows_.end()) return it->second;
    }
    Vec row = sms_commuting_row(hin_, sms_, source, weights_);
    std::lock_guard<std::mutex> lock(mu_);
    return rows_.emplace(source, std::move(row)).first->second;
}

double SmssEngine::self_entry(ObjectId object) { return commuting_row(object)[hin_.ordinal(object)]; }

SimilarityResult SmssEngine::similarity(ObjectId source) {
    SimilarityResult r = blank(hin_, sms_.target_type, source, "smss");
    Vec row = commuting_row(source);
    double own = row[hin_.ordinal(source)];
    for (std::size_t i = 0; i < r.targets.size(); ++i) {
        auto ix = static_cast<Eigen::Index>(i);
        if (row[ix] == 0.0) continue;
        double den = own + self_entry(r.targets[i]);
        r.scores[ix] = den > 0.0 ? 2.0 * row[ix] / den : 0.0;
    }
    r.params = {{"lambda", fmt(weights_.lambda)}, {"locality", locality_ == Locality::local ? "local" : "global"}};
    std::string w;
    for (double x : weights_.w) w += (w.empty() ? "" : ",") + fmt(x);
    r.params.emplace_back("w", w);
    return r;
}

Dense SmssEngine::commuting_matrix(int threads) {
    auto terms = sms_term_matrices(hin_, sms_, weights_.lambda, locality_, threads);
    return combine_terms(terms, weights_.w);
}

Dense SmssEngine::similarity_matrix(int threads) { return smss_from_commuting(commuting_matrix(threads)); }

SimilarityResult smss(const Hin& hin, const Sms& sms, ObjectId source, const SmsWeights& weights, Locality locality) {
    SmssEngine engine(hin, sms, weights, locality);
    return engine.similarity(source);
}

double pathsim(const Hin& hin, const NetworkSchema& schema, const MetaStructure& path, ObjectId s, ObjectId t) {
    if (!is_symmetric(path)) throw std::invalid_argument("PathSim needs a symmetric meta path");
    check_source(hin, path, s);
    check_source(hin, path, t);
    SpMat m = commuting_matrix(hin, schema, path, false);
    int a = hin.ordinal(s), b = hin.ordinal(t);
    double den = m.coeff(a, a) + m.coeff(b, b);
    if (den == 0.0) {
        std::cerr << "warning: PathSim denominator is zero for " << hin.object_name(s) << " and "
                  << hin.object_name(t) << "\n";
        return 0.0;
    }
    return 2.0 * m.coeff(a, b) / den;
}

SimilarityResult pathsim_row(const Hin& hin, const NetworkSchema& schema, const MetaStructure& path, ObjectId s) {
    if (!is_symmetric(path)) throw std::invalid_argument("PathSim needs a symmetric meta path");
    check_source(hin, path, s);
    SpMat m = commuting_matrix(hin, schema, path, false);
    SimilarityResult r = blank(hin, path.target_type, s, "pathsim");
    int a = hin.ordinal(s);
    for (Eigen::Index b = 0; b < r.scores.size(); ++b) {
        double den = m.coeff(a, a) + m.coeff(b, b);
        r.scores[b] = den > 0.0 ? 2.0 * m.coeff(a, b) / den : 0.0;
    }
    r.params = {{"structure", notation(path, schema)}};
    return r;
}

SimilarityResult bpcrw(const Hin& hin, const NetworkSchema& schema, const MetaStructure& path, ObjectId s,
                       double alpha) {
    if (!path.is_path()) throw std::invalid_argument("BPCRW needs a meta path");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    validate_structure(path, schema);
    check_source(hin, path, s);
    SimilarityResult r = blank(hin, path.target_type, s, "bpcrw");
    const int last = path.height();
    std::function<void(ObjectId, int, double)> walk = [&](ObjectId o, int step, double mass) {
        if (step == last) {
            r.scores[hin.ordinal(o)] += mass;
            return;
        }
        TypeId next = path.layers[step + 1][0];
        std::vector<ObjectId> nbrs;
        for (ObjectId v : hin.neighbors(o))
            if (hin.object_type(v) == next) nbrs.push_back(v);
        if (nbrs.empty()) return;
        double share = mass / std::pow(static_cast<double>(nbrs.size()), alpha);
        for (ObjectId v : nbrs) walk(v, step + 1, share);
    };
    walk(s, 0, 1.0);
    r.params = {{"structure", notation(path, schema)}, {"alpha", fmt(alpha)}};
    return r;
}

SimilarityResult bscse(const Hin& hin, const NetworkSchema& schema, const MetaStructure& structure, ObjectId s,
                       double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0,1]");
    validate_structure(structure, schema);
    check_source(hin, structure, s);
    SimilarityResult r = blank(hin, structure.target_type, s, "bscse");
    std::vector<LayerProduct> layers;
    for (const auto& l : structure.layers) layers.push_back(layer_product(hin, l));
    const int last = structure.height();
    std::function<void(const Tuple&, int, double)> expand = [&](const Tuple& sigma, int i, double mass) {
        if (i == last) {
            r.scores[hin.ordinal(sigma[0])] += mass;
            return;
        }
        std::vector<const Tuple*> next;
        for (const auto& t : layers[i + 1].tuples)
            if (tuple_adjacent(hin, schema, structure.layers[i], sigma, structure.layers[i + 1], t)) next.push_back(&t);
        if (next.empty()) return;
        double share = mass / std::pow(static_cast<double>(next.size()), alpha);
        for (const Tuple* t : next) expand(*t, i + 1, share);
    };
    expand(Tuple{s}, 0, 1.0);
    r.params = {{"structure", notation(structure, schema)}, {"alpha", fmt(alpha)}};
    return r;
}

}  // namespace hinsim
