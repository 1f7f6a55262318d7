#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hinsim/matrix.hpp"

namespace hinsim {

struct SimilarityResult {
    ObjectId source = -1;
    std::string metric;
    std::vector<ObjectId> targets;  // objects of the target type, ordinal order
    Vec scores;
    std::vector<std::pair<std::string, std::string>> params;

    // Descending score, ties by object id ascending.
    std::vector<std::pair<ObjectId, double>> ranked(const Hin& hin) const;
};

// 2 M(s,t) / (M(s,s) + M(t,t)); zero denominators give 0.
Dense smss_from_commuting(const Dense& m);

class SmssEngine {
public:
    SmssEngine(const Hin& hin, const Sms& sms, SmsWeights weights, Locality locality = Locality::local);

    Vec commuting_row(ObjectId source);
    double self_entry(ObjectId object);
    SimilarityResult similarity(ObjectId source);
    Dense commuting_matrix(int threads = 1);
    Dense similarity_matrix(int threads = 1);

private:
    const Hin& hin_;
    const Sms& sms_;
    SmsWeights weights_;
    Locality locality_;
    std::mutex mu_;
    std::unordered_map<ObjectId, Vec> rows_;
    std::optional<Dense> full_;
};

SimilarityResult smss(const Hin& hin, const Sms& sms, ObjectId source, const SmsWeights& weights,
                      Locality locality = Locality::local);

// Works for any symmetric meta structure, meta paths included.
double pathsim(const Hin& hin, const NetworkSchema& schema, const MetaStructure& path, ObjectId s, ObjectId t);
SimilarityResult pathsim_row(const Hin& hin, const NetworkSchema& schema, const MetaStructure& path, ObjectId s);

SimilarityResult bpcrw(const Hin& hin, const NetworkSchema& schema, const MetaStructure& path, ObjectId s,
                       double alpha);
SimilarityResult bscse(const Hin& hin, const NetworkSchema& schema, const MetaStructure& structure, ObjectId s,
                       double alpha);

}  // namespace hinsim
