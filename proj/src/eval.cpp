#include "hinsim/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

#include "hinsim/similarity.hpp"

namespace hinsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::vector<std::string> fields(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

ObjectId require_object(const Hin& hin, const std::string& name, const char* file, std::size_t line) {
    auto o = hin.find_object(name);
    if (!o) throw IngestError(file, line, "unknown object id '" + name + "'");
    return *o;
}

double entropy(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0) h -= c / n * std::log(c / n);
    return h;
}

std::vector<int> densify(const std::vector<int>& labels) {
    std::map<int, int> ids;
    std::vector<int> out;
    for (int l : labels) out.push_back(ids.emplace(l, static_cast<int>(ids.size())).first->second);
    return out;
}

}  // namespace

ClusteringBenchmark load_benchmark(std::istream& in, const Hin& hin) {
    ClusteringBenchmark b;
    std::map<std::string, int> label_ids;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line[0] == '#' || line == "\r") continue;
        auto f = fields(line);
        if (f.size() != 2) throw IngestError("benchmark", n, "expected '<object_id>\\t<cluster_label>'");
        b.objects.push_back(require_object(hin, f[0], "benchmark", n));
        b.labels.push_back(label_ids.emplace(f[1], static_cast<int>(label_ids.size())).first->second);
    }
    // Relabel to first-seen order so label ids do not depend on string order.
    b.labels = densify(b.labels);
    b.k = static_cast<int>(label_ids.size());
    return b;
}

RelevanceJudgments load_judgments(std::istream& in, const Hin& hin) {
    RelevanceJudgments j;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty() || line[0] == '#' || line == "\r") continue;
        auto f = fields(line);
        if (f.size() != 3) throw IngestError("judgments", n, "expected '<source_id>\\t<object_id>\\t<gain>'");
        int gain = -1;
        try {
            std::size_t used = 0;
            gain = std::stoi(f[2], &used);
            if (used != f[2].size()) gain = -1;
        } catch (const std::exception&) {
        }
        if (gain < 0 || gain > 3) throw IngestError("judgments", n, "gain must be an integer in 0..3");
        j.by_source[require_object(hin, f[0], "judgments", n)][require_object(hin, f[1], "judgments", n)] = gain;
    }
    return j;
}

std::vector<int> kmeans(const Dense& x, int k, std::uint64_t seed, int max_iter) {
    const Eigen::Index n = x.rows();
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (k > n) throw std::invalid_argument("k exceeds the number of rows");
    std::mt19937_64 rng(seed);
    Dense centers(k, x.cols());
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());
    centers.row(0) = x.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d2[i] = std::min(d2[i], (x.row(i) - centers.row(c - 1)).squaredNorm());
            total += d2[i];
        }
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double u = std::uniform_real_distribution<double>(0.0, total)(rng);
            for (pick = 0; pick < n - 1; ++pick) {
                u -= d2[pick];
                if (u < 0.0) break;
            }
        } else {
            pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
        }
        centers.row(c) = x.row(pick);
    }
    std::vector<int> assign(n, -1);
    for (int iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d = (x.row(i) - centers.row(c)).squaredNorm();
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (!changed) break;
        Dense sums = Dense::Zero(k, x.cols());
        std::vector<int> counts(k, 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(assign[i]) += x.row(i);
            ++counts[assign[i]];
        }
        for (int c = 0; c < k; ++c)
            if (counts[c]) centers.row(c) = sums.row(c) / counts[c];
    }
    return assign;
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.empty() || truth.empty()) throw std::invalid_argument("nmi of an empty labelling");
    if (pred.size() != truth.size()) throw std::invalid_argument("nmi inputs differ in length");
    auto p = densify(pred), t = densify(truth);
    int kp = *std::max_element(p.begin(), p.end()) + 1, kt = *std::max_element(t.begin(), t.end()) + 1;
    const double n = static_cast<double>(p.size());
    std::vector<double> joint(static_cast<std::size_t>(kp) * kt, 0.0), cp(kp, 0.0), ct(kt, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        joint[static_cast<std::size_t>(p[i]) * kt + t[i]] += 1;
        cp[p[i]] += 1;
        ct[t[i]] += 1;
    }
    double hp = entropy(cp, n), ht = entropy(ct, n);
    if (hp == 0.0 && ht == 0.0) return 1.0;
    double mi = 0.0;
    for (int a = 0; a < kp; ++a)
        for (int b = 0; b < kt; ++b) {
            double c = joint[static_cast<std::size_t>(a) * kt + b];
            if (c > 0) mi += c / n * std::log(c * n / (cp[a] * ct[b]));
        }
    return std::clamp(mi / (0.5 * (hp + ht)), 0.0, 1.0);
}

double ndcg(const std::vector<ObjectId>& ranking, const std::unordered_map<ObjectId, int>& gains, int at) {
    std::size_t len = at > 0 ? std::min<std::size_t>(at, ranking.size()) : ranking.size();
    double dcg = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        auto it = gains.find(ranking[i]);
        if (it != gains.end()) dcg += it->second / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<int> ideal;
    for (const auto& [o, g] : gains) ideal.push_back(g);
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(len, ideal.size()); ++i) idcg += ideal[i] / std::log2(static_cast<double>(i) + 2.0);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

std::vector<std::vector<double>> sample_weights(double a, double b, int h0, int samples, std::uint64_t seed) {
    if (!(a > 0.0 && b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("Beta hyper-parameters must be positive");
    if (h0 < 1) throw std::invalid_argument("h0 must be at least 1");
    if (samples < 0) throw std::invalid_argument("sample count must be non-negative");
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
    auto beta = [&] {
        double x = ga(rng), y = gb(rng);
        return x + y > 0.0 ? x / (x + y) : 0.5;
    };
    std::vector<std::vector<double>> out;
    for (int s = 0; s < samples; ++s) {
        std::vector<double> w;
        if (h0 == 1) {
            w = {1.0};
        } else if (h0 == 2) {
            double w0 = beta();
            w = {w0, 1.0 - w0};
        } else {
            double sum = 0.0;
            for (int i = 0; i < h0; ++i) {
                w.push_back(beta());
                sum += w.back();
            }
            for (double& x : w) x /= sum;
        }
        out.push_back(std::move(w));
    }
    return out;
}

double cluster_score(const Dense& similarity, const Hin& hin, const ClusteringBenchmark& bench, std::uint64_t seed) {
    Dense features(static_cast<Eigen::Index>(bench.objects.size()), similarity.cols());
    for (std::size_t i = 0; i < bench.objects.size(); ++i)
        features.row(static_cast<Eigen::Index>(i)) = similarity.row(hin.ordinal(bench.objects[i]));
    return nmi(kmeans(features, bench.k, seed), bench.labels);
}

double rank_score(const Dense& similarity, const Hin& hin, ObjectId source,
                  const std::unordered_map<ObjectId, int>& gains, int at) {
    const auto& objs = hin.objects_of(hin.object_type(source));
    const auto row = similarity.row(hin.ordinal(source));
    std::vector<ObjectId> ranking;
    for (ObjectId o : objs)
        if (o != source) ranking.push_back(o);
    std::sort(ranking.begin(), ranking.end(), [&](ObjectId x, ObjectId y) {
        double a = row[hin.ordinal(x)], b = row[hin.ordinal(y)];
        if (a != b) return a > b;
        return hin.object_name(x) < hin.object_name(y);
    });
    return ndcg(ranking, gains, at);
}

namespace {

template <class Score>
SweepResult run_sweep(const Hin& hin, const Sms& sms, const SweepConfig& cfg, Score&& score) {
    for (double l : cfg.lambdas)
        if (!(l > 0.0 && l < 1.0)) throw std::invalid_argument("lambda grid values must lie in (0,1)");
    struct Cell {
        int pair, sample;
        std::vector<double> w;
    };
    std::vector<Cell> cells;
    if (!cfg.fixed_weights.empty()) {
        for (std::size_t i = 0; i < cfg.fixed_weights.size(); ++i)
            cells.push_back({-1, static_cast<int>(i), cfg.fixed_weights[i]});
    } else {
        for (std::size_t p = 0; p < cfg.beta_pairs.size(); ++p) {
            auto [a, b] = cfg.beta_pairs[p];
            if (a < 1.0 || b < 1.0) throw std::invalid_argument("Beta hyper-parameters must be >= 1");
            auto ws = sample_weights(a, b, sms.h0, cfg.samples, splitmix64(cfg.seed ^ splitmix64(p + 1)));
            for (std::size_t s = 0; s < ws.size(); ++s) cells.push_back({static_cast<int>(p), static_cast<int>(s), ws[s]});
        }
    }
    SweepResult res;
    res.best.score = -1.0;
    for (double lambda : cfg.lambdas) {
        auto terms = sms_term_matrices(hin, sms, lambda, cfg.locality, cfg.threads);
        SweepRow best;
        best.score = -1.0;
        for (const auto& c : cells) {
            SmsWeights{lambda, c.w}.validate(sms.h0);
            SweepRow row{lambda, c.pair, c.sample, c.w, score(smss_from_commuting(combine_terms(terms, c.w)))};
            if (row.score > best.score) best = row;
            res.rows.push_back(std::move(row));
        }
        if (!cells.empty()) {
            res.best_per_lambda.push_back(best);
            if (best.score > res.best.score) res.best = best;
        }
    }
    return res;
}

}  // namespace

SweepResult sweep_cluster(const Hin& hin, const Sms& sms, const ClusteringBenchmark& bench, const SweepConfig& cfg) {
    if (bench.objects.empty()) throw std::invalid_argument("empty clustering benchmark");
    for (ObjectId o : bench.objects)
        if (hin.object_type(o) != sms.target_type)
            throw std::invalid_argument("benchmark object '" + hin.object_name(o) + "' is not of the target type");
    return run_sweep(hin, sms, cfg, [&](const Dense& sim) { return cluster_score(sim, hin, bench, cfg.seed); });
}

SweepResult sweep_rank(const Hin& hin, const Sms& sms, ObjectId source, const std::unordered_map<ObjectId, int>& gains,
                       const SweepConfig& cfg, int at) {
    if (hin.object_type(source) != sms.source_type) throw std::invalid_argument("source is not of the SMS source type");
    return run_sweep(hin, sms, cfg, [&](const Dense& sim) { return rank_score(sim, hin, source, gains, at); });
}

}  // namespace hinsim
