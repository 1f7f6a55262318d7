#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hinsim/eval.hpp"
#include "hinsim/hin.hpp"
#include "hinsim/similarity.hpp"
#include "hinsim/sms.hpp"
#include "synth.hpp"

#ifndef HINSIM_VERSION
#define HINSIM_VERSION "dev"
#endif

using namespace hinsim;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string nodes, edges, out, dump;
    std::string source, target, source_type;
    std::string metric = "smss";
    std::string path;
    std::string weights;
    std::string locality = "local";
    double lambda = 0.5;
    double alpha = 1.0;
    std::string benchmark, judgments;
    int at = 0;
    std::string task = "cluster";
    std::string lambdas = "0.1,0.3,0.5,0.7,0.9";
    std::string beta_pairs = "1:9,2:8,3:7,4:6,5:5,6:4,7:3,8:2,9:1";
    int samples = 10;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string synth_dir;
    int synth_authors = 450, synth_papers = 1500, synth_venues = 45, synth_communities = 3;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError(std::string("cannot parse ") + what + " '" + text + "'");
        }
    }
    return out;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
    std::vector<std::pair<double, double>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw UsageError("beta pairs look like 1:9,2:8");
        out.emplace_back(parse_list(item.substr(0, colon), "beta pair")[0],
                         parse_list(item.substr(colon + 1), "beta pair")[0]);
    }
    return out;
}

std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string w_json(const std::vector<double>& w) { return nlohmann::json(w).dump(); }

class Output {
public:
    Output(const Options& o, const std::string& config, const std::string& command) {
        if (!o.out.empty()) {
            file_.open(o.out);
            if (!file_) throw std::runtime_error("cannot write " + o.out);
        }
        os() << "# hinsim " << HINSIM_VERSION << "\n";
        os() << "# config_hash " << hex64(fnv1a(config)) << "\n";
        os() << "# seed " << o.seed << "\n";
        os() << "# command " << command << "\n";
    }
    std::ostream& os() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

Hin load(const Options& o) {
    if (o.nodes.empty() || o.edges.empty()) throw UsageError("--nodes and --edges are required");
    return load_hin_files(o.nodes, o.edges);
}

ObjectId object(const Hin& hin, const std::string& name, const char* flag) {
    if (name.empty()) throw UsageError(std::string(flag) + " is required");
    auto id = hin.find_object(name);
    if (!id) throw UsageError("unknown object '" + name + "'");
    return *id;
}

TypeId source_type(const Hin& hin, const Options& o) {
    if (!o.source_type.empty()) {
        auto t = hin.find_type(o.source_type);
        if (!t) throw UsageError("unknown type '" + o.source_type + "'");
        return *t;
    }
    if (!o.source.empty()) return hin.object_type(object(hin, o.source, "--source"));
    throw UsageError("--source-type or --source is required");
}

Locality locality(const Options& o) {
    if (o.locality == "local") return Locality::local;
    if (o.locality == "global") return Locality::global;
    throw UsageError("--locality must be local or global");
}

Sms sms_for(const NetworkSchema& schema, const Hin& hin, const Options& o) {
    Sms sms = build_sms(schema, source_type(hin, o));
    for (TypeId t : sms.dropped_types)
        std::cerr << "warning: type " << schema.names[t] << " is unreachable from the source and was dropped\n";
    return sms;
}

SmsWeights weights(const Options& o) {
    if (o.weights.empty()) throw UsageError("--weights is required for smss");
    return {o.lambda, parse_list(o.weights, "--weights")};
}

void print_ranked(std::ostream& os, const Hin& hin, const SimilarityResult& r, const std::string& only_target) {
    for (const auto& [t, s] : r.ranked(hin)) {
        if (!only_target.empty() && hin.object_name(t) != only_target) continue;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", s);
        os << hin.object_name(r.source) << "\t" << hin.object_name(t) << "\t" << buf << "\n";
    }
}

// Similarity matrix over all objects of the source type, for any metric.
Dense similarity_matrix(const Hin& hin, const NetworkSchema& schema, const Options& o) {
    if (o.metric == "smss") {
        Sms sms = sms_for(schema, hin, o);
        SmssEngine engine(hin, sms, weights(o), locality(o));
        return engine.similarity_matrix(o.threads);
    }
    if (o.path.empty()) throw UsageError("--path is required for " + o.metric);
    MetaStructure path = parse_structure(o.path, schema);
    const auto& objs = hin.objects_of(path.source_type);
    Dense m(objs.size(), hin.objects_of(path.target_type).size());
    for (std::size_t i = 0; i < objs.size(); ++i) {
        SimilarityResult r;
        if (o.metric == "pathsim")
            r = pathsim_row(hin, schema, path, objs[i]);
        else if (o.metric == "bpcrw")
            r = bpcrw(hin, schema, path, objs[i], o.alpha);
        else if (o.metric == "bscse")
            r = bscse(hin, schema, path, objs[i], o.alpha);
        else
            throw UsageError("unknown metric '" + o.metric + "'");
        m.row(static_cast<Eigen::Index>(i)) = r.scores.transpose();
    }
    return m;
}

int cmd_ingest(const Options& o, const std::string& config) {
    Hin hin = load(o);
    Output out(o, config, "ingest");
    out.os() << hin.type_count() << " object types, " << hin.link_types().size() << " link types, "
             << hin.object_count() << " objects\n";
    for (int t = 0; t < hin.type_count(); ++t)
        out.os() << "type\t" << hin.type(t).name << "\t" << hin.objects_of(t).size() << "\n";
    std::vector<std::size_t> per_link(hin.link_types().size(), 0);
    for (const auto& l : hin.links())
        if (!l.reversed) ++per_link[l.link_type];
    for (const auto& lt : hin.link_types())
        out.os() << "link\t" << lt.name << "\t" << hin.type(lt.source_type).name << "\t"
                 << hin.type(lt.target_type).name << "\t" << per_link[lt.id] << "\n";
    return 0;
}

int cmd_schema(const Options& o, const std::string& config) {
    Hin hin = load(o);
    NetworkSchema schema = extract_schema(hin);
    Output out(o, config, "schema");
    for (int a = 0; a < schema.type_count(); ++a)
        for (TypeId b : schema.adj[a])
            if (a <= b) out.os() << schema.names[a] << "\t" << schema.names[b] << "\n";
    if (!o.source_type.empty() || !o.source.empty()) {
        TypeId s = source_type(hin, o);
        out.os() << "# h0(" << schema.names[s] << ")=" << bfs_tree_height(schema, s) << "\n";
    }
    return 0;
}

int cmd_sms_show(const Options& o, const std::string& config) {
    Hin hin = load(o);
    NetworkSchema schema = extract_schema(hin);
    Sms sms = sms_for(schema, hin, o);
    Output out(o, config, "sms show");
    auto labels = [&](const TypeSet& s, int layer) {
        std::string r;
        for (TypeId t : s) r += (r.empty() ? "" : " ") + schema.names[t] + "_" + std::to_string(layer);
        return r;
    };
    out.os() << "h0\t" << sms.h0 << "\n";
    for (int h = 0; h <= 2 * sms.h0 + 2; ++h) out.os() << "L" << h << "\t" << labels(layer_types(sms, h), h) << "\n";
    out.os() << "L1'\t" << labels(sms.l1_prime, 1) << "\n";
    out.os() << "recurrent\t" << labels(sms.recurrent_first, sms.h0) << " | "
             << labels(sms.recurrent_second, sms.h0 + 1) << "\n";
    for (int h = 2; h <= 2 * sms.h0 + 2; h += 2)
        out.os() << "S" << h << "\t" << notation(meta_structure_at(sms, h), schema) << "\tn=" << n_recurrences(h, sms.h0)
                 << "\n";
    if (sms.degenerate) out.os() << "# degenerate: recurrent block falls back to the target type\n";
    if (sms.odd_target_layers) out.os() << "# warning: target type appears on odd layers\n";
    return 0;
}

int cmd_sim(const Options& o, const std::string& config) {
    Hin hin = load(o);
    NetworkSchema schema = extract_schema(hin);
    ObjectId src = object(hin, o.source, "--source");
    SimilarityResult r;
    std::string params;
    if (o.metric == "smss") {
        Sms sms = sms_for(schema, hin, o);
        SmsWeights w = weights(o);
        SmssEngine engine(hin, sms, w, locality(o));
        r = engine.similarity(src);
        if (!o.dump.empty()) {
            std::ofstream d(o.dump);
            if (!d) throw std::runtime_error("cannot write " + o.dump);
            write_matrix(d, engine.commuting_matrix(o.threads));
        }
    } else {
        if (o.path.empty()) throw UsageError("--path is required for " + o.metric);
        MetaStructure path = parse_structure(o.path, schema);
        if (o.metric == "pathsim")
            r = pathsim_row(hin, schema, path, src);
        else if (o.metric == "bpcrw")
            r = bpcrw(hin, schema, path, src, o.alpha);
        else if (o.metric == "bscse")
            r = bscse(hin, schema, path, src, o.alpha);
        else
            throw UsageError("unknown metric '" + o.metric + "'");
        if (!o.dump.empty()) {
            std::ofstream d(o.dump);
            if (!d) throw std::runtime_error("cannot write " + o.dump);
            write_matrix(d, commuting_matrix(hin, schema, path, false));
        }
    }
    Output out(o, config, "sim");
    out.os() << "# metric " << r.metric << "\n";
    for (const auto& [k, v] : r.params) out.os() << "# " << k << " " << v << "\n";
    print_ranked(out.os(), hin, r, o.target);
    return 0;
}

int cmd_eval_cluster(const Options& o, const std::string& config) {
    if (o.benchmark.empty()) throw UsageError("--benchmark is required");
    Hin hin = load(o);
    NetworkSchema schema = extract_schema(hin);
    std::ifstream in(o.benchmark);
    if (!in) throw UsageError("cannot read benchmark " + o.benchmark);
    ClusteringBenchmark bench = load_benchmark(in, hin);
    Dense sim = similarity_matrix(hin, schema, o);
    double score = cluster_score(sim, hin, bench, o.seed);
    Output out(o, config, "eval cluster");
    out.os() << "# k " << bench.k << "\n";
    out.os() << "metric\tlambda\tw_json\tnmi\n";
    out.os() << o.metric << "\t" << (o.metric == "smss" ? fmt(o.lambda) : "-") << "\t"
             << (o.metric == "smss" ? w_json(weights(o).w) : "[]") << "\t" << fmt(score) << "\n";
    return 0;
}

int cmd_eval_rank(const Options& o, const std::string& config) {
    if (o.judgments.empty()) throw UsageError("--judgments is required");
    Hin hin = load(o);
    NetworkSchema schema = extract_schema(hin);
    ObjectId src = object(hin, o.source, "--source");
    std::ifstream in(o.judgments);
    if (!in) throw UsageError("cannot read judgments " + o.judgments);
    RelevanceJudgments j = load_judgments(in, hin);
    auto it = j.by_source.find(src);
    if (it == j.by_source.end()) throw UsageError("no judgments for source '" + o.source + "'");
    Dense sim = similarity_matrix(hin, schema, o);
    double score = rank_score(sim, hin, src, it->second, o.at);
    Output out(o, config, "eval rank");
    out.os() << "metric\tlambda\tw_json\tndcg\n";
    out.os() << o.metric << "\t" << (o.metric == "smss" ? fmt(o.lambda) : "-") << "\t"
             << (o.metric == "smss" ? w_json(weights(o).w) : "[]") << "\t" << fmt(score) << "\n";
    return 0;
}

int cmd_sweep(const Options& o, const std::string& config) {
    Hin hin = load(o);
    NetworkSchema schema = extract_schema(hin);
    SweepConfig cfg;
    cfg.lambdas = parse_list(o.lambdas, "--lambdas");
    cfg.beta_pairs = parse_pairs(o.beta_pairs);
    cfg.samples = o.samples;
    cfg.seed = o.seed;
    cfg.locality = locality(o);
    cfg.threads = o.threads;
    if (!o.weights.empty()) cfg.fixed_weights = {parse_list(o.weights, "--weights")};
    SweepResult res;
    if (o.task == "cluster") {
        if (o.benchmark.empty()) throw UsageError("--benchmark is required for --task cluster");
        std::ifstream in(o.benchmark);
        if (!in) throw UsageError("cannot read benchmark " + o.benchmark);
        ClusteringBenchmark bench = load_benchmark(in, hin);
        Sms sms = sms_for(schema, hin, o);
        res = sweep_cluster(hin, sms, bench, cfg);
    } else if (o.task == "rank") {
        if (o.judgments.empty()) throw UsageError("--judgments is required for --task rank");
        ObjectId src = object(hin, o.source, "--source");
        std::ifstream in(o.judgments);
        if (!in) throw UsageError("cannot read judgments " + o.judgments);
        RelevanceJudgments j = load_judgments(in, hin);
        auto it = j.by_source.find(src);
        if (it == j.by_source.end()) throw UsageError("no judgments for source '" + o.source + "'");
        Sms sms = sms_for(schema, hin, o);
        res = sweep_rank(hin, sms, src, it->second, cfg, o.at);
    } else {
        throw UsageError("--task must be cluster or rank");
    }
    Output out(o, config, "sweep");
    out.os() << "# task " << o.task << "\n";
    out.os() << "lambda\tw_json\tscore\n";
    for (const auto& r : res.rows) out.os() << fmt(r.lambda) << "\t" << w_json(r.w) << "\t" << fmt(r.score) << "\n";
    for (const auto& r : res.best_per_lambda)
        out.os() << "# best_at_lambda " << fmt(r.lambda) << "\t" << w_json(r.w) << "\t" << fmt(r.score) << "\n";
    out.os() << "# best " << fmt(res.best.lambda) << "\t" << w_json(res.best.w) << "\t" << fmt(res.best.score) << "\n";
    return 0;
}

int cmd_synth(const Options& o) {
    if (o.synth_dir.empty()) throw UsageError("--dir is required");
    PlantedConfig cfg;
    cfg.authors = o.synth_authors;
    cfg.papers = o.synth_papers;
    cfg.venues = o.synth_venues;
    cfg.communities = o.synth_communities;
    cfg.seed = o.seed;
    PlantedData d = planted_partition(cfg);
    std::filesystem::create_directories(o.synth_dir);
    auto write = [&](const char* name, const std::string& body) {
        std::ofstream f(std::filesystem::path(o.synth_dir) / name);
        if (!f) throw std::runtime_error(std::string("cannot write ") + name);
        f << body;
    };
    write("nodes.tsv", d.nodes);
    write("edges.tsv", d.edges);
    write("benchmark.tsv", d.benchmark);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Similarity search over heterogeneous information networks"};
    app.set_version_flag("--version", HINSIM_VERSION);
    app.set_config("--config", "", "key=value file; flags on the command line win");
    // Values such as "A,P,(V,T),P,A" or "0.3,0.7" are parsed by hinsim itself.
    auto fmt = std::make_shared<CLI::ConfigTOML>();
    fmt->arrayDelimiter('\x1f');
    app.config_formatter(fmt);
    app.require_subcommand(1);
    Options o;
    app.add_option("--nodes", o.nodes, "nodes TSV: <object_id>\\t<type>");
    app.add_option("--edges", o.edges, "edges TSV: <src>\\t<dst>[\\t<link_type>]");
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--dump", o.dump, "write the commuting matrix in coordinate format");
    app.add_option("--source", o.source, "source object id");
    app.add_option("--target", o.target, "restrict output to one target object");
    app.add_option("--source-type", o.source_type, "source type name");
    app.add_option("--metric", o.metric, "smss | pathsim | bpcrw | bscse");
    app.add_option("--path", o.path, "meta path or structure, e.g. A,P,(V,T),P,A");
    app.add_option("--weights", o.weights, "comma-separated w_0..w_{h0-1}");
    app.add_option("--lambda", o.lambda, "decaying factor in (0,1)");
    app.add_option("--locality", o.locality, "local | global");
    app.add_option("--alpha", o.alpha, "bias exponent for bpcrw/bscse");
    app.add_option("--benchmark", o.benchmark, "cluster labels TSV");
    app.add_option("--judgments", o.judgments, "relevance TSV");
    app.add_option("--at", o.at, "nDCG cutoff, 0 = full list");
    app.add_option("--task", o.task, "sweep task: cluster | rank");
    app.add_option("--lambdas", o.lambdas, "sweep lambda grid");
    app.add_option("--beta-pairs", o.beta_pairs, "sweep Beta pairs a:b,...");
    app.add_option("--samples", o.samples, "weight samples per Beta pair");
    app.add_option("--seed", o.seed, "64-bit seed");
    app.add_option("--threads", o.threads, "worker threads")->envname("HINSIM_THREADS")->check(CLI::PositiveNumber);
    app.add_option("--dir", o.synth_dir, "synth output directory");
    app.add_option("--authors", o.synth_authors, "synth author count");
    app.add_option("--papers", o.synth_papers, "synth paper count");
    app.add_option("--venues", o.synth_venues, "synth venue count");
    app.add_option("--communities", o.synth_communities, "synth community count");

    auto* ingest = app.add_subcommand("ingest", "load and validate a network, print a census")->fallthrough();
    auto* schema = app.add_subcommand("schema", "print the network schema")->fallthrough();
    auto* sms = app.add_subcommand("sms", "stratified meta structure tools")->fallthrough();
    auto* sms_show = sms->add_subcommand("show", "print layers 0..2h0+2")->fallthrough();
    sms->require_subcommand(1);
    auto* sim = app.add_subcommand("sim", "similarity scores for one source")->fallthrough();
    auto* eval = app.add_subcommand("eval", "clustering / ranking evaluation")->fallthrough();
    auto* eval_cluster = eval->add_subcommand("cluster", "k-means + NMI against a benchmark")->fallthrough();
    auto* eval_rank = eval->add_subcommand("rank", "nDCG against relevance judgments")->fallthrough();
    eval->require_subcommand(1);
    auto* sweep = app.add_subcommand("sweep", "lambda x Beta-sampled weight sweep")->fallthrough();
    auto* synth = app.add_subcommand("synth", "write a planted-partition network")->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const std::string config = app.config_to_str(false, false);
    try {
        if (*ingest) return cmd_ingest(o, config);
        if (*schema) return cmd_schema(o, config);
        if (*sms_show) return cmd_sms_show(o, config);
        if (*sim) return cmd_sim(o, config);
        if (*eval_cluster) return cmd_eval_cluster(o, config);
        if (*eval_rank) return cmd_eval_rank(o, config);
        if (*sweep) return cmd_sweep(o, config);
        if (*synth) return cmd_synth(o);
    } catch (const IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 64;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
