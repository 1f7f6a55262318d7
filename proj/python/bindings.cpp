#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hinsim/eval.hpp"
#include "hinsim/hin.hpp"
#include "hinsim/matrix.hpp"
#include "hinsim/similarity.hpp"
#include "hinsim/sms.hpp"

namespace py = pybind11;
using namespace hinsim;

namespace {

TypeId type_of(const Hin& hin, const std::string& name) {
    auto t = hin.find_type(name);
    if (!t) throw py::key_error("unknown type '" + name + "'");
    return *t;
}

ObjectId object_of(const Hin& hin, const std::string& name) {
    auto o = hin.find_object(name);
    if (!o) throw py::key_error("unknown object '" + name + "'");
    return *o;
}

std::vector<std::string> names(const Hin& hin, const std::string& type) {
    std::vector<std::string> out;
    for (ObjectId o : hin.objects_of(type_of(hin, type))) out.push_back(hin.object_name(o));
    return out;
}

std::vector<std::vector<std::string>> typeset_names(const NetworkSchema& s, const std::vector<TypeSet>& layers) {
    std::vector<std::vector<std::string>> out;
    for (const auto& l : layers) {
        out.emplace_back();
        for (TypeId t : l) out.back().push_back(s.names[t]);
    }
    return out;
}

Locality parse_locality(const std::string& s) {
    if (s == "local") return Locality::local;
    if (s == "global") return Locality::global;
    throw py::value_error("locality must be 'local' or 'global'");
}

}  // namespace

PYBIND11_MODULE(_hinsim, m) {
    m.doc() = "Similarity search over heterogeneous information networks";

    py::register_exception<IngestError>(m, "IngestError", PyExc_ValueError);

    py::class_<Hin>(m, "Hin")
        .def_property_readonly("type_count", &Hin::type_count)
        .def_property_readonly("object_count", &Hin::object_count)
        .def_property_readonly("link_count", [](const Hin& h) { return h.links().size() / 2; })
        .def("types", [](const Hin& h) {
            std::vector<std::string> out;
            for (TypeId t = 0; t < h.type_count(); ++t) out.push_back(h.type(t).name);
            return out;
        })
        .def("objects", &names, py::arg("type"))
        .def("type_of", [](const Hin& h, const std::string& o) { return h.type(h.object_type(object_of(h, o))).name; })
        .def("neighbors", [](const Hin& h, const std::string& o) {
            std::vector<std::string> out;
            for (ObjectId v : h.neighbors(object_of(h, o))) out.push_back(h.object_name(v));
            return out;
        });

    m.def("load", &load_hin_files, py::arg("nodes"), py::arg("edges"), "Load a network from two TSV files.");

    m.def("schema", [](const Hin& h) {
        NetworkSchema s = extract_schema(h);
        std::vector<std::pair<std::string, std::string>> edges;
        for (TypeId a = 0; a < s.type_count(); ++a)
            for (TypeId b : s.adj[a])
                if (a <= b) edges.emplace_back(s.names[a], s.names[b]);
        return edges;
    });

    m.def("h0", [](const Hin& h, const std::string& type) {
        return bfs_tree_height(extract_schema(h), type_of(h, type));
    });

    m.def(
        "sms_layers",
        [](const Hin& h, const std::string& type, int depth) {
            Sms sms = build_sms(extract_schema(h), type_of(h, type));
            std::vector<TypeSet> layers;
            for (int i = 0; i <= depth; ++i) layers.push_back(layer_types(sms, i));
            return typeset_names(sms.schema, layers);
        },
        py::arg("hin"), py::arg("source_type"), py::arg("depth"));

    m.def(
        "meta_structure",
        [](const Hin& h, const std::string& type, int height) {
            Sms sms = build_sms(extract_schema(h), type_of(h, type));
            return notation(meta_structure_at(sms, height), sms.schema);
        },
        py::arg("hin"), py::arg("source_type"), py::arg("height"));

    m.def(
        "commuting_matrix",
        [](const Hin& h, const std::string& structure, bool normalized) {
            NetworkSchema s = extract_schema(h);
            return Dense(commuting_matrix(h, s, parse_structure(structure, s), normalized));
        },
        py::arg("hin"), py::arg("structure"), py::arg("normalized") = false);

    m.def(
        "sms_commuting_matrix",
        [](const Hin& h, const std::string& type, double lambda, std::vector<double> w, const std::string& loc,
           int threads) {
            Sms sms = build_sms(extract_schema(h), type_of(h, type));
            py::gil_scoped_release release;
            return SmssEngine(h, sms, {lambda, std::move(w)}, parse_locality(loc)).commuting_matrix(threads);
        },
        py::arg("hin"), py::arg("source_type"), py::arg("lam"), py::arg("weights"), py::arg("locality") = "local",
        py::arg("threads") = 1);

    m.def(
        "smss_matrix",
        [](const Hin& h, const std::string& type, double lambda, std::vector<double> w, const std::string& loc,
           int threads) {
            Sms sms = build_sms(extract_schema(h), type_of(h, type));
            py::gil_scoped_release release;
            return SmssEngine(h, sms, {lambda, std::move(w)}, parse_locality(loc)).similarity_matrix(threads);
        },
        py::arg("hin"), py::arg("source_type"), py::arg("lam"), py::arg("weights"), py::arg("locality") = "local",
        py::arg("threads") = 1);

    m.def(
        "pathsim",
        [](const Hin& h, const std::string& path, const std::string& a, const std::string& b) {
            NetworkSchema s = extract_schema(h);
            return pathsim(h, s, parse_structure(path, s), object_of(h, a), object_of(h, b));
        },
        py::arg("hin"), py::arg("path"), py::arg("a"), py::arg("b"));

    m.def("nmi", &nmi, py::arg("pred"), py::arg("truth"));
    m.def(
        "ndcg",
        [](const std::vector<int>& ranking, const std::map<int, int>& gains, int at) {
            return ndcg(ranking, std::unordered_map<ObjectId, int>(gains.begin(), gains.end()), at);
        },
        py::arg("ranking"), py::arg("gains"), py::arg("at") = 0);
    m.def("kmeans", &kmeans, py::arg("features"), py::arg("k"), py::arg("seed") = 1, py::arg("max_iter") = 300);
}
