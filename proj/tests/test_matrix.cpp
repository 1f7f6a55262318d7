#include <doctest.h>

#include <sstream>

#include "helpers.hpp"

using namespace hinsim;
using namespace testutil;

namespace {

Dense dblp_golden() {
    Dense g(5, 5);
    g << 6, 6, 0, 0, 0, 6, 18, 14, 14, 8, 0, 14, 20, 20, 11, 0, 14, 20, 20, 11, 0, 8, 11, 11, 9;
    return g;
}

// Reachable tuple rows of the last layer of `half`, from `source`, by brute force.
std::vector<int> reachable(const Hin& hin, const NetworkSchema& schema, const std::vector<TypeSet>& half,
                           ObjectId source) {
    Dense counts = brute_force_counts(hin, schema, half);
    std::vector<int> out;
    for (Eigen::Index c = 0; c < counts.cols(); ++c)
        if (counts(hin.ordinal(source), c) > 0) out.push_back(static_cast<int>(c));
    return out;
}

}  // namespace

TEST_CASE("layer products enumerate the cartesian product in order") {
    Hin hin = toy();
    TypeId V = typ(hin, "V"), T = typ(hin, "T"), A = typ(hin, "A");
    LayerProduct vt = layer_product(hin, {V, T});
    CHECK(vt.size() == 36);
    CHECK(vt.full());
    CHECK(vt.tuples[0] == Tuple{obj(hin, "CIKM"), obj(hin, "NetworkSchema")});
    CHECK(vt.tuples[1] == Tuple{obj(hin, "CIKM"), obj(hin, "RelationStrength")});
    CHECK(vt.tuples[9] == Tuple{obj(hin, "TKDE"), obj(hin, "NetworkSchema")});
    for (int i = 0; i < vt.size(); ++i) CHECK(vt.find(hin, vt.tuples[i]) == i);
    LayerProduct av = layer_product(hin, {A, V});
    CHECK(av.size() == 20);
    int n = 0;
    for (ObjectId a : hin.objects_of(A))
        for (ObjectId v : hin.objects_of(V)) CHECK(av.tuples[n++] == Tuple{a, v});
}

TEST_CASE("layer subsets find only their members") {
    Hin hin = toy();
    TypeId V = typ(hin, "V"), T = typ(hin, "T");
    Tuple a{obj(hin, "VLDB"), obj(hin, "HIN")}, b{obj(hin, "CIKM"), obj(hin, "Ranking")};
    LayerProduct s = layer_subset(hin, {V, T}, {a, b, a});
    CHECK(s.size() == 2);
    CHECK_FALSE(s.full());
    CHECK(s.tuples[0] == b);
    CHECK(s.find(hin, a) == 1);
    CHECK_FALSE(s.find(hin, Tuple{obj(hin, "TKDE"), obj(hin, "HIN")}).has_value());
}

TEST_CASE("tuple adjacency requires every cross-type pair to be linked") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    TypeId P = typ(hin, "P"), V = typ(hin, "V"), T = typ(hin, "T");
    Tuple p{obj(hin, "HeteSim")};
    CHECK(tuple_adjacent(hin, schema, {P}, p, {V, T}, {obj(hin, "TKDE"), obj(hin, "Similarity")}));
    CHECK_FALSE(tuple_adjacent(hin, schema, {P}, p, {V, T}, {obj(hin, "TKDE"), obj(hin, "Ranking")}));
    CHECK_FALSE(tuple_adjacent(hin, schema, {P}, p, {V, T}, {obj(hin, "VLDB"), obj(hin, "Similarity")}));
    CHECK(adjacent_count(hin, schema, {P}, p, {V, T}) == 4);
    CHECK(adjacent_tuples(hin, schema, {P}, p, {V, T}).size() == 4);
    CHECK(adjacent_count(hin, schema, {V, T}, {obj(hin, "VLDB"), obj(hin, "HIN")}, {P}) == 2);
}

TEST_CASE("relation matrix between single types is the incidence matrix") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    TypeId A = typ(hin, "A"), P = typ(hin, "P");
    SpMat w = relation_matrix(hin, schema, layer_product(hin, {A}), layer_product(hin, {P}));
    REQUIRE(w.rows() == 5);
    REQUIRE(w.cols() == 6);
    for (ObjectId a : hin.objects_of(A))
        for (ObjectId p : hin.objects_of(P)) CHECK(w.coeff(hin.ordinal(a), hin.ordinal(p)) == (hin.linked(a, p) ? 1.0 : 0.0));
}

TEST_CASE("relation matrix matches brute-force tuple adjacency on random HINs") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 40; ++trial) {
        Hin hin = random_hin(rng, 4, 20, 0.4);
        NetworkSchema schema = extract_schema(hin);
        MetaStructure m = random_structure(rng, schema, 3);
        for (std::size_t i = 0; i + 1 < m.layers.size(); ++i) {
            LayerProduct a = layer_product(hin, m.layers[i]), b = layer_product(hin, m.layers[i + 1]);
            SpMat w = relation_matrix(hin, schema, a, b);
            for (int r = 0; r < a.size(); ++r) {
                CHECK(adjacent_count(hin, schema, m.layers[i], a.tuples[r], m.layers[i + 1]) == w.row(r).sum());
                for (int c = 0; c < b.size(); ++c)
                    CHECK(w.coeff(r, c) ==
                          (tuple_adjacent(hin, schema, m.layers[i], a.tuples[r], m.layers[i + 1], b.tuples[c]) ? 1.0 : 0.0));
            }
        }
    }
}

TEST_CASE("pruning zero columns keeps the product") {
    SpMat a(2, 3), b(3, 2);
    a.insert(0, 0) = 1;
    a.insert(1, 2) = 2;
    b.insert(0, 1) = 3;
    b.insert(1, 0) = 5;
    b.insert(2, 0) = 7;
    PrunedPair p = prune_zero_columns(a, b);
    CHECK(p.kept == std::vector<int>{0, 2});
    CHECK(p.prev.cols() == 2);
    CHECK(p.next.rows() == 2);
    CHECK(Dense(p.prev * p.next) == Dense(a * b));
}

TEST_CASE("row normalization") {
    Dense m(3, 2);
    m << 1, 3, 0, 0, 2, 2;
    Dense n = row_normalize(m);
    CHECK(n(0, 0) == doctest::Approx(0.25));
    CHECK(n(0, 1) == doctest::Approx(0.75));
    CHECK(n.row(1).sum() == 0.0);
    CHECK(n(2, 1) == 0.5);
    SpMat s = row_normalize(SpMat(m.sparseView()));
    CHECK(Dense(s).isApprox(n));
    Dense neg(1, 2);
    neg << 1, -1;
    CHECK_THROWS_AS(row_normalize(neg), std::invalid_argument);
}

TEST_CASE("golden commuting matrix on the toy network") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    SpMat m = commuting_matrix(hin, schema, parse_structure("A,P,(V,T),P,A", schema), false);
    CHECK(Dense(m) == dblp_golden());
    SpMat apa = commuting_matrix(hin, schema, parse_structure("A,P,A", schema), false);
    CHECK(apa.coeff(1, 1) == 4.0);
    CHECK(apa.coeff(2, 3) == 4.0);
    CHECK(apa.coeff(0, 4) == 0.0);
}

TEST_CASE("commuting matrix identities") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    SpMat ap = commuting_matrix(hin, schema, parse_structure("A,P", schema), false);
    SpMat apa = commuting_matrix(hin, schema, parse_structure("A,P,A", schema), false);
    CHECK(Dense(apa) == Dense(ap * SpMat(ap.transpose())));
    SpMat apv = commuting_matrix(hin, schema, parse_structure("A,P,V", schema), false);
    SpMat vpa = commuting_matrix(hin, schema, parse_structure("V,P,A", schema), false);
    CHECK(Dense(vpa) == Dense(apv.transpose()));
    SpMat norm = commuting_matrix(hin, schema, parse_structure("A,P,(V,T),P", schema), true);
    for (int r = 0; r < norm.rows(); ++r) CHECK(norm.row(r).sum() == doctest::Approx(1.0));
}

TEST_CASE("commuting matrix counts instances on random HINs") {
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        Hin hin = random_hin(rng, 4, 18, 0.35);
        NetworkSchema schema = extract_schema(hin);
        MetaStructure m = random_structure(rng, schema, 4);
        Dense fast(commuting_matrix(hin, schema, m, false));
        Dense slow = brute_force_counts(hin, schema, m);
        CHECK(fast == slow);
        MetaStructure sym = m;
        for (int i = m.height() - 1; i >= 0; --i) sym.layers.push_back(m.layers[i]);
        sym.target_type = m.source_type;
        Dense c(commuting_matrix(hin, schema, sym, false));
        CHECK(c == c.transpose());
    }
}

TEST_CASE("lu_solve") {
    Dense a(2, 2);
    a << 4, 1, 2, 3;
    Vec b(2);
    b << 1, 2;
    Vec x = lu_solve(a, b);
    CHECK((a * x - b).norm() < 1e-14);
    Dense sing(2, 2);
    sing << 1, 2, 2, 4;
    CHECK_THROWS_AS(lu_solve(sing, b), std::runtime_error);
    CHECK_THROWS_AS(lu_solve(Dense(2, 3), b), std::invalid_argument);
}

TEST_CASE("truncated series converges to the resolvent") {
    Dense r(2, 2);
    r << 0.5, 0.5, 1.0, 0.0;
    Dense left = Dense::Identity(2, 2), right = Dense::Identity(2, 2);
    Dense series = truncated_series(left, r, right, 0.5, 200);
    Dense closed = 0.5 * lu_solve(Dense(Dense::Identity(2, 2) - 0.5 * r), Dense(Dense::Identity(2, 2)));
    CHECK((series - closed).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(truncated_series(left, r, right, 0.3, 0).isApprox(0.7 * left));
}

TEST_CASE("weights validation") {
    CHECK_NOTHROW(SmsWeights{0.5, {0.3, 0.7}}.validate(2));
    CHECK_THROWS(SmsWeights{0.5, {0.3, 0.7}}.validate(3));
    CHECK_THROWS(SmsWeights{0.5, {0.3, 0.6}}.validate(2));
    CHECK_THROWS(SmsWeights{1.0, {0.3, 0.7}}.validate(2));
    CHECK_THROWS(SmsWeights{0.0, {1.0}}.validate(1));
    CHECK_THROWS(SmsWeights{0.5, {1.5, -0.5}}.validate(2));
}

TEST_CASE("write_matrix format") {
    Dense m(2, 2);
    m << 0, 0.5, 3, 0;
    std::ostringstream os;
    write_matrix(os, m);
    CHECK(os.str() == "# rows=2 cols=2\n0 1 0.5\n1 0 3\n");
}

TEST_CASE("localized chain for Yizhou Sun") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    Sms sms = build_sms(schema, typ(hin, "A"));
    ObjectId ys = obj(hin, "Yizhou Sun");
    LocalChain chain = localized_chain(hin, sms, ys);
    REQUIRE(chain.terms.size() == 2);
    const HalfChain& h4 = chain.terms[1];
    CHECK(h4.sets[1].size() == 4);
    CHECK(h4.sets[1].find(hin, Tuple{obj(hin, "GenClus")}).has_value());
    CHECK_FALSE(h4.sets[1].find(hin, Tuple{obj(hin, "HeteSim")}).has_value());
    CHECK(h4.sets[2].find(hin, Tuple{obj(hin, "VLDB"), obj(hin, "HIN")}).has_value());
    std::vector<TypeSet> half{{typ(hin, "A")}, {typ(hin, "P")}, {typ(hin, "V"), typ(hin, "T")}};
    auto want = reachable(hin, schema, half, ys);
    LayerProduct full = layer_product(hin, half[2]);
    REQUIRE(static_cast<int>(want.size()) == h4.sets[2].size());
    for (int i = 0; i < h4.sets[2].size(); ++i) CHECK(h4.sets[2].tuples[i] == full.tuples[want[i]]);
    CHECK(chain.rec_first.size() == h4.sets[2].size());
    for (const char* p : {"NetClus", "GenClus", "PathSelClus", "PathSim"})
        CHECK(chain.rec_second.find(hin, Tuple{obj(hin, p)}).has_value());
    CHECK(chain.rec_second.size() == 4);
    CHECK(chain.dropped.empty());
}

TEST_CASE("localized terms match an independent truncated-series evaluation") {
    std::mt19937_64 rng(41);
    Hin toy_hin = toy();
    std::vector<Hin> hins;
    hins.push_back(toy_hin);
    for (int i = 0; i < 12; ++i) hins.push_back(random_hin(rng, 4, 20, 0.4));
    int checked = 0;
    for (const Hin& hin : hins) {
        NetworkSchema schema = extract_schema(hin);
        for (TypeId src = 0; src < schema.type_count(); ++src) {
            Sms sms;
            try {
                sms = build_sms(schema, src);
            } catch (const std::invalid_argument&) {
                continue;
            }
            const int h0 = sms.h0;
            MetaStructure top = meta_structure_at(sms, 2 * h0);
            std::vector<TypeSet> half(top.layers.begin(), top.layers.begin() + h0 + 1);
            Dense abar = normalized_chain(hin, schema, half);
            LayerProduct mid = layer_product(hin, sms.recurrent_first);
            LayerProduct second = layer_product(hin, sms.recurrent_second);
            for (double lambda : {0.2, 0.8}) {
                auto terms = sms_term_matrices(hin, sms, lambda, Locality::local, 1);
                for (ObjectId s : hin.objects_of(src)) {
                    auto loc = reachable(hin, schema, half, s);
                    if (loc.empty()) continue;
                    // R over the reachable middle tuples and their neighbours.
                    std::vector<int> next;
                    for (int c = 0; c < second.size(); ++c)
                        for (int r : loc)
                            if (tuple_adjacent(hin, schema, mid.types, mid.tuples[r], second.types, second.tuples[c])) {
                                next.push_back(c);
                                break;
                            }
                    Dense w = Dense::Zero(static_cast<Eigen::Index>(loc.size()), static_cast<Eigen::Index>(next.size()));
                    for (std::size_t i = 0; i < loc.size(); ++i)
                        for (std::size_t j = 0; j < next.size(); ++j)
                            w(i, j) = tuple_adjacent(hin, schema, mid.types, mid.tuples[loc[i]], second.types,
                                                     second.tuples[next[j]]);
                    Dense rbar = row_normalize(Dense(w * w.transpose()));
                    Dense left(1, static_cast<Eigen::Index>(loc.size()));
                    Dense right(static_cast<Eigen::Index>(loc.size()), abar.rows());
                    for (std::size_t i = 0; i < loc.size(); ++i) {
                        left(0, i) = abar(hin.ordinal(s), loc[i]);
                        right.row(i) = abar.col(loc[i]).transpose();
                    }
                    Dense want = truncated_series(left, rbar, right, lambda, 2000);
                    Dense got = terms.back().row(hin.ordinal(s));
                    CHECK((want - got).cwiseAbs().maxCoeff() < 1e-9);
                    ++checked;
                }
            }
        }
    }
    CHECK(checked > 30);
}

TEST_CASE("non-recurrent terms equal normalized commuting products") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    Sms sms = build_sms(schema, typ(hin, "A"));
    auto terms = sms_term_matrices(hin, sms, 0.5, Locality::local, 2);
    Dense ap(commuting_matrix(hin, schema, parse_structure("A,P", schema), true));
    CHECK((terms[0] - ap * ap.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    auto global = sms_term_matrices_global(hin, sms, 0.5);
    CHECK((terms[0] - global[0]).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("toy M-bar under the worked-example parameters") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    Sms sms = build_sms(schema, typ(hin, "A"));
    SmssEngine engine(hin, sms, {0.999, {0.3, 0.7}});
    Dense m = engine.commuting_matrix();
    // Chuan Shi reaches only HeteSim and HeProjI, whose venues and terms
    // lead back to the same two papers.
    CHECK(m(0, 0) == doctest::Approx(0.28125).epsilon(1e-12));
    CHECK(m(0, 1) == doctest::Approx(0.140625).epsilon(1e-12));
    CHECK(m(0, 2) == 0.0);
    CHECK(m(2, 2) == doctest::Approx(m(3, 3)).epsilon(1e-12));
    SmssEngine global(hin, sms, {0.999, {0.3, 0.7}}, Locality::global);
    Dense g = global.commuting_matrix();
    CHECK((m.row(0) - g.row(0)).cwiseAbs().maxCoeff() < 1e-12);
    Dense s = smss_from_commuting(m);
    for (int i = 0; i < 5; ++i) CHECK(s(i, i) == doctest::Approx(1.0));
    CHECK(s(2, 3) == doctest::Approx(1.0));
}

TEST_CASE("threaded and serial term matrices agree") {
    Hin hin = toy();
    NetworkSchema schema = extract_schema(hin);
    Sms sms = build_sms(schema, typ(hin, "P"));
    auto a = sms_term_matrices(hin, sms, 0.7, Locality::local, 1);
    auto b = sms_term_matrices(hin, sms, 0.7, Locality::local, 4);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k] == b[k]);
}
