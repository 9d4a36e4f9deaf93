#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <vector>

#include "pvoice/similarity.hpp"
#include "pvoice/textprep.hpp"
#include "pvoice/util.hpp"

using namespace pvoice;
using namespace pvoice::similarity;
using pvoice::textprep::TermCounts;

namespace {

TermCounts counts_of(std::initializer_list<std::pair<const char*, std::int64_t>> items) {
    TermCounts tc;
    for (const auto& [term, count] : items) {
        tc.counts[term] = count;
        tc.total += count;
    }
    return tc;
}

// The spec's running example: d1 = "heart heart attack", d2 = "heart rate",
// d3 = "skin".
TfidfModel toy_model() {
    return TfidfModel::build({{"d1", counts_of({{"heart", 2}, {"attack", 1}})},
                              {"d2", counts_of({{"heart", 1}, {"rate", 1}})},
                              {"d3", counts_of({{"skin", 1}})}});
}

// Independent brute-force oracle: direct formula over raw count maps.
using RawDataset = std::map<std::string, std::int64_t>;

double oracle_tfidf(const std::vector<std::pair<std::string, RawDataset>>& corpus,
                    const std::string& term, const std::string& id) {
    const RawDataset* target = nullptr;
    std::size_t df = 0;
    for (const auto& [did, counts] : corpus) {
        if (did == id) target = &counts;
        if (counts.count(term)) ++df;
    }
    REQUIRE(target != nullptr);
    std::int64_t total = 0;
    for (const auto& [t, c] : *target) total += c;
    const auto it = target->find(term);
    if (it == target->end() || total == 0) return 0.0;
    return (static_cast<double>(it->second) / static_cast<double>(total)) *
           std::log(static_cast<double>(corpus.size()) / static_cast<double>(df));
}

double oracle_cosine(const std::map<std::string, double>& a,
                     const std::map<std::string, double>& b) {
    std::set<std::string> terms;
    for (const auto& [t, w] : a) terms.insert(t);
    for (const auto& [t, w] : b) terms.insert(t);
    double dot = 0, na = 0, nb = 0;
    for (const std::string& t : terms) {
        const double wa = a.count(t) ? a.at(t) : 0.0;
        const double wb = b.count(t) ? b.at(t) : 0.0;
        dot += wa * wb;
        na += wa * wa;
        nb += wb * wb;
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace

TEST_CASE("tfidf matches the hand-worked example") {
    const auto m = toy_model();
    CHECK(m.tfidf("heart", "d1") == doctest::Approx((2.0 / 3.0) * std::log(1.5)).epsilon(1e-12));
    CHECK(m.tfidf("heart", "d1") == doctest::Approx(0.27031).epsilon(1e-4));
}

TEST_CASE("tfidf is zero for ubiquitous and absent terms") {
    const auto m = TfidfModel::build({{"a", counts_of({{"x", 3}, {"y", 1}})},
                                      {"b", counts_of({{"x", 1}})}});
    CHECK(m.tfidf("x", "a") == 0.0);  // in every dataset: idf = ln(1) = 0
    CHECK(m.tfidf("y", "b") == 0.0);  // absent
    CHECK(m.tfidf("never-seen", "a") == 0.0);
}

TEST_CASE("tfidf rejects unknown dataset ids") {
    const auto m = toy_model();
    CHECK_THROWS_AS(m.tfidf("heart", "nope"), DataError);
    CHECK_THROWS_AS(dataset_vector(m, "nope"), DataError);
}

TEST_CASE("dataset_vector applies the formula and omits zero weights") {
    const auto m = toy_model();
    const auto v3 = dataset_vector(m, "d3");
    REQUIRE(v3.weights.size() == 1);
    CHECK(v3.weights.at("skin") == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    // d1's "heart" appears in two datasets, "attack" in one.
    const auto v1 = dataset_vector(m, "d1");
    CHECK(v1.weights.at("heart") == doctest::Approx((2.0 / 3.0) * std::log(1.5)));
    CHECK(v1.weights.at("attack") == doctest::Approx((1.0 / 3.0) * std::log(3.0)));
}

TEST_CASE("dataset_vector degenerates to empty for shared-everything corpora") {
    const auto m = TfidfModel::build({{"a", counts_of({{"x", 1}})},
                                      {"b", counts_of({{"x", 2}})}});
    CHECK(dataset_vector(m, "a").weights.empty());

    const auto single = TfidfModel::build({{"only", counts_of({{"x", 1}, {"y", 2}})}});
    CHECK(dataset_vector(single, "only").weights.empty());  // ln(1/1) = 0
}

TEST_CASE("cosine basics") {
    DatasetVector v;
    v.weights = {{"x", 1.0}, {"y", 2.0}};
    CHECK(cosine(v, v) == doctest::Approx(1.0).epsilon(1e-9));

    DatasetVector a, b;
    a.weights = {{"x", 1.0}};
    b.weights = {{"z", 5.0}};
    CHECK(cosine(a, b) == 0.0);

    DatasetVector c, d;
    c.weights = {{"x", 1.0}, {"y", 1.0}};
    d.weights = {{"x", 1.0}, {"z", 1.0}};
    CHECK(cosine(c, d) == doctest::Approx(0.5).epsilon(1e-12));

    DatasetVector zero;
    CHECK(cosine(zero, v) == 0.0);  // zero-norm convention
}

TEST_CASE("cosine properties over random nonnegative vectors") {
    util::Rng rng(31337);
    for (int trial = 0; trial < 300; ++trial) {
        DatasetVector a, b;
        const std::size_t terms = 1 + rng.below(12);
        for (std::size_t t = 0; t < terms; ++t) {
            const std::string term = "t" + std::to_string(rng.below(16));
            if (rng.uniform() < 0.7) a.weights[term] = rng.uniform(0.01, 5.0);
            if (rng.uniform() < 0.7) b.weights[term] = rng.uniform(0.01, 5.0);
        }
        const double ab = cosine(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0 + 1e-12);
        CHECK(std::abs(ab - cosine(b, a)) <= 1e-12);

        const double alpha = rng.uniform(0.1, 10.0);
        DatasetVector scaled = a;
        for (auto& [term, w] : scaled.weights) w *= alpha;
        CHECK(std::abs(cosine(scaled, b) - ab) <= 1e-12);
    }
}

TEST_CASE("tfidf equals the brute-force oracle on random corpora") {
    util::Rng rng(4242);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n_datasets = 2 + rng.below(4);  // <= 5
        std::vector<std::pair<std::string, RawDataset>> corpus;
        std::vector<std::pair<std::string, TermCounts>> datasets;
        for (std::size_t d = 0; d < n_datasets; ++d) {
            RawDataset raw;
            const std::size_t n_terms = 1 + rng.below(20);
            for (std::size_t t = 0; t < n_terms; ++t)
                raw["w" + std::to_string(rng.below(20))] = 1 + static_cast<std::int64_t>(rng.below(9));
            TermCounts tc;
            for (const auto& [term, count] : raw) {
                tc.counts[term] = count;
                tc.total += count;
            }
            corpus.emplace_back("d" + std::to_string(d), raw);
            datasets.emplace_back("d" + std::to_string(d), tc);
        }
        const auto model = TfidfModel::build(datasets);
        for (const auto& [id, raw] : corpus)
            for (const auto& [term, count] : raw)
                CHECK(std::abs(model.tfidf(term, id) - oracle_tfidf(corpus, term, id)) <= 1e-12);
    }
}

TEST_CASE("similarity matrix is symmetric with unit diagonal") {
    const auto m = toy_model();
    const auto sm = similarity_matrix(m);
    REQUIRE(sm.ids.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(sm.values[i][i] == doctest::Approx(1.0).epsilon(1e-9));
        for (std::size_t j = 0; j < 3; ++j) CHECK(sm.values[i][j] == sm.values[j][i]);
    }
    // d3 shares no discriminative vocabulary with d1/d2.
    CHECK(sm.values[0][2] == 0.0);
}

TEST_CASE("similarity matrix of identical datasets is all ones") {
    const auto m = TfidfModel::build({{"a", counts_of({{"x", 2}, {"y", 1}, {"q", 1}})},
                                      {"b", counts_of({{"x", 2}, {"y", 1}, {"q", 1}})},
                                      {"c", counts_of({{"z", 3}})}});
    const auto sm = similarity_matrix(m);
    CHECK(sm.values[0][1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("similarity matrix rejects fewer than two datasets") {
    CHECK_THROWS_AS(similarity_matrix(TfidfModel::build({{"only", counts_of({{"x", 1}})}})),
                    DataError);
}

TEST_CASE("similarity matrix cross-checks against per-pair oracle on a synthetic corpus") {
    util::Rng rng(808);
    std::vector<std::pair<std::string, RawDataset>> corpus;
    std::vector<std::pair<std::string, TermCounts>> datasets;
    for (std::size_t d = 0; d < 8; ++d) {
        RawDataset raw;
        for (std::size_t t = 0; t < 30; ++t)
            raw["w" + std::to_string(rng.below(60))] = 1 + static_cast<std::int64_t>(rng.below(5));
        TermCounts tc;
        for (const auto& [term, count] : raw) {
            tc.counts[term] = count;
            tc.total += count;
        }
        corpus.emplace_back("d" + std::to_string(d), raw);
        datasets.emplace_back("d" + std::to_string(d), tc);
    }
    const auto model = TfidfModel::build(datasets);
    const auto sm = similarity_matrix(model);

    for (std::size_t i = 0; i < 8; ++i) {
        std::map<std::string, double> vi;
        for (const auto& [term, c] : corpus[i].second)
            vi[term] = oracle_tfidf(corpus, term, corpus[i].first);
        for (std::size_t j = i + 1; j < 8; ++j) {
            std::map<std::string, double> vj;
            for (const auto& [term, c] : corpus[j].second)
                vj[term] = oracle_tfidf(corpus, term, corpus[j].first);
            CHECK(sm.values[i][j] == doctest::Approx(oracle_cosine(vi, vj)).epsilon(1e-10));
        }
    }
}

TEST_CASE("band boundaries follow the half-open convention") {
    CHECK(band(0.30) == SimilarityBand::below_range);
    CHECK(band(0.4499) == SimilarityBand::below_range);
    CHECK(band(0.45) == SimilarityBand::low);
    CHECK(band(0.50) == SimilarityBand::low);
    CHECK(band(0.60) == SimilarityBand::medium);
    CHECK(band(0.70) == SimilarityBand::medium);
    CHECK(band(0.75) == SimilarityBand::high);
    CHECK(band(0.80) == SimilarityBand::high);
    CHECK(band(1.0) == SimilarityBand::high);
    CHECK(band(0.0) == SimilarityBand::below_range);
    CHECK_THROWS_AS(band(-0.01), DataError);
    CHECK_THROWS_AS(band(1.01), DataError);
}

TEST_CASE("top_terms ranks by score with lexicographic ties and shared flags") {
    const auto m = toy_model();
    const auto t3 = top_terms(m, "d3", 1);
    REQUIRE(t3.terms.size() == 1);
    CHECK(t3.terms[0].term == "skin");
    CHECK(t3.terms[0].score == doctest::Approx(std::log(3.0)).epsilon(1e-4));
    CHECK_FALSE(t3.terms[0].shared);
    CHECK_FALSE(t3.truncated);

    // k larger than the nonzero vocabulary: full list, truncation flagged.
    const auto big = top_terms(m, "d1", 10);
    CHECK(big.truncated);
    CHECK(big.terms.size() == 2);
    CHECK(big.terms[0].score >= big.terms[1].score);

    CHECK_THROWS_AS(top_terms(m, "d1", 0), DataError);
}

TEST_CASE("top_terms marks terms shared between datasets' lists") {
    // "shared" dominates both a and b; it sits in exactly two of the three
    // datasets so its idf stays positive.
    const auto m = TfidfModel::build({{"a", counts_of({{"shared", 3}, {"x", 1}})},
                                      {"b", counts_of({{"shared", 9}, {"y", 1}})},
                                      {"c", counts_of({{"z", 1}})}});
    const auto ta = top_terms(m, "a", 1);
    const auto tb = top_terms(m, "b", 1);
    REQUIRE(ta.terms.size() == 1);
    CHECK(ta.terms[0].term == "shared");
    CHECK(ta.terms[0].shared);
    CHECK(tb.terms[0].term == "shared");
    CHECK(tb.terms[0].shared);
}

TEST_CASE("top_terms is deterministic and ties break lexicographically") {
    const auto m = TfidfModel::build({{"a", counts_of({{"beta", 1}, {"alpha", 1}, {"gamma", 2}})},
                                      {"b", counts_of({{"other", 1}})}});
    const auto t = top_terms(m, "a", 3);
    REQUIRE(t.terms.size() == 3);
    CHECK(t.terms[0].term == "gamma");
    CHECK(t.terms[1].term == "alpha");  // alpha before beta on equal scores
    CHECK(t.terms[2].term == "beta");
    const auto again = top_terms(m, "a", 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(t.terms[i].term == again.terms[i].term);
}

TEST_CASE("zero-norm datasets are flagged and default to similarity 0") {
    // Every term of "empty_vec" appears in all datasets, so its tf-idf vector
    // zeroes out entirely.
    const auto m = TfidfModel::build({{"empty_vec", counts_of({{"x", 2}})},
                                      {"b", counts_of({{"x", 1}, {"y", 1}})},
                                      {"c", counts_of({{"x", 3}, {"z", 1}})}});
    const auto sm = similarity_matrix(m);
    REQUIRE(sm.zero_norm_datasets.size() == 1);
    CHECK(sm.zero_norm_datasets[0] == "empty_vec");
    CHECK(sm.values[0][1] == 0.0);
    CHECK(sm.values[0][2] == 0.0);
}

TEST_CASE("matrix csv has ids and 6-decimal cells") {
    const auto sm = similarity_matrix(toy_model());
    const std::string csv = matrix_csv(sm);
    CHECK(csv.find("dataset,d1,d2,d3") == 0);
    CHECK(csv.find("1.000000") != std::string::npos);
}

TEST_CASE("per-post similarity mode produces a valid matrix") {
    std::vector<std::pair<std::string, std::vector<TermCounts>>> sets;
    sets.emplace_back("a", std::vector<TermCounts>{counts_of({{"x", 2}, {"y", 1}}),
                                                   counts_of({{"x", 1}})});
    sets.emplace_back("b", std::vector<TermCounts>{counts_of({{"x", 1}, {"z", 2}})});
    const auto m = per_post_similarity_matrix(sets);
    CHECK(m.values[0][0] == doctest::Approx(1.0));
    CHECK(m.values[0][1] == m.values[1][0]);
    CHECK(m.values[0][1] >= 0.0);
    CHECK(m.values[0][1] <= 1.0);
}
