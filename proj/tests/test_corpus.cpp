#include <doctest.h>

#include <set>
#include <sstream>

#include "pvoice/corpus.hpp"
#include "pvoice/synth.hpp"

using namespace pvoice;
using namespace pvoice::corpus;

namespace {

Post make_post(std::string id, std::string text,
               std::optional<Label> label = Label::patient_voice) {
    Post p;
    p.id = std::move(id);
    p.source = Source::reddit();
    p.domain = Domain::cardiovascular();
    p.text = std::move(text);
    p.label = label;
    return p;
}

std::vector<Post> labeled_posts(std::size_t n_pv, std::size_t n_nr) {
    std::vector<Post> posts;
    for (std::size_t i = 0; i < n_pv + n_nr; ++i)
        posts.push_back(make_post("p" + std::to_string(i), "text body " + std::to_string(i),
                                  i < n_pv ? Label::patient_voice : Label::not_relevant));
    return posts;
}

}  // namespace

TEST_CASE("dedup keeps first occurrence on id collision") {
    auto r = dedup({make_post("a", "first"), make_post("a", "second")});
    CHECK(r.slice.size() == 1);
    CHECK(r.slice.posts[0].text == "first");
    CHECK(r.removed == 1);
}

TEST_CASE("dedup keeps first occurrence on exact text collision") {
    auto r = dedup({make_post("a", "same body"), make_post("b", "same body")});
    CHECK(r.slice.size() == 1);
    CHECK(r.slice.posts[0].id == "a");
    CHECK(r.removed == 1);
}

TEST_CASE("dedup text comparison trims whitespace and composes accents") {
    // "café" precomposed vs decomposed (e + U+0301), plus NBSP padding.
    const std::string composed = "caf\xc3\xa9";
    const std::string decomposed = "cafe\xcc\x81";
    auto r = dedup({make_post("a", "  " + composed + " "),
                    make_post("b", decomposed + "\xc2\xa0")});
    CHECK(r.slice.size() == 1);
    CHECK(r.removed == 1);
}

TEST_CASE("dedup of unique posts removes nothing and is idempotent") {
    auto posts = labeled_posts(40, 20);
    auto once = dedup(posts);
    CHECK(once.removed == 0);
    CHECK(once.slice.size() == 60);
    auto twice = dedup(once.slice.posts, once.slice.key);
    CHECK(twice.removed == 0);
    CHECK(twice.slice.fingerprint() == once.slice.fingerprint());
}

TEST_CASE("dedup on empty input yields empty slice") {
    auto r = dedup({});
    CHECK(r.slice.empty());
    CHECK(r.removed == 0);
}

TEST_CASE("stratified split matches the ratio arithmetic") {
    // 1000 posts, 600 PV / 400 NR at 0.66/0.17/0.17 -> 660/170/170,
    // PV fraction 0.60 in each split.
    auto slice = dedup(labeled_posts(600, 400)).slice;
    SplitSpec spec;
    spec.seed = 3;
    auto r = stratified_split(slice, spec);
    CHECK(r.train.size() == 660);
    CHECK(r.validation.size() == 170);
    CHECK(r.test.size() == 170);
    for (const CorpusSlice* s : {&r.train, &r.validation, &r.test}) {
        const auto counts = label_counts(*s);
        const double pv_fraction = static_cast<double>(counts.at("patient_voice")) /
                                   static_cast<double>(s->size());
        CHECK(pv_fraction == doctest::Approx(0.60).epsilon(0.002));
    }
}

TEST_CASE("stratified split is deterministic per seed and differs across seeds") {
    auto slice = dedup(labeled_posts(150, 100)).slice;
    SplitSpec spec;
    spec.seed = 7;
    auto a = stratified_split(slice, spec);
    auto b = stratified_split(slice, spec);
    CHECK(a.train.fingerprint() == b.train.fingerprint());
    CHECK(a.validation.fingerprint() == b.validation.fingerprint());
    CHECK(a.test.fingerprint() == b.test.fingerprint());

    bool any_differs = false;
    for (const std::uint64_t other : {1ULL, 2ULL, 3ULL, 4ULL, 5ULL}) {
        SplitSpec spec2;
        spec2.seed = other;
        if (stratified_split(slice, spec2).train.fingerprint() != a.train.fingerprint())
            any_differs = true;
    }
    CHECK(any_differs);
}

TEST_CASE("stratified split partitions the input") {
    auto slice = dedup(labeled_posts(300, 200)).slice;
    SplitSpec spec;
    spec.seed = 11;
    auto r = stratified_split(slice, spec);

    std::set<std::string> all_ids;
    for (const Post& p : slice.posts) all_ids.insert(p.id);
    std::set<std::string> out_ids;
    std::size_t total = 0;
    for (const CorpusSlice* s : {&r.train, &r.validation, &r.test}) {
        for (const Post& p : s->posts) out_ids.insert(p.id);
        total += s->size();
    }
    CHECK(total == slice.size());    // disjoint (no double counting)
    CHECK(out_ids == all_ids);       // union equals input
    CHECK_NOTHROW(assert_no_leakage(r.train, r.validation, r.test));
}

TEST_CASE("stratified split rejects unlabeled posts naming the id") {
    auto posts = labeled_posts(10, 10);
    posts.push_back(make_post("naughty", "no label here", std::nullopt));
    auto slice = dedup(posts).slice;
    SplitSpec spec;
    CHECK_THROWS_WITH_AS(stratified_split(slice, spec),
                         doctest::Contains("naughty"), DataError);
}

TEST_CASE("stratified split rejects ratios that empty a split") {
    auto slice = dedup(labeled_posts(2, 1)).slice;
    SplitSpec spec;  // 3 posts at 0.17 -> floor 0 validation
    CHECK_THROWS_AS(stratified_split(slice, spec), DataError);
}

TEST_CASE("split spec validation") {
    SplitSpec bad;
    bad.train_ratio = 0.5;
    bad.validation_ratio = 0.2;
    bad.test_ratio = 0.2;
    CHECK_THROWS_AS(bad.validate(), DataError);
    SplitSpec zero;
    zero.train_ratio = 1.0;
    zero.validation_ratio = 0.0;
    zero.test_ratio = 0.0;
    CHECK_THROWS_AS(zero.validate(), DataError);
}

TEST_CASE("merge conserves counts on disjoint inputs") {
    auto a = dedup(labeled_posts(30, 10)).slice;
    std::vector<Post> other;
    for (std::size_t i = 0; i < 25; ++i)
        other.push_back(make_post("q" + std::to_string(i), "other text " + std::to_string(i),
                                  i < 20 ? Label::patient_voice : Label::not_relevant));
    auto b = dedup(other).slice;

    auto merged = merge({a, b}, SliceKey{std::nullopt, std::nullopt, Split::unsplit});
    const auto counts = label_counts(merged);
    CHECK(merged.size() == a.size() + b.size());
    CHECK(counts.at("patient_voice") == 50);
    CHECK(counts.at("not_relevant") == 15);
}

TEST_CASE("merge rejects mixed split values") {
    auto a = dedup(labeled_posts(4, 4)).slice;
    auto b = a;
    a.key.split = Split::train;
    b.key.split = Split::test;
    CHECK_THROWS_AS(merge({a, b}, SliceKey{}), DataError);
}

TEST_CASE("merge of empty list yields empty slice with the new key") {
    const SliceKey key{Source::reddit(), std::nullopt, Split::train};
    auto m = merge({}, key);
    CHECK(m.empty());
    CHECK(m.key == key);
}

TEST_CASE("merge applies dedup across inputs") {
    auto a = dedup({make_post("x", "one"), make_post("y", "two")}).slice;
    auto b = dedup({make_post("x", "elsewhere"), make_post("z", "two")}).slice;
    auto merged = merge({a, b}, SliceKey{});
    CHECK(merged.size() == 2);  // "x" id collision and "two" text collision removed
}

TEST_CASE("label_counts covers unlabeled and empty") {
    CHECK(label_counts(CorpusSlice{}).empty());
    auto slice = dedup({make_post("a", "t1", Label::patient_voice),
                        make_post("b", "t2", Label::not_relevant),
                        make_post("c", "t3", std::nullopt)})
                     .slice;
    const auto counts = label_counts(slice);
    CHECK(counts.at("patient_voice") == 1);
    CHECK(counts.at("not_relevant") == 1);
    CHECK(counts.at("unlabeled") == 1);
}

TEST_CASE("leakage assertion catches shared ids and shared texts") {
    auto train = dedup({make_post("a", "alpha"), make_post("b", "beta")}).slice;
    auto val = dedup({make_post("c", "gamma")}).slice;
    auto test_ok = dedup({make_post("d", "delta")}).slice;
    CHECK_NOTHROW(assert_no_leakage(train, val, test_ok));

    auto test_id = dedup({make_post("a", "unrelated")}).slice;
    CHECK_THROWS_AS(assert_no_leakage(train, val, test_id), DataError);
    auto test_text = dedup({make_post("e", " beta ")}).slice;
    CHECK_THROWS_AS(assert_no_leakage(train, val, test_text), DataError);
}

TEST_CASE("record serialization round-trips through parse") {
    std::vector<Post> posts;
    Post p = make_post("id-1", "Heart attack at 40, now on 10mg eliquis \xc3\xa9t\xc3\xa9");
    p.annotator = "ann7";
    p.created_utc = 1612345678;
    posts.push_back(p);
    Post q = make_post("id-2", "plain, no optionals", std::nullopt);
    q.source = Source::other("forumx");
    q.domain = Domain::other("dermatology");
    posts.push_back(q);

    std::string file;
    for (const Post& post : posts) file += serialize_post(post) + "\n";
    auto parsed = parse_records(file);
    REQUIRE(parsed.errors.empty());
    REQUIRE(parsed.posts.size() == 2);
    CHECK(parsed.posts[0] == posts[0]);
    CHECK(parsed.posts[1] == posts[1]);

    // Canonical form re-serializes to identical bytes.
    std::string again;
    for (const Post& post : parsed.posts) again += serialize_post(post) + "\n";
    CHECK(again == file);
}

TEST_CASE("record serialization round-trip holds for generated posts") {
    util::Rng rng(99);
    auto vocab = synth::sample_vocabulary(50, rng);
    for (int i = 0; i < 200; ++i) {
        Post p;
        p.id = "gen" + std::to_string(i);
        p.source = i % 3 == 0 ? Source::socialgist() : Source::other("s" + std::to_string(i % 5));
        p.domain = i % 2 == 0 ? Domain::neurology() : Domain::other("d" + std::to_string(i % 4));
        p.text = vocab[rng.below(vocab.size())] + " \"quoted\", and\tmore " +
                 vocab[rng.below(vocab.size())];
        if (i % 4 != 0) p.label = i % 2 ? Label::patient_voice : Label::not_relevant;
        if (i % 5 == 0) p.annotator = "a" + std::to_string(i % 7);
        if (i % 6 == 0) p.created_utc = 1600000000 + i;
        auto parsed = parse_records(serialize_post(p));
        REQUIRE(parsed.errors.empty());
        REQUIRE(parsed.posts.size() == 1);
        CHECK(parsed.posts[0] == p);
    }
}

TEST_CASE("parse_records reports malformed lines with line numbers") {
    const std::string file =
        R"({"id":"a","source":"reddit","domain":"oncology","text":"fine"})"
        "\n"
        R"({"source":"reddit","domain":"oncology","text":"no id"})"
        "\n"
        "not json at all\n"
        R"({"id":"b","source":"reddit","domain":"oncology","text":"   "})"
        "\n"
        R"({"id":"c","source":"reddit","domain":"oncology","text":"ok","label":"PatientVoice"})"
        "\n"
        R"({"id":"d","source":"reddit","domain":"oncology","text":"ok2","label":"patient_voice"})"
        "\n";
    auto r = parse_records(file);
    CHECK(r.posts.size() == 2);
    REQUIRE(r.errors.size() == 4);
    CHECK(r.errors[0].line_no == 2);
    CHECK(r.errors[0].message == "missing id");
    CHECK(r.errors[1].line_no == 3);
    CHECK(r.errors[2].line_no == 4);
    CHECK(r.errors[2].message == "empty text");
    CHECK(r.errors[3].line_no == 5);
    CHECK(r.errors[3].message.find("unknown label") == 0);
}

TEST_CASE("parse_records ignores unknown fields and blank lines") {
    const std::string file =
        "\n"
        R"({"id":"a","source":"x","domain":"y","text":"t","score":42,"extra":{"k":1}})"
        "\n\n";
    auto r = parse_records(file);
    CHECK(r.errors.empty());
    REQUIRE(r.posts.size() == 1);
    CHECK(r.posts[0].source == Source::other("x"));
    CHECK(r.posts[0].domain == Domain::other("y"));
}

TEST_CASE("trim_unicode_ws handles multi-byte whitespace") {
    CHECK(trim_unicode_ws("  hi  ") == "hi");
    CHECK(trim_unicode_ws("\xc2\xa0\xe2\x80\x83hi\xe3\x80\x80") == "hi");  // NBSP, em space, ideographic
    CHECK(trim_unicode_ws("\t\r\n ") == "");
    CHECK(trim_unicode_ws("a b") == "a b");
}

TEST_CASE("slice keys format as source_domain_split") {
    CHECK(SliceKey{Source::reddit(), Domain::immunology(), Split::train}.str() ==
          "reddit_immunology_train");
    CHECK(SliceKey{std::nullopt, std::nullopt, Split::test}.str() == "all_all_test");
}

TEST_CASE("table-shaped synthetic corpus reproduces the combined volumes") {
    const synth::GridCorpus g = synth::table_grid_corpus(42);

    // Merged cardiovascular train slice: 1760 PV / 724 NR.
    auto cardio_train = merge({g.slice(Source::reddit(), Domain::cardiovascular(), Split::train),
                               g.slice(Source::socialgist(), Domain::cardiovascular(), Split::train)},
                              SliceKey{std::nullopt, Domain::cardiovascular(), Split::train});
    auto counts = label_counts(cardio_train);
    CHECK(counts.at("patient_voice") == 1760);
    CHECK(counts.at("not_relevant") == 724);

    // Merge of the four domain train slices: 7029 PV / 2916 NR.
    std::vector<CorpusSlice> domain_trains;
    for (const Domain& d : g.domains) {
        domain_trains.push_back(merge({g.slice(Source::reddit(), d, Split::train),
                                       g.slice(Source::socialgist(), d, Split::train)},
                                      SliceKey{std::nullopt, d, Split::train}));
    }
    auto all_train = merge(domain_trains, SliceKey{std::nullopt, std::nullopt, Split::train});
    counts = label_counts(all_train);
    CHECK(counts.at("patient_voice") == 7029);
    CHECK(counts.at("not_relevant") == 2916);

    // Whole corpus has the documented size and survives dedup untouched.
    std::vector<Post> everything;
    for (const auto& [name, slice] : g.slices)
        everything.insert(everything.end(), slice.posts.begin(), slice.posts.end());
    CHECK(everything.size() == 14693);
    auto dd = dedup(std::move(everything));
    CHECK(dd.removed == 0);
    CHECK(dd.slice.size() == 14693);
}

TEST_CASE("synthetic corpus generation is byte-identical per seed") {
    const synth::GridCorpus a = synth::table_grid_corpus(7);
    const synth::GridCorpus b = synth::table_grid_corpus(7);
    REQUIRE(a.slices.size() == b.slices.size());
    for (const auto& [name, slice] : a.slices) {
        std::string bytes_a, bytes_b;
        for (const Post& p : slice.posts) bytes_a += serialize_post(p) + "\n";
        for (const Post& p : b.slices.at(name).posts) bytes_b += serialize_post(p) + "\n";
        CHECK(bytes_a == bytes_b);
    }

    // Per-slice splits never leak across train/validation/test.
    for (const Source& s : a.sources) {
        for (const Domain& d : a.domains) {
            CHECK_NOTHROW(assert_no_leakage(a.slice(s, d, Split::train),
                                            a.slice(s, d, Split::validation),
                                            a.slice(s, d, Split::test)));
        }
    }
}
