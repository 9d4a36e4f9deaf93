#include "pvoice/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "pvoice/unicode.hpp"

namespace pvoice::corpus {

using nlohmann::json;

std::string Source::str() const {
    switch (kind) {
        case SourceKind::reddit: return "reddit";
        case SourceKind::socialgist: return "socialgist";
        case SourceKind::other: return name;
    }
    return name;
}

std::optional<Source> Source::parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "reddit") return reddit();
    if (s == "socialgist") return socialgist();
    return other(s);
}

std::string Domain::str() const {
    switch (kind) {
        case DomainKind::cardiovascular: return "cardiovascular";
        case DomainKind::oncology: return "oncology";
        case DomainKind::immunology: return "immunology";
        case DomainKind::neurology: return "neurology";
        case DomainKind::other: return name;
    }
    return name;
}

std::optional<Domain> Domain::parse(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "cardiovascular") return cardiovascular();
    if (s == "oncology") return oncology();
    if (s == "immunology") return immunology();
    if (s == "neurology") return neurology();
    return other(s);
}

std::string label_str(Label l) {
    return l == Label::patient_voice ? "patient_voice" : "not_relevant";
}

std::optional<Label> parse_label(const std::string& s) {
    if (s == "patient_voice") return Label::patient_voice;
    if (s == "not_relevant") return Label::not_relevant;
    return std::nullopt;
}

std::string split_str(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::validation: return "validation";
        case Split::test: return "test";
        case Split::unsplit: return "unsplit";
    }
    return "unsplit";
}

std::optional<Split> parse_split(const std::string& s) {
    if (s == "train") return Split::train;
    if (s == "validation") return Split::validation;
    if (s == "test") return Split::test;
    if (s == "unsplit") return Split::unsplit;
    return std::nullopt;
}

std::string SliceKey::str() const {
    std::string out = source ? source->str() : "all";
    out += '_';
    out += domain ? domain->str() : "all";
    out += '_';
    out += split_str(split);
    return out;
}

std::string CorpusSlice::fingerprint() const {
    util::Fingerprint fp;
    for (const Post& p : posts) fp.add(p.id);
    return fp.str();
}

DedupResult dedup(std::vector<Post> posts, SliceKey key) {
    DedupResult out;
    out.slice.key = key;
    out.slice.posts.reserve(posts.size());
    std::unordered_set<std::string> seen_ids;
    std::unordered_set<std::string> seen_texts;
    for (Post& p : posts) {
        if (!seen_ids.insert(p.id).second) {
            ++out.removed;
            continue;
        }
        if (!seen_texts.insert(canonical_text_key(p.text)).second) {
            ++out.removed;
            continue;
        }
        out.slice.posts.push_back(std::move(p));
    }
    return out;
}

void SplitSpec::validate() const {
    const double sum = train_ratio + validation_ratio + test_ratio;
    if (std::abs(sum - 1.0) > 1e-9)
        throw DataError("split ratios must sum to 1, got " + util::to_compact(sum));
    for (const double r : {train_ratio, validation_ratio, test_ratio})
        if (!(r > 0.0 && r < 1.0)) throw DataError("split ratios must lie in (0,1)");
}

SplitResult stratified_split(const CorpusSlice& slice, const SplitSpec& spec) {
    spec.validate();

    // Group post indices by label, keeping labels in a fixed order so the
    // shuffle stream is reproducible.
    std::vector<std::vector<std::size_t>> groups(2);
    for (std::size_t i = 0; i < slice.posts.size(); ++i) {
        const Post& p = slice.posts[i];
        if (!p.label) throw DataError("stratified_split: unlabeled post id=" + p.id);
        groups[p.label == Label::patient_voice ? 0 : 1].push_back(i);
    }

    SplitResult out;
    out.train.key = slice.key;
    out.train.key.split = Split::train;
    out.validation.key = slice.key;
    out.validation.key.split = Split::validation;
    out.test.key = slice.key;
    out.test.key.split = Split::test;

    util::Rng rng(spec.seed);
    for (auto& group : groups) {
        rng.shuffle(group);
        const std::size_t n = group.size();
        const auto n_val = static_cast<std::size_t>(std::floor(spec.validation_ratio * static_cast<double>(n)));
        const auto n_test = static_cast<std::size_t>(std::floor(spec.test_ratio * static_cast<double>(n)));
        const std::size_t n_train = n - n_val - n_test;  // remainder goes to train
        for (std::size_t k = 0; k < n; ++k) {
            const Post& p = slice.posts[group[k]];
            if (k < n_train)
                out.train.posts.push_back(p);
            else if (k < n_train + n_val)
                out.validation.posts.push_back(p);
            else
                out.test.posts.push_back(p);
        }
    }

    if (!slice.posts.empty() &&
        (out.train.empty() || out.validation.empty() || out.test.empty()))
        throw DataError("stratified_split: ratios produce an empty split for " +
                        std::to_string(slice.posts.size()) + " posts");
    return out;
}

CorpusSlice merge(const std::vector<CorpusSlice>& slices, SliceKey new_key) {
    std::optional<Split> common;
    for (const CorpusSlice& s : slices) {
        if (!common)
            common = s.key.split;
        else if (*common != s.key.split)
            throw DataError("merge: mixed split values (" + split_str(*common) + " vs " +
                            split_str(s.key.split) + ")");
    }
    std::vector<Post> all;
    for (const CorpusSlice& s : slices) all.insert(all.end(), s.posts.begin(), s.posts.end());
    return dedup(std::move(all), new_key).slice;
}

std::map<std::string, std::size_t> label_counts(const CorpusSlice& slice) {
    std::map<std::string, std::size_t> out;
    for (const Post& p : slice.posts) {
        if (p.label)
            ++out[label_str(*p.label)];
        else
            ++out["unlabeled"];
    }
    return out;
}

void assert_no_leakage(const CorpusSlice& train, const CorpusSlice& validation,
                       const CorpusSlice& test) {
    std::unordered_set<std::string> train_ids;
    std::unordered_set<std::string> train_texts;
    for (const Post& p : train.posts) {
        train_ids.insert(p.id);
        train_texts.insert(canonical_text_key(p.text));
    }
    const auto check = [&](const CorpusSlice& s, const char* which) {
        for (const Post& p : s.posts) {
            if (train_ids.count(p.id))
                throw DataError(std::string("leakage: ") + which + " post id " + p.id +
                                " appears in train");
            if (train_texts.count(canonical_text_key(p.text)))
                throw DataError(std::string("leakage: ") + which + " post id " + p.id +
                                " duplicates a train text body");
        }
    };
    check(validation, "validation");
    check(test, "test");
}

// ---- record file I/O ------------------------------------------------------

std::string serialize_post(const Post& p) {
    json j;
    j["id"] = p.id;
    j["source"] = p.source.str();
    j["domain"] = p.domain.str();
    j["text"] = p.text;
    if (p.label) j["label"] = label_str(*p.label);
    if (p.annotator) j["annotator"] = *p.annotator;
    if (p.created_utc) j["created_utc"] = *p.created_utc;
    return j.dump();
}

namespace {

// Shared by the line parser and ingest's raw-record path.
std::optional<std::string> post_from_json(const json& j, Post& out) {
    if (!j.is_object()) return "record is not an object";
    const auto str_field = [&](const char* name) -> std::optional<std::string> {
        const auto it = j.find(name);
        if (it == j.end() || !it->is_string()) return std::nullopt;
        return it->get<std::string>();
    };

    const auto id = str_field("id");
    if (!id || id->empty()) return "missing id";
    const auto source_s = str_field("source");
    if (!source_s || source_s->empty()) return "missing source";
    const auto domain_s = str_field("domain");
    if (!domain_s || domain_s->empty()) return "missing domain";
    const auto text = str_field("text");
    if (!text) return "missing text";
    if (trim_unicode_ws(*text).empty()) return "empty text";

    out.id = *id;
    out.source = *Source::parse(*source_s);
    out.domain = *Domain::parse(*domain_s);
    out.text = *text;

    if (const auto it = j.find("label"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) return "unknown label";
        const auto label = parse_label(it->get<std::string>());
        if (!label) return "unknown label: " + it->get<std::string>();
        out.label = *label;
    }
    if (const auto annotator = str_field("annotator"); annotator && !annotator->empty())
        out.annotator = *annotator;
    if (const auto it = j.find("created_utc"); it != j.end() && !it->is_null()) {
        if (!it->is_number_integer()) return "invalid created_utc";
        out.created_utc = it->get<std::int64_t>();
    }
    return std::nullopt;
}

}  // namespace

ParseResult parse_records(std::istream& in) {
    ParseResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim_unicode_ws(line).empty()) continue;
        const json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            out.errors.push_back({line_no, "invalid JSON"});
            continue;
        }
        Post p;
        if (auto err = post_from_json(j, p)) {
            out.errors.push_back({line_no, std::move(*err)});
            continue;
        }
        out.posts.push_back(std::move(p));
    }
    return out;
}

ParseResult parse_records(const std::string& content) {
    std::istringstream in(content);
    return parse_records(in);
}

ParseResult parse_records_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open record file: " + p.string());
    return parse_records(in);
}

void write_records_file(const std::filesystem::path& p, const std::vector<Post>& posts) {
    std::string out;
    for (const Post& post : posts) {
        out += serialize_post(post);
        out += '\n';
    }
    util::write_file(p, out);
}

std::vector<Post> load_records_strict(const std::filesystem::path& p) {
    ParseResult r = parse_records_file(p);
    if (!r.errors.empty()) {
        const ParseError& e = r.errors.front();
        throw DataError(p.string() + ":" + std::to_string(e.line_no) + ": " + e.message +
                        (r.errors.size() > 1
                             ? " (+" + std::to_string(r.errors.size() - 1) + " more)"
                             : ""));
    }
    return std::move(r.posts);
}

// ---- text canonicalization --------------------------------------------

std::string trim_unicode_ws(std::string_view utf8) {
    std::size_t begin = 0;
    while (begin < utf8.size()) {
        const auto d = unicode::decode(utf8, begin);
        if (!unicode::is_space(d.cp)) break;
        begin += static_cast<std::size_t>(d.len);
    }
    // Scan forward tracking the end of the last non-space run; UTF-8 cannot
    // be decoded backwards without care, and inputs are short.
    std::size_t end = begin;
    std::size_t i = begin;
    while (i < utf8.size()) {
        const auto d = unicode::decode(utf8, i);
        i += static_cast<std::size_t>(d.len);
        if (!unicode::is_space(d.cp)) end = i;
    }
    return std::string(utf8.substr(begin, end - begin));
}

namespace {

// Latin-1 precompositions for the common combining marks.
char32_t compose(char32_t base, char32_t mark) {
    struct Entry {
        char32_t mark;
        const char* bases;
        const char32_t* composed;
    };
    static const char32_t grave[] = {0xC0, 0xC8, 0xCC, 0xD2, 0xD9, 0xE0, 0xE8, 0xEC, 0xF2, 0xF9};
    static const char32_t acute[] = {0xC1, 0xC9, 0xCD, 0xD3, 0xDA, 0xDD, 0xE1,
                                     0xE9, 0xED, 0xF3, 0xFA, 0xFD};
    static const char32_t circ[] = {0xC2, 0xCA, 0xCE, 0xD4, 0xDB, 0xE2, 0xEA, 0xEE, 0xF4, 0xFB};
    static const char32_t tilde[] = {0xC3, 0xD1, 0xD5, 0xE3, 0xF1, 0xF5};
    static const char32_t diaer[] = {0xC4, 0xCB, 0xCF, 0xD6, 0xDC, 0x178,
                                     0xE4, 0xEB, 0xEF, 0xF6, 0xFC, 0xFF};
    static const char32_t ring[] = {0xC5, 0xE5};
    static const char32_t cedilla[] = {0xC7, 0xE7};
    static const Entry table[] = {
        {0x0300, "AEIOUaeiou", grave},   {0x0301, "AEIOUYaeiouy", acute},
        {0x0302, "AEIOUaeiou", circ},    {0x0303, "ANOano", tilde},
        {0x0308, "AEIOUYaeiouy", diaer}, {0x030A, "Aa", ring},
        {0x0327, "Cc", cedilla},
    };
    for (const Entry& e : table) {
        if (e.mark != mark) continue;
        for (const char* b = e.bases; *b; ++b)
            if (static_cast<char32_t>(*b) == base) return e.composed[b - e.bases];
    }
    return 0;
}

}  // namespace

std::string canonical_text_key(std::string_view utf8) {
    const std::string trimmed = trim_unicode_ws(utf8);
    std::string out;
    out.reserve(trimmed.size());
    char32_t pending = 0;
    bool has_pending = false;
    std::size_t i = 0;
    while (i < trimmed.size()) {
        const auto d = unicode::decode(trimmed, i);
        i += static_cast<std::size_t>(d.len);
        if (has_pending) {
            if (const char32_t composed = compose(pending, d.cp)) {
                pending = composed;
                continue;
            }
            unicode::encode(pending, out);
        }
        pending = d.cp;
        has_pending = true;
    }
    if (has_pending) unicode::encode(pending, out);
    return out;
}

}  // namespace pvoice::corpus
