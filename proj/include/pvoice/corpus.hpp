#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvoice/util.hpp"

namespace pvoice::corpus {

enum class SourceKind { reddit, socialgist, other };

// Data source of a post. `name` is only meaningful for SourceKind::other.
struct Source {
    SourceKind kind = SourceKind::other;
    std::string name;

    static Source reddit() { return {SourceKind::reddit, {}}; }
    static Source socialgist() { return {SourceKind::socialgist, {}}; }
    static Source other(std::string n) { return {SourceKind::other, std::move(n)}; }

    std::string str() const;
    // Any nonempty string parses: "reddit"/"socialgist" map to their kinds,
    // everything else becomes other(name).
    static std::optional<Source> parse(const std::string& s);

    auto operator<=>(const Source&) const = default;
};

enum class DomainKind { cardiovascular, oncology, immunology, neurology, other };

struct Domain {
    DomainKind kind = DomainKind::other;
    std::string name;

    static Domain cardiovascular() { return {DomainKind::cardiovascular, {}}; }
    static Domain oncology() { return {DomainKind::oncology, {}}; }
    static Domain immunology() { return {DomainKind::immunology, {}}; }
    static Domain neurology() { return {DomainKind::neurology, {}}; }
    static Domain other(std::string n) { return {DomainKind::other, std::move(n)}; }

    std::string str() const;
    static std::optional<Domain> parse(const std::string& s);

    auto operator<=>(const Domain&) const = default;
};

enum class Label { patient_voice, not_relevant };

// Label strings are case-sensitive snake_case; anything else is rejected.
std::string label_str(Label l);
std::optional<Label> parse_label(const std::string& s);

enum class Split { train, validation, test, unsplit };

std::string split_str(Split s);
std::optional<Split> parse_split(const std::string& s);

// One social-media / message-board document.
struct Post {
    std::string id;
    Source source;
    Domain domain;
    std::string text;
    std::optional<Label> label;
    std::optional<std::string> annotator;
    std::optional<std::int64_t> created_utc;

    bool operator==(const Post&) const = default;
};

// (source, domain, split) address of a slice. nullopt source/domain means the
// combined "all" axis.
struct SliceKey {
    std::optional<Source> source;  // nullopt = ALL
    std::optional<Domain> domain;  // nullopt = ALL
    Split split = Split::unsplit;

    std::string str() const;  // e.g. "reddit_cardiovascular_train", "all_all_test"
    auto operator<=>(const SliceKey&) const = default;
};

// Ordered, deduplicated set of posts. Construct through dedup()/merge()/
// stratified_split() so the no-duplicate invariants hold.
struct CorpusSlice {
    SliceKey key;
    std::vector<Post> posts;

    std::size_t size() const { return posts.size(); }
    bool empty() const { return posts.empty(); }
    // Content hash of the ordered post ids.
    std::string fingerprint() const;
};

struct DedupResult {
    CorpusSlice slice;
    std::size_t removed = 0;
};

// First occurrence wins, for id collisions and for exact-text collisions
// (texts compared after whitespace trim + combining-mark composition).
DedupResult dedup(std::vector<Post> posts, SliceKey key = {});

struct SplitSpec {
    double train_ratio = 0.66;
    double validation_ratio = 0.17;
    double test_ratio = 0.17;
    std::uint64_t seed = 0;

    void validate() const;  // ratios in (0,1), summing to 1 +- 1e-9
};

struct SplitResult {
    CorpusSlice train;
    CorpusSlice validation;
    CorpusSlice test;
};

// Per-label shuffle (seeded) followed by contiguous ratio cuts; floor sizes
// for validation/test, remainder to train. Rejects unlabeled posts and ratio
// choices that leave any output slice empty.
SplitResult stratified_split(const CorpusSlice& slice, const SplitSpec& spec);

// Concatenation in argument order followed by dedup. All inputs must share
// one split value (or all be unsplit).
CorpusSlice merge(const std::vector<CorpusSlice>& slices, SliceKey new_key);

// Keys: "patient_voice", "not_relevant", "unlabeled".
std::map<std::string, std::size_t> label_counts(const CorpusSlice& slice);

// Throws DataError if any validation/test id or exact text body appears in
// the training slice.
void assert_no_leakage(const CorpusSlice& train, const CorpusSlice& validation,
                       const CorpusSlice& test);

// ---- record file format -----------------------------------------------
// One JSON object per line, UTF-8. Fields: id, source, domain, text, and
// optional label, annotator, created_utc. Unknown fields are ignored.

std::string serialize_post(const Post& p);  // canonical single line, no trailing \n

struct ParseError {
    std::size_t line_no = 0;  // 1-based
    std::string message;
};

struct ParseResult {
    std::vector<Post> posts;
    std::vector<ParseError> errors;
};

ParseResult parse_records(std::istream& in);
ParseResult parse_records(const std::string& content);
ParseResult parse_records_file(const std::filesystem::path& p);

// Writes canonical lines; output re-parses to equal posts.
void write_records_file(const std::filesystem::path& p, const std::vector<Post>& posts);

// Parses a record file and fails loudly on any malformed line.
std::vector<Post> load_records_strict(const std::filesystem::path& p);

// ---- text canonicalization ----------------------------------------------

// Trims Unicode whitespace from both ends (ASCII ws, NBSP, general
// punctuation spaces, ideographic space, line/paragraph separators).
std::string trim_unicode_ws(std::string_view utf8);

// Key used for exact-text dedup: trimmed text with common Latin combining
// sequences composed to their precomposed form. Full Unicode NFC is out of
// scope; the table covers the Latin-1 compositions.
std::string canonical_text_key(std::string_view utf8);

}  // namespace pvoice::corpus
