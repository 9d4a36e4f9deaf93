#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace pvoice::textprep {

struct TokenPipelineConfig {
    bool lowercase = true;
    bool strip_stopwords = true;
    bool stem = true;
    int min_token_len = 2;  // in code points, >= 1
};

// Splits on non-alphanumeric boundaries, then applies lowercase, length
// filter, stopword filter and Porter stemming, in that order. Tokens with
// digits are kept; punctuation-only runs never form tokens.
std::vector<std::string> tokenize(std::string_view text, const TokenPipelineConfig& config = {});

struct TermCounts {
    std::map<std::string, std::int64_t> counts;  // no zero entries
    std::int64_t total = 0;                      // sum of counts
};

TermCounts count_terms(const std::vector<std::string>& tokens);

// The embedded English stopword list (179 entries, lowercase).
const std::vector<std::string>& stopword_list();
bool is_stopword(std::string_view token);

// Porter stemmer, original 1980 rules. Expects a lowercase word; tokens
// shorter than 3 characters pass through unchanged.
std::string porter_stem(std::string_view word);

}  // namespace pvoice::textprep
