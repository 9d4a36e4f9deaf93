#include "pvoice/textprep.hpp"

#include <unordered_set>

#include "pvoice/unicode.hpp"

namespace pvoice::textprep {

namespace {

// Word characters: ASCII alphanumerics plus non-ASCII code points outside the
// common punctuation/symbol blocks. Not a full Unicode property lookup; the
// approximation is documented with the pipeline.
bool is_word_char(char32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (unicode::is_space(cp)) return false;
    if (cp >= 0xa0 && cp <= 0xbf) return false;   // Latin-1 punctuation and symbols
    if (cp == 0xd7 || cp == 0xf7) return false;   // multiplication / division signs
    if (cp >= 0x2000 && cp <= 0x2bff) return false;  // general punctuation, arrows, symbols
    if (cp >= 0x3000 && cp <= 0x303f) return false;  // CJK punctuation
    if (cp >= 0xfe30 && cp <= 0xfe6f) return false;
    if (cp >= 0x1f000) return false;  // emoji and beyond
    return true;
}

char32_t lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    if (cp >= 0xc0 && cp <= 0xde && cp != 0xd7) return cp + 0x20;  // Latin-1 uppercase
    return cp;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenPipelineConfig& config) {
    std::vector<std::string> out;
    std::string token;
    int token_cps = 0;

    const auto flush = [&]() {
        if (token.empty()) return;
        std::string t = std::move(token);
        const int cps = token_cps;
        token.clear();
        token_cps = 0;
        if (cps < config.min_token_len) return;
        if (config.strip_stopwords && is_stopword(t)) return;
        out.push_back(config.stem ? porter_stem(t) : std::move(t));
    };

    std::size_t i = 0;
    while (i < text.size()) {
        const auto d = unicode::decode(text, i);
        i += static_cast<std::size_t>(d.len);
        if (is_word_char(d.cp)) {
            unicode::encode(config.lowercase ? lower(d.cp) : d.cp, token);
            ++token_cps;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

TermCounts count_terms(const std::vector<std::string>& tokens) {
    TermCounts tc;
    for (const std::string& t : tokens) ++tc.counts[t];
    tc.total = static_cast<std::int64_t>(tokens.size());
    return tc;
}

const std::vector<std::string>& stopword_list() {
    // English stopword list, 179 entries, reproduced verbatim. Entries with
    // apostrophes cannot match post-tokenization output (the tokenizer splits
    // on the apostrophe) but are kept so the documented list stays intact.
    static const std::vector<std::string> words = {
        "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "you're",
        "you've", "you'll", "you'd", "your", "yours", "yourself", "yourselves", "he", "him",
        "his", "himself", "she", "she's", "her", "hers", "herself", "it", "it's", "its",
        "itself", "they", "them", "their", "theirs", "themselves", "what", "which", "who",
        "whom", "this", "that", "that'll", "these", "those", "am", "is", "are", "was",
        "were", "be", "been", "being", "have", "has", "had", "having", "do", "does", "did",
        "doing", "a", "an", "the", "and", "but", "if", "or", "because", "as", "until",
        "while", "of", "at", "by", "for", "with", "about", "against", "between", "into",
        "through", "during", "before", "after", "above", "below", "to", "from", "up",
        "down", "in", "out", "on", "off", "over", "under", "again", "further", "then",
        "once", "here", "there", "when", "where", "why", "how", "all", "any", "both",
        "each", "few", "more", "most", "other", "some", "such", "no", "nor", "not", "only",
        "own", "same", "so", "than", "too", "very", "s", "t", "can", "will", "just", "don",
        "don't", "should", "should've", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain",
        "aren", "aren't", "couldn", "couldn't", "didn", "didn't", "doesn", "doesn't",
        "hadn", "hadn't", "hasn", "hasn't", "haven", "haven't", "isn", "isn't", "ma",
        "mightn", "mightn't", "mustn", "mustn't", "needn", "needn't", "shan", "shan't",
        "shouldn", "shouldn't", "wasn", "wasn't", "weren", "weren't", "won", "won't",
        "wouldn", "wouldn't",
    };
    return words;
}

bool is_stopword(std::string_view token) {
    static const std::unordered_set<std::string_view> set = [] {
        std::unordered_set<std::string_view> s;
        for (const std::string& w : stopword_list()) s.insert(w);
        return s;
    }();
    return set.count(token) > 0;
}

}  // namespace pvoice::textprep
