#include <string>
#include <string_view>
#include <utility>

#include "pvoice/textprep.hpp"

// Porter stemming algorithm, original 1980 rule set (no later revisions).
// Works on lowercase ASCII; bytes outside [a-z] are treated as consonants,
// which leaves digit-bearing tokens like "1000mg" untouched.

namespace pvoice::textprep {

namespace {

class Stemmer {
  public:
    explicit Stemmer(std::string_view word) : w_(word) {}

    std::string run() {
        if (w_.size() <= 2) return w_;
        step1a();
        step1b();
        step1c();
        step2();
        step3();
        step4();
        step5a();
        step5b();
        return w_;
    }

  private:
    std::string w_;
    int j_ = 0;  // last index of the stem preceding a matched suffix; -1 when
                 // the suffix consumed the whole word

    int last() const { return static_cast<int>(w_.size()) - 1; }

    bool is_consonant(int i) const {
        switch (w_[static_cast<std::size_t>(i)]) {
            case 'a':
            case 'e':
            case 'i':
            case 'o':
            case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !is_consonant(i - 1);
            default:
                return true;
        }
    }

    // Measure m of w_[0..j_] in the form [C](VC)^m[V].
    int measure() const {
        int m = 0;
        int i = 0;
        while (true) {
            if (i > j_) return m;
            if (!is_consonant(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return m;
                if (is_consonant(i)) break;
                ++i;
            }
            ++i;
            ++m;
            while (true) {
                if (i > j_) return m;
                if (!is_consonant(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool stem_has_vowel() const {
        for (int i = 0; i <= j_; ++i)
            if (!is_consonant(i)) return true;
        return false;
    }

    // w_[0..k] ends with a double consonant.
    bool double_consonant(int k) const {
        if (k < 1) return false;
        if (w_[static_cast<std::size_t>(k)] != w_[static_cast<std::size_t>(k - 1)]) return false;
        return is_consonant(k);
    }

    // w_[0..k] ends consonant-vowel-consonant where the final consonant is
    // not w, x or y (the *o condition).
    bool cvc(int k) const {
        if (k < 2 || !is_consonant(k) || is_consonant(k - 1) || !is_consonant(k - 2))
            return false;
        const char c = w_[static_cast<std::size_t>(k)];
        return c != 'w' && c != 'x' && c != 'y';
    }

    // On a match sets j_ to the last stem index (may be -1).
    bool ends(std::string_view s) {
        if (s.size() > w_.size()) return false;
        if (w_.compare(w_.size() - s.size(), s.size(), s) != 0) return false;
        j_ = static_cast<int>(w_.size()) - static_cast<int>(s.size()) - 1;
        return true;
    }

    void set_to(std::string_view s) {
        w_.resize(static_cast<std::size_t>(j_ + 1));
        w_ += s;
    }

    void replace_if_m_positive(std::string_view s) {
        if (measure() > 0) set_to(s);
    }

    void step1a() {
        if (w_.back() != 's') return;
        if (ends("sses"))
            w_.resize(w_.size() - 2);
        else if (ends("ies"))
            set_to("i");
        else if (w_[w_.size() - 2] != 's')
            w_.resize(w_.size() - 1);
    }

    void step1b() {
        bool removed = false;
        if (ends("eed")) {
            if (measure() > 0) w_.resize(w_.size() - 1);
        } else if (ends("ed") && stem_has_vowel()) {
            w_.resize(w_.size() - 2);
            removed = true;
        } else if (ends("ing") && stem_has_vowel()) {
            w_.resize(w_.size() - 3);
            removed = true;
        }
        if (!removed) return;

        if (ends("at") || ends("bl") || ends("iz")) {
            w_ += 'e';
        } else if (double_consonant(last())) {
            const char c = w_.back();
            if (c != 'l' && c != 's' && c != 'z') w_.resize(w_.size() - 1);
        } else {
            j_ = last();
            if (measure() == 1 && cvc(last())) w_ += 'e';
        }
    }

    void step1c() {
        if (ends("y") && stem_has_vowel()) w_.back() = 'i';
    }

    // Steps 2-4 commit to the first suffix that matches; a failed measure
    // condition does not fall through to shorter suffixes.
    void step2() {
        static constexpr std::pair<std::string_view, std::string_view> rules[] = {
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        };
        for (const auto& [suffix, repl] : rules) {
            if (ends(suffix)) {
                replace_if_m_positive(repl);
                return;
            }
        }
    }

    void step3() {
        static constexpr std::pair<std::string_view, std::string_view> rules[] = {
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        };
        for (const auto& [suffix, repl] : rules) {
            if (ends(suffix)) {
                replace_if_m_positive(repl);
                return;
            }
        }
    }

    void step4() {
        static constexpr std::string_view suffixes[] = {
            "al",   "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
            "ent",  "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
        };
        for (const std::string_view suffix : suffixes) {
            if (!ends(suffix)) continue;
            if (suffix == "ion" &&
                !(j_ >= 0 && (w_[static_cast<std::size_t>(j_)] == 's' ||
                              w_[static_cast<std::size_t>(j_)] == 't')))
                return;
            if (measure() > 1) w_.resize(static_cast<std::size_t>(j_ + 1));
            return;
        }
    }

    void step5a() {
        if (w_.back() != 'e') return;
        j_ = last() - 1;
        const int m = measure();
        if (m > 1 || (m == 1 && !cvc(last() - 1))) w_.resize(w_.size() - 1);
    }

    void step5b() {
        j_ = last();
        if (w_.back() == 'l' && double_consonant(last()) && measure() > 1)
            w_.resize(w_.size() - 1);
    }
};

}  // namespace

std::string porter_stem(std::string_view word) {
    return Stemmer(word).run();
}

}  // namespace pvoice::textprep
