#include "pvoice/synth.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "pvoice/textprep.hpp"

namespace pvoice::synth {

using corpus::CorpusSlice;
using corpus::Domain;
using corpus::Label;
using corpus::Post;
using corpus::SliceKey;
using corpus::Source;
using corpus::Split;

namespace {

// Final syllables never form a Porter suffix, so every generated word is a
// stemmer fixed point (checked by the textprep idempotence test).
constexpr const char* kSyllables[] = {
    "ka",  "ro",  "mi",  "tu",  "vor", "gar",  "nix", "dor", "fim", "mur", "rik",
    "lom", "tav", "vak", "zol", "pol", "tir",  "mon", "lan", "den", "bran", "sul",
};
constexpr std::size_t kSyllableCount = sizeof(kSyllables) / sizeof(kSyllables[0]);

std::string make_word(util::Rng& rng) {
    const std::size_t n = 2 + rng.below(3);  // 2-4 syllables
    std::string w;
    for (std::size_t i = 0; i < n; ++i) w += kSyllables[rng.below(kSyllableCount)];
    return w;
}

// Real-word fillers give the tokenizer pipeline something to strip and stem.
const std::vector<std::string>& stopword_fillers() {
    static const std::vector<std::string> v = {"the", "and", "i",  "was", "of",
                                               "to",  "a",   "my", "in",  "it"};
    return v;
}

const std::vector<std::string>& common_fillers() {
    static const std::vector<std::string> v = {"taking",  "doctor", "week",   "feel",
                                               "started", "months", "effects", "years",
                                               "pain",    "help"};
    return v;
}

const std::string& pick(const std::vector<std::string>& pool, util::Rng& rng) {
    return pool[rng.below(pool.size())];
}

}  // namespace

std::vector<std::string> sample_vocabulary(std::size_t n, util::Rng& rng) {
    std::set<std::string> seen;
    std::vector<std::string> out;
    while (out.size() < n) {
        std::string w = make_word(rng);
        if (seen.insert(w).second) out.push_back(std::move(w));
    }
    return out;
}

namespace {

struct TextSampler {
    const std::vector<std::string>* label_pool = nullptr;
    const std::vector<std::string>* opposite_pool = nullptr;
    const std::vector<std::string>* domain_pool = nullptr;
    const std::vector<std::string>* domain_alt_pool = nullptr;  // optional second domain pool
    const std::vector<std::string>* shared_pool = nullptr;
    const std::vector<std::string>* source_pool = nullptr;
    double label_noise = 0.06;

    std::string sample(util::Rng& rng, std::size_t min_tokens, std::size_t max_tokens) const {
        const std::size_t len = min_tokens + rng.below(max_tokens - min_tokens + 1);
        std::string text;
        bool sentence_start = true;
        for (std::size_t i = 0; i < len; ++i) {
            const double r = rng.uniform();
            std::string tok;
            if (r < 0.30 && label_pool) {
                const bool flip = rng.uniform() < label_noise && opposite_pool;
                tok = pick(flip ? *opposite_pool : *label_pool, rng);
            } else if (r < 0.55 && domain_pool) {
                const bool alt = domain_alt_pool && rng.uniform() < 0.5;
                tok = pick(alt ? *domain_alt_pool : *domain_pool, rng);
            } else if (r < 0.75 && shared_pool) {
                tok = pick(*shared_pool, rng);
            } else if (r < 0.85 && source_pool) {
                tok = pick(*source_pool, rng);
            } else if (r < 0.93) {
                tok = pick(stopword_fillers(), rng);
            } else {
                tok = pick(common_fillers(), rng);
            }
            if (sentence_start && !tok.empty()) tok[0] = static_cast<char>(tok[0] - 'a' + 'A');
            sentence_start = false;
            if (!text.empty()) {
                const double punct = rng.uniform();
                if (punct < 0.06) {
                    text += ". ";
                    sentence_start = true;
                } else if (punct < 0.12) {
                    text += ", ";
                } else {
                    text += ' ';
                }
            }
            text += tok;
        }
        text += '.';
        return text;
    }
};

// Generates labeled posts for one (source, domain, split) cell, retrying on
// the rare exact-text collision so dedup never removes anything.
void generate_posts(std::vector<Post>& out, std::unordered_set<std::string>& seen_texts,
                    const TextSampler& pv_sampler, const TextSampler& nr_sampler,
                    const Source& source, const Domain& domain, Split split, std::size_t n_pv,
                    std::size_t n_nr, util::Rng& rng, std::int64_t& clock) {
    const std::string prefix =
        source.str() + "_" + domain.str() + "_" + corpus::split_str(split) + "_";
    const std::size_t total = n_pv + n_nr;
    for (std::size_t i = 0; i < total; ++i) {
        const bool pv = i < n_pv;
        const TextSampler& sampler = pv ? pv_sampler : nr_sampler;
        std::string text = sampler.sample(rng, 10, 30);
        while (!seen_texts.insert(corpus::canonical_text_key(text)).second) {
            text.pop_back();  // drop the period, extend, re-close
            text += ' ';
            text += sampler.domain_pool ? pick(*sampler.domain_pool, rng)
                                        : pick(common_fillers(), rng);
            text += '.';
        }
        Post p;
        p.id = prefix + std::to_string(i);
        p.source = source;
        p.domain = domain;
        p.text = std::move(text);
        p.label = pv ? Label::patient_voice : Label::not_relevant;
        p.created_utc = 1600000000 + clock++;
        out.push_back(std::move(p));
    }
}

}  // namespace

const CorpusSlice& GridCorpus::slice(const Source& s, const Domain& d, Split split) const {
    const auto it = slices.find(SliceKey{s, d, split}.str());
    if (it == slices.end())
        throw DataError("synthetic corpus: missing slice " + SliceKey{s, d, split}.str());
    return it->second;
}

GridCorpus table_grid_corpus(std::uint64_t seed) {
    util::Rng rng(seed);

    GridCorpus g;
    g.sources = {Source::reddit(), Source::socialgist()};
    g.domains = {Domain::cardiovascular(), Domain::oncology(), Domain::immunology(),
                 Domain::neurology()};

    // Per-domain (pv, nr) counts for train/validation/test.
    struct Volumes {
        std::size_t train_pv, train_nr, val_pv, val_nr, test_pv, test_nr;
    };
    const Volumes volumes[4] = {
        {1760, 724, 440, 204, 422, 173},  // cardiovascular
        {1763, 791, 437, 205, 551, 47},   // oncology
        {1753, 806, 447, 194, 538, 51},   // immunology
        {1753, 595, 444, 145, 331, 119},  // neurology
    };

    const std::vector<std::string> shared = sample_vocabulary(80, rng);
    const std::vector<std::string> pv_pool = sample_vocabulary(50, rng);
    const std::vector<std::string> nr_pool = sample_vocabulary(50, rng);
    std::vector<std::vector<std::string>> domain_pools;
    for (std::size_t d = 0; d < 4; ++d) domain_pools.push_back(sample_vocabulary(60, rng));
    std::vector<std::vector<std::string>> source_pools;
    for (std::size_t s = 0; s < 2; ++s) source_pools.push_back(sample_vocabulary(30, rng));
    // Distinct lexicon for the reddit immunology slice; mirrors a dataset
    // whose discourse diverges from its domain peers.
    const std::vector<std::string> immuno_reddit = sample_vocabulary(40, rng);

    std::unordered_set<std::string> seen_texts;
    std::int64_t clock = 0;

    for (std::size_t di = 0; di < g.domains.size(); ++di) {
        const Volumes& v = volumes[di];
        const std::size_t per_split[3][2] = {
            {v.train_pv, v.train_nr}, {v.val_pv, v.val_nr}, {v.test_pv, v.test_nr}};
        const Split splits[3] = {Split::train, Split::validation, Split::test};

        for (int si = 0; si < 2; ++si) {
            const Source& source = g.sources[static_cast<std::size_t>(si)];
            const bool distinct = si == 0 && g.domains[di] == Domain::immunology();

            TextSampler pv_sampler;
            pv_sampler.label_pool = &pv_pool;
            pv_sampler.opposite_pool = &nr_pool;
            pv_sampler.domain_pool = &domain_pools[di];
            pv_sampler.domain_alt_pool = distinct ? &immuno_reddit : nullptr;
            pv_sampler.shared_pool = &shared;
            pv_sampler.source_pool = &source_pools[static_cast<std::size_t>(si)];
            TextSampler nr_sampler = pv_sampler;
            nr_sampler.label_pool = &nr_pool;
            nr_sampler.opposite_pool = &pv_pool;

            for (int sp = 0; sp < 3; ++sp) {
                // Posts alternate between the two sources; this source takes
                // its share of the domain volume.
                const std::size_t pv_total = per_split[sp][0];
                const std::size_t nr_total = per_split[sp][1];
                const std::size_t pv_n = si == 0 ? (pv_total + 1) / 2 : pv_total / 2;
                const std::size_t nr_n = si == 0 ? (nr_total + 1) / 2 : nr_total / 2;

                std::vector<Post> posts;
                generate_posts(posts, seen_texts, pv_sampler, nr_sampler, source, g.domains[di],
                               splits[sp], pv_n, nr_n, rng, clock);
                const SliceKey key{source, g.domains[di], splits[sp]};
                corpus::DedupResult dr = corpus::dedup(std::move(posts), key);
                g.slices.emplace(key.str(), std::move(dr.slice));
            }
        }
    }

    std::set<std::string> vocab;
    for (const auto& pool : {shared, pv_pool, nr_pool, immuno_reddit})
        vocab.insert(pool.begin(), pool.end());
    for (const auto& pool : domain_pools) vocab.insert(pool.begin(), pool.end());
    for (const auto& pool : source_pools) vocab.insert(pool.begin(), pool.end());
    for (const std::string& w : common_fillers()) vocab.insert(textprep::porter_stem(w));
    g.vocabulary.assign(vocab.begin(), vocab.end());
    g.pv_stems = pv_pool;
    g.nr_stems = nr_pool;
    return g;
}

classifier::EmbeddingTable toy_embeddings(const std::vector<std::string>& stems,
                                          const std::vector<std::string>& positive_stems,
                                          const std::vector<std::string>& negative_stems,
                                          std::uint64_t seed, std::size_t dim) {
    std::set<std::string> pos(positive_stems.begin(), positive_stems.end());
    std::set<std::string> neg(negative_stems.begin(), negative_stems.end());
    std::set<std::string> ordered(stems.begin(), stems.end());

    util::Rng rng(seed);
    // Fixed label direction.
    std::vector<double> axis(dim);
    double norm = 0.0;
    for (double& x : axis) {
        x = rng.gaussian();
        norm += x * x;
    }
    norm = std::sqrt(norm);
    for (double& x : axis) x /= norm;

    classifier::EmbeddingTable t;
    t.dim = dim;
    const double spread = 0.55 / std::sqrt(static_cast<double>(dim));
    for (const std::string& stem : ordered) {
        std::vector<double> v(dim);
        for (double& x : v) x = spread * rng.gaussian();
        const double push = pos.count(stem) ? 0.9 : neg.count(stem) ? -0.9 : 0.0;
        if (push != 0.0)
            for (std::size_t k = 0; k < dim; ++k) v[k] += push * axis[k];
        t.index.emplace(stem, t.tokens.size());
        t.tokens.push_back(stem);
        t.vectors.push_back(std::move(v));
    }
    return t;
}

classifier::EmbeddingTable grid_embeddings(const GridCorpus& corpus, std::uint64_t seed) {
    return toy_embeddings(corpus.vocabulary, corpus.pv_stems, corpus.nr_stems, seed);
}

void write_corpus_dir(const GridCorpus& corpus, const std::filesystem::path& dir,
                      std::uint64_t embedding_seed) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, slice] : corpus.slices)
        corpus::write_records_file(dir / (name + ".jsonl"), slice.posts);
    util::write_file(dir / "embeddings.txt", grid_embeddings(corpus, embedding_seed).to_text());
}

SliceBundle separable_corpus(std::uint64_t seed, std::size_t n_train, std::size_t n_validation,
                             std::size_t n_test) {
    util::Rng rng(seed);
    const std::vector<std::string> pv_pool = sample_vocabulary(120, rng);
    const std::vector<std::string> nr_pool = sample_vocabulary(120, rng);

    TextSampler pv_sampler;
    pv_sampler.label_pool = &pv_pool;
    pv_sampler.label_noise = 0.0;  // strictly disjoint topics
    TextSampler nr_sampler;
    nr_sampler.label_pool = &nr_pool;
    nr_sampler.label_noise = 0.0;

    const Source source = Source::other("synthetic");
    const Domain domain = Domain::other("separable");

    std::unordered_set<std::string> seen_texts;
    std::int64_t clock = 0;
    const auto build = [&](Split split, std::size_t n) {
        std::vector<Post> posts;
        const std::size_t n_pv = (n * 3) / 5;  // 60/40 imbalance
        generate_posts(posts, seen_texts, pv_sampler, nr_sampler, source, domain, split, n_pv,
                       n - n_pv, rng, clock);
        return corpus::dedup(std::move(posts), SliceKey{source, domain, split}).slice;
    };

    SliceBundle b;
    b.train = build(Split::train, n_train);
    b.validation = build(Split::validation, n_validation);
    b.test = build(Split::test, n_test);
    return b;
}

AggregationCorpus aggregation_corpus(std::uint64_t seed) {
    util::Rng rng(seed);

    // Slices A and B draw from one vocabulary; slice C from a disjoint one.
    const std::vector<std::string> shared_neutral = sample_vocabulary(110, rng);
    const std::vector<std::string> shared_pv = sample_vocabulary(90, rng);
    const std::vector<std::string> shared_nr = sample_vocabulary(90, rng);
    const std::vector<std::string> isolated_neutral = sample_vocabulary(110, rng);
    const std::vector<std::string> isolated_pv = sample_vocabulary(90, rng);
    const std::vector<std::string> isolated_nr = sample_vocabulary(90, rng);

    std::unordered_set<std::string> seen_texts;
    std::int64_t clock = 0;

    const auto build_bundle = [&](const std::string& source_name, const std::string& domain_name,
                                  const std::vector<std::string>& neutral,
                                  const std::vector<std::string>& pv_pool,
                                  const std::vector<std::string>& nr_pool) {
        TextSampler pv_sampler;
        pv_sampler.label_pool = &pv_pool;
        pv_sampler.opposite_pool = &nr_pool;
        pv_sampler.domain_pool = &neutral;
        pv_sampler.label_noise = 0.20;
        TextSampler nr_sampler = pv_sampler;
        nr_sampler.label_pool = &nr_pool;
        nr_sampler.opposite_pool = &pv_pool;

        const Source source = Source::other(source_name);
        const Domain domain = Domain::other(domain_name);
        const auto build = [&](Split split, std::size_t n_pv, std::size_t n_nr) {
            std::vector<Post> posts;
            generate_posts(posts, seen_texts, pv_sampler, nr_sampler, source, domain, split, n_pv,
                           n_nr, rng, clock);
            return corpus::dedup(std::move(posts), SliceKey{source, domain, split}).slice;
        };
        SliceBundle b;
        b.train = build(Split::train, 90, 60);
        b.validation = build(Split::validation, 42, 28);
        b.test = build(Split::test, 240, 160);
        return b;
    };

    AggregationCorpus c;
    c.a = build_bundle("foruma", "sharedtopic", shared_neutral, shared_pv, shared_nr);
    c.b = build_bundle("forumb", "sharedtopic", shared_neutral, shared_pv, shared_nr);
    c.c = build_bundle("forumc", "isolatedtopic", isolated_neutral, isolated_pv, isolated_nr);
    return c;
}

}  // namespace pvoice::synth
