#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pvoice/classifier.hpp"
#include "pvoice/corpus.hpp"

namespace pvoice::synth {

// Deterministic synthetic corpora for tests, demos and the bundled
// end-to-end experiment data. Same seed, same bytes.

// Pseudo-words built from syllables; lowercase, stemmer-stable by
// construction for the chosen syllable set, never stopwords.
std::vector<std::string> sample_vocabulary(std::size_t n, util::Rng& rng);

struct SliceBundle {
    corpus::CorpusSlice train;
    corpus::CorpusSlice validation;
    corpus::CorpusSlice test;
};

// Eight (source x domain) slices with per-domain split/label counts matching
// the reference volume table (9,945/2,516/2,232 posts across splits; the
// four domain train slices merge to 7,029 patient_voice / 2,916 not_relevant).
struct GridCorpus {
    std::vector<corpus::Source> sources;
    std::vector<corpus::Domain> domains;
    std::map<std::string, corpus::CorpusSlice> slices;  // key: SliceKey.str()
    std::vector<std::string> vocabulary;                // all stems used
    std::vector<std::string> pv_stems;                  // patient-voice indicative stems
    std::vector<std::string> nr_stems;                  // not-relevant indicative stems

    const corpus::CorpusSlice& slice(const corpus::Source& s, const corpus::Domain& d,
                                     corpus::Split split) const;
};

GridCorpus table_grid_corpus(std::uint64_t seed);

// 50-dimensional toy embeddings covering the given stems; label-indicative
// stems get a consistent direction so the attention model can learn.
classifier::EmbeddingTable toy_embeddings(const std::vector<std::string>& stems,
                                          const std::vector<std::string>& positive_stems,
                                          const std::vector<std::string>& negative_stems,
                                          std::uint64_t seed, std::size_t dim = 50);

// Embeddings for the grid corpus vocabulary.
classifier::EmbeddingTable grid_embeddings(const GridCorpus& corpus, std::uint64_t seed);

// Writes one record file per slice (<source>_<domain>_<split>.jsonl) plus
// embeddings.txt into dir.
void write_corpus_dir(const GridCorpus& corpus, const std::filesystem::path& dir,
                      std::uint64_t embedding_seed);

// Linearly separable two-topic corpus (disjoint label vocabularies).
SliceBundle separable_corpus(std::uint64_t seed, std::size_t n_train = 2000,
                             std::size_t n_validation = 500, std::size_t n_test = 500);

// Three-slice corpus for aggregation experiments: slices A and B share one
// vocabulary (high similarity band), slice C is lexically disjoint
// (below_range band against both).
struct AggregationCorpus {
    SliceBundle a;
    SliceBundle b;
    SliceBundle c;
};

AggregationCorpus aggregation_corpus(std::uint64_t seed);

}  // namespace pvoice::synth
