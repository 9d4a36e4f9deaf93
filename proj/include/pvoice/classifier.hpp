#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvoice/corpus.hpp"
#include "pvoice/textprep.hpp"

namespace pvoice::classifier {

enum class Backend { bow_linear, embed_attn };

std::string backend_str(Backend b);
std::optional<Backend> parse_backend(const std::string& s);

// Bag-of-words feature space, built from the training slice only. idf is the
// smoothed variant ln((1+N)/(1+df)) + 1 so no in-vocabulary feature zeroes out.
struct FeatureSpace {
    std::map<std::string, std::size_t> vocabulary;  // term -> dense index, lexicographic
    std::vector<double> idf;
    std::size_t min_doc_freq = 2;
    std::string train_fingerprint;

    static FeatureSpace build(const corpus::CorpusSlice& train, std::size_t min_doc_freq = 2);
    std::size_t size() const { return idf.size(); }
};

struct SparseVec {
    std::vector<std::pair<std::size_t, double>> items;  // sorted by index
    bool empty_doc = false;  // nothing survived preprocessing / vocabulary lookup
};

// L2-normalized tf*idf vector; empty-after-preprocessing documents yield the
// zero vector with the flag set.
SparseVec featurize(const corpus::Post& post, const FeatureSpace& space);

// Frozen pretrained token embeddings. File format: one token per line, token
// followed by `dim` space-separated decimal floats.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::vector<std::string> tokens;
    std::vector<std::vector<double>> vectors;  // parallel to tokens
    std::map<std::string, std::size_t> index;

    static EmbeddingTable parse(std::istream& in);
    static EmbeddingTable load(const std::filesystem::path& p);
    const std::vector<double>* find(const std::string& token) const;
    std::string to_text() const;
};

// Softmax(q . v_i / sqrt(E)) weighted sum. Zero query reduces to mean pooling.
// Rejects an empty input list.
std::vector<double> attn_pool(const std::vector<std::vector<double>>& vectors,
                              const std::vector<double>& query);

struct TrainConfig {
    double learning_rate = 0.0;  // 0 = backend default (0.1 bow_linear, 0.05 embed_attn)
    int epochs_max = 50;
    int patience = 5;  // early stop on validation macro F1
    int batch_size = 32;
    std::uint64_t seed = 0;
    bool class_weighting = true;

    void validate() const;
    double effective_learning_rate(Backend b) const;
};

struct TrainManifest {
    Backend backend = Backend::bow_linear;
    TrainConfig config;
    double learning_rate_used = 0.0;
    std::string train_fingerprint;
    std::string validation_fingerprint;
    std::vector<double> validation_f1_curve;  // one entry per trained epoch
    int best_epoch = -1;                      // epoch of the returned checkpoint, 0-based
    bool degenerate = false;                  // single-class training slice
    std::string params_hash;

    // Deterministic content hash; identical (data, config, seed) runs match.
    std::string hash() const;
};

struct TrainedClassifier {
    Backend backend = Backend::bow_linear;
    double threshold = 0.5;
    corpus::Label majority_label = corpus::Label::patient_voice;

    // bow_linear parameters
    FeatureSpace space;
    std::vector<double> weights;
    double bias = 0.0;

    // embed_attn parameters (embedding table is frozen, stored for self-
    // contained prediction)
    EmbeddingTable embeddings;
    std::vector<double> query;
    std::vector<double> head_weights;
    double head_bias = 0.0;

    TrainManifest manifest;

    void save(const std::filesystem::path& p) const;
    static TrainedClassifier load(const std::filesystem::path& p);
};

struct PredictOutcome {
    corpus::Label label = corpus::Label::not_relevant;
    double score = 0.0;  // sigmoid of the logit
    bool degenerate = false;
};

// label = patient_voice iff score >= threshold. Documents that reduce to the
// zero vector get the training majority label with score 0.5 and the flag.
PredictOutcome predict(const TrainedClassifier& model, const corpus::Post& post);

// Minibatch gradient descent on class-weighted binary cross-entropy with
// deterministic seeded shuffling; early-stops on validation macro F1 and
// returns the best-validation checkpoint.
TrainedClassifier train(Backend backend, const corpus::CorpusSlice& train,
                        const corpus::CorpusSlice& validation, const TrainConfig& config,
                        const EmbeddingTable* embeddings = nullptr);

// ---- loss/gradient internals ---------------------------------------------
// Single code path shared by the optimizer and the finite-difference tests.
namespace grad {

// Per-example loss: sample_weight * (softplus(z) - y*z), summed over the batch.

struct BowGrad {
    double loss = 0.0;
    std::vector<double> d_weights;
    double d_bias = 0.0;
};

BowGrad bow_loss_grad(const std::vector<double>& weights, double bias,
                      const std::vector<SparseVec>& docs, const std::vector<int>& labels,
                      const std::vector<double>& sample_weights,
                      const std::vector<std::size_t>& batch);

struct EmbedGrad {
    double loss = 0.0;
    std::vector<double> d_query;
    std::vector<double> d_head;
    double d_bias = 0.0;
};

// docs hold row indices into matrix; by convention row 0 is the all-zero
// out-of-vocabulary row. An empty row list pools to the zero vector.
EmbedGrad embed_loss_grad(const std::vector<double>& query, const std::vector<double>& head_weights,
                          double head_bias, const std::vector<std::vector<double>>& matrix,
                          const std::vector<std::vector<std::size_t>>& docs,
                          const std::vector<int>& labels,
                          const std::vector<double>& sample_weights,
                          const std::vector<std::size_t>& batch);

}  // namespace grad
}  // namespace pvoice::classifier
