#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pvoice/textprep.hpp"

namespace pvoice::similarity {

// Term statistics over a collection of datasets, each dataset treated as one
// document: tfidf(t,d) = (f_td / total_d) * ln(|D| / df_t).
class TfidfModel {
  public:
    static TfidfModel build(std::vector<std::pair<std::string, textprep::TermCounts>> datasets);

    std::size_t doc_count() const { return datasets_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    bool has_dataset(const std::string& id) const;
    const textprep::TermCounts& counts(const std::string& dataset_id) const;
    std::size_t doc_freq(const std::string& term) const;

    // 0 when the term is absent from the dataset; rejects unknown ids.
    double tfidf(const std::string& term, const std::string& dataset_id) const;

  private:
    std::vector<std::pair<std::string, textprep::TermCounts>> datasets_;
    std::vector<std::string> ids_;
    std::map<std::string, std::size_t> index_;     // dataset_id -> position
    std::map<std::string, std::size_t> doc_freq_;  // term -> #datasets containing it
};

struct DatasetVector {
    std::string dataset_id;
    std::map<std::string, double> weights;  // zero weights omitted

    double norm() const;
};

DatasetVector dataset_vector(const TfidfModel& model, const std::string& dataset_id);

// dot(a,b) / (|a|*|b|); 0 by convention when either norm is 0.
double cosine(const DatasetVector& a, const DatasetVector& b);

struct SimilarityMatrix {
    std::vector<std::string> ids;
    std::vector<std::vector<double>> values;        // symmetric, unit diagonal
    std::vector<std::string> zero_norm_datasets;    // degenerate inputs flagged, not fatal
};

SimilarityMatrix similarity_matrix(const TfidfModel& model);  // needs >= 2 datasets

// Per-post sensitivity mode: every post is a document in the tf-idf model and
// a dataset's vector is the sum of its posts' vectors.
SimilarityMatrix per_post_similarity_matrix(
    const std::vector<std::pair<std::string, std::vector<textprep::TermCounts>>>& datasets);

enum class SimilarityBand { below_range, low, medium, high };

// Half-open bands: [0,0.45) below_range, [0.45,0.60) low, [0.60,0.75) medium,
// [0.75,1.0] high. Rejects values outside [0,1].
SimilarityBand band(double value);
std::string band_name(SimilarityBand b);

struct TermScore {
    std::string term;
    double score;
    bool shared;  // term occurs in another dataset's top-k list
};

struct TopTerms {
    std::string dataset_id;
    std::vector<TermScore> terms;  // descending score, ties broken lexicographically
    bool truncated = false;        // fewer than k nonzero terms existed
};

TopTerms top_terms(const TfidfModel& model, const std::string& dataset_id, std::size_t k);

// ---- report emission ----------------------------------------------------

std::string matrix_csv(const SimilarityMatrix& m);    // cells to 6 decimals
std::string matrix_json(const SimilarityMatrix& m);
std::string band_table_csv(const SimilarityMatrix& m);  // one row per unordered pair
std::string top_terms_csv(const TopTerms& t);           // columns term,score,shared

}  // namespace pvoice::similarity
