#include "pvoice/similarity.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pvoice/util.hpp"

namespace pvoice::similarity {

TfidfModel TfidfModel::build(std::vector<std::pair<std::string, textprep::TermCounts>> datasets) {
    TfidfModel m;
    m.datasets_ = std::move(datasets);
    for (std::size_t i = 0; i < m.datasets_.size(); ++i) {
        const auto& [id, counts] = m.datasets_[i];
        if (!m.index_.emplace(id, i).second)
            throw DataError("tfidf model: duplicate dataset id " + id);
        m.ids_.push_back(id);
        for (const auto& [term, count] : counts.counts) {
            (void)count;
            ++m.doc_freq_[term];
        }
    }
    return m;
}

bool TfidfModel::has_dataset(const std::string& id) const { return index_.count(id) > 0; }

const textprep::TermCounts& TfidfModel::counts(const std::string& dataset_id) const {
    const auto it = index_.find(dataset_id);
    if (it == index_.end()) throw DataError("tfidf model: unknown dataset id " + dataset_id);
    return datasets_[it->second].second;
}

std::size_t TfidfModel::doc_freq(const std::string& term) const {
    const auto it = doc_freq_.find(term);
    return it == doc_freq_.end() ? 0 : it->second;
}

double TfidfModel::tfidf(const std::string& term, const std::string& dataset_id) const {
    const textprep::TermCounts& tc = counts(dataset_id);
    const auto it = tc.counts.find(term);
    if (it == tc.counts.end() || tc.total == 0) return 0.0;
    const double tf = static_cast<double>(it->second) / static_cast<double>(tc.total);
    const double idf =
        std::log(static_cast<double>(doc_count()) / static_cast<double>(doc_freq(term)));
    return tf * idf;
}

double DatasetVector::norm() const {
    double s = 0.0;
    for (const auto& [term, w] : weights) s += w * w;
    return std::sqrt(s);
}

DatasetVector dataset_vector(const TfidfModel& model, const std::string& dataset_id) {
    DatasetVector v;
    v.dataset_id = dataset_id;
    for (const auto& [term, count] : model.counts(dataset_id).counts) {
        (void)count;
        const double w = model.tfidf(term, dataset_id);
        if (w != 0.0) v.weights.emplace(term, w);
    }
    return v;
}

double cosine(const DatasetVector& a, const DatasetVector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    // Merge walk over the two sorted maps.
    double dot = 0.0;
    auto ia = a.weights.begin();
    auto ib = b.weights.begin();
    while (ia != a.weights.end() && ib != b.weights.end()) {
        if (ia->first < ib->first) {
            ++ia;
        } else if (ib->first < ia->first) {
            ++ib;
        } else {
            dot += ia->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    return dot / (na * nb);
}

SimilarityMatrix similarity_matrix(const TfidfModel& model) {
    if (model.doc_count() < 2)
        throw DataError("similarity matrix needs at least 2 datasets, got " +
                        std::to_string(model.doc_count()));
    SimilarityMatrix m;
    m.ids = model.ids();
    const std::size_t n = m.ids.size();

    std::vector<DatasetVector> vecs;
    vecs.reserve(n);
    for (const std::string& id : m.ids) {
        vecs.push_back(dataset_vector(model, id));
        if (vecs.back().weights.empty()) m.zero_norm_datasets.push_back(id);
    }

    m.values.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m.values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            // Clamp float noise so values stay inside the band domain.
            const double c = std::clamp(cosine(vecs[i], vecs[j]), 0.0, 1.0);
            m.values[i][j] = c;
            m.values[j][i] = c;
        }
    }
    return m;
}

SimilarityMatrix per_post_similarity_matrix(
    const std::vector<std::pair<std::string, std::vector<textprep::TermCounts>>>& datasets) {
    if (datasets.size() < 2)
        throw DataError("similarity matrix needs at least 2 datasets, got " +
                        std::to_string(datasets.size()));
    std::size_t doc_count = 0;
    std::map<std::string, std::size_t> doc_freq;
    for (const auto& [id, posts] : datasets) {
        (void)id;
        doc_count += posts.size();
        for (const textprep::TermCounts& tc : posts)
            for (const auto& [term, count] : tc.counts) {
                (void)count;
                ++doc_freq[term];
            }
    }

    SimilarityMatrix m;
    std::vector<DatasetVector> vecs;
    for (const auto& [id, posts] : datasets) {
        m.ids.push_back(id);
        DatasetVector v;
        v.dataset_id = id;
        for (const textprep::TermCounts& tc : posts) {
            if (tc.total == 0) continue;
            for (const auto& [term, count] : tc.counts) {
                const double tf = static_cast<double>(count) / static_cast<double>(tc.total);
                const double idf = std::log(static_cast<double>(doc_count) /
                                            static_cast<double>(doc_freq.at(term)));
                if (tf * idf != 0.0) v.weights[term] += tf * idf;
            }
        }
        // Summation can cancel nothing (weights are nonnegative) but may
        // leave exact zeros from idf; drop them.
        for (auto it = v.weights.begin(); it != v.weights.end();)
            it = it->second == 0.0 ? v.weights.erase(it) : std::next(it);
        if (v.weights.empty()) m.zero_norm_datasets.push_back(id);
        vecs.push_back(std::move(v));
    }

    const std::size_t n = vecs.size();
    m.values.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        m.values[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double c = std::clamp(cosine(vecs[i], vecs[j]), 0.0, 1.0);
            m.values[i][j] = c;
            m.values[j][i] = c;
        }
    }
    return m;
}

SimilarityBand band(double value) {
    if (!(value >= 0.0 && value <= 1.0))
        throw DataError("similarity band: value outside [0,1]: " + util::to_compact(value));
    if (value < 0.45) return SimilarityBand::below_range;
    if (value < 0.60) return SimilarityBand::low;
    if (value < 0.75) return SimilarityBand::medium;
    return SimilarityBand::high;
}

std::string band_name(SimilarityBand b) {
    switch (b) {
        case SimilarityBand::below_range: return "below_range";
        case SimilarityBand::low: return "low";
        case SimilarityBand::medium: return "medium";
        case SimilarityBand::high: return "high";
    }
    return "below_range";
}

TopTerms top_terms(const TfidfModel& model, const std::string& dataset_id, std::size_t k) {
    if (k < 1) throw DataError("top_terms: k must be >= 1");

    const auto ranked = [&](const std::string& id) {
        std::vector<std::pair<std::string, double>> scores;
        for (const auto& [term, count] : model.counts(id).counts) {
            (void)count;
            const double s = model.tfidf(term, id);
            if (s > 0.0) scores.emplace_back(term, s);
        }
        std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        if (scores.size() > k) scores.resize(k);
        return scores;
    };

    const auto own = ranked(dataset_id);

    // Terms appearing in any other dataset's top-k list.
    std::map<std::string, bool> other_top;
    for (const std::string& id : model.ids()) {
        if (id == dataset_id) continue;
        for (const auto& [term, score] : ranked(id)) {
            (void)score;
            other_top[term] = true;
        }
    }

    TopTerms out;
    out.dataset_id = dataset_id;
    out.truncated = own.size() < k;
    for (const auto& [term, score] : own)
        out.terms.push_back({term, score, other_top.count(term) > 0});
    return out;
}

// ---- report emission ------------------------------------------------------

std::string matrix_csv(const SimilarityMatrix& m) {
    std::string out = "dataset";
    for (const std::string& id : m.ids) out += "," + util::csv_escape(id);
    out += '\n';
    for (std::size_t i = 0; i < m.ids.size(); ++i) {
        out += util::csv_escape(m.ids[i]);
        for (std::size_t j = 0; j < m.ids.size(); ++j)
            out += "," + util::to_fixed(m.values[i][j], 6);
        out += '\n';
    }
    return out;
}

std::string matrix_json(const SimilarityMatrix& m) {
    nlohmann::json j;
    j["ids"] = m.ids;
    j["values"] = m.values;
    if (!m.zero_norm_datasets.empty()) j["zero_norm_datasets"] = m.zero_norm_datasets;
    return j.dump(2);
}

std::string band_table_csv(const SimilarityMatrix& m) {
    std::string out = "dataset_a,dataset_b,cosine,band\n";
    for (std::size_t i = 0; i < m.ids.size(); ++i)
        for (std::size_t j = i + 1; j < m.ids.size(); ++j)
            out += util::csv_row({m.ids[i], m.ids[j], util::to_fixed(m.values[i][j], 6),
                                  band_name(band(m.values[i][j]))});
    return out;
}

std::string top_terms_csv(const TopTerms& t) {
    std::string out = "term,score,shared\n";
    for (const TermScore& ts : t.terms)
        out += util::csv_row({ts.term, util::to_fixed(ts.score, 6), ts.shared ? "true" : "false"});
    return out;
}

}  // namespace pvoice::similarity
