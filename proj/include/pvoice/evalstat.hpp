#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvoice/classifier.hpp"
#include "pvoice/corpus.hpp"

namespace pvoice::evalstat {

// patient_voice is the positive class throughout.
struct ConfusionTable {
    std::int64_t tp = 0;
    std::int64_t fp = 0;
    std::int64_t fn = 0;
    std::int64_t tn = 0;

    std::int64_t total() const { return tp + fp + fn + tn; }
};

ConfusionTable confusion(const std::vector<corpus::Label>& gold,
                         const std::vector<corpus::Label>& pred);

struct LabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

struct MetricReport {
    LabelMetrics patient_voice;
    LabelMetrics not_relevant;
    double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
    double precision_weighted = 0.0, recall_weighted = 0.0, f1_weighted = 0.0;
    std::vector<std::string> warnings;  // zero-denominator conventions applied
};

// Zero-denominator precision/recall resolve to 0 with a warning.
MetricReport metrics_from_confusion(const ConfusionTable& t);
MetricReport compute_metrics(const std::vector<corpus::Label>& gold,
                             const std::vector<corpus::Label>& pred);

struct Prediction {
    std::string post_id;
    corpus::Label gold = corpus::Label::not_relevant;
    corpus::Label predicted = corpus::Label::not_relevant;
    double score = 0.0;
    bool degenerate = false;
};

struct Evaluation {
    MetricReport report;
    ConfusionTable table;
    std::vector<Prediction> predictions;  // retained for McNemar comparisons
};

// Rejects an empty or not fully labeled test slice.
Evaluation evaluate(const classifier::TrainedClassifier& model, const corpus::CorpusSlice& test);

// ---- McNemar ---------------------------------------------------------------

enum class McNemarMethod { exact_binomial, chi2_continuity };

std::string mcnemar_method_str(McNemarMethod m);

struct McNemarResult {
    std::int64_t b = 0;  // A correct, B wrong
    std::int64_t c = 0;  // A wrong, B correct
    McNemarMethod method = McNemarMethod::exact_binomial;
    std::optional<double> statistic;  // chi2 branch only
    double p_value = 1.0;
};

// Exact two-sided binomial when b+c <= 25, otherwise chi-square with
// continuity correction: (|b-c|-1)^2/(b+c) against chi2(1).
McNemarResult mcnemar_from_counts(std::int64_t b, std::int64_t c);
McNemarResult mcnemar(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b);
McNemarResult mcnemar(const std::vector<corpus::Label>& preds_a,
                      const std::vector<corpus::Label>& preds_b,
                      const std::vector<corpus::Label>& gold);

// Survival function of chi-square with 1 dof via the erfc identity.
double chi2_survival_1df(double x);

struct McNemarGrid {
    std::vector<std::string> names;
    std::vector<std::vector<double>> p_values;  // symmetric, diagonal 1.0 by convention
    std::vector<std::vector<McNemarMethod>> methods;

    bool significant(std::size_t i, std::size_t j) const { return p_values[i][j] <= 0.05; }
};

// One named prediction vector per classifier, all over the same gold vector.
McNemarGrid mcnemar_grid(const std::vector<std::pair<std::string, std::vector<corpus::Label>>>& preds,
                         const std::vector<corpus::Label>& gold);

// ---- report emission -------------------------------------------------------

std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& backend, const std::string& training_set,
                            const std::string& test_set, const MetricReport& r);
std::string metrics_csv(const MetricReport& r);  // standalone per-label table
std::string metrics_json(const MetricReport& r);
std::string predictions_csv(const std::vector<Prediction>& preds);
std::string grid_csv(const McNemarGrid& g);  // square p-value matrix
// Simple heatmap rendering; cells with p > 0.05 are outlined.
std::string grid_svg(const McNemarGrid& g, const std::string& title);

}  // namespace pvoice::evalstat
