#include "pvoice/evalstat.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "pvoice/util.hpp"

namespace pvoice::evalstat {

using corpus::Label;

ConfusionTable confusion(const std::vector<Label>& gold, const std::vector<Label>& pred) {
    if (gold.size() != pred.size())
        throw DataError("confusion: gold/prediction length mismatch (" +
                        std::to_string(gold.size()) + " vs " + std::to_string(pred.size()) + ")");
    ConfusionTable t;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool g = gold[i] == Label::patient_voice;
        const bool p = pred[i] == Label::patient_voice;
        if (g && p)
            ++t.tp;
        else if (!g && p)
            ++t.fp;
        else if (g && !p)
            ++t.fn;
        else
            ++t.tn;
    }
    return t;
}

namespace {

double ratio_or_zero(std::int64_t num, std::int64_t den, const char* what, const char* label,
                     std::vector<std::string>& warnings) {
    if (den == 0) {
        warnings.push_back(std::string(what) + " undefined for " + label +
                           " (zero denominator), reported as 0");
        return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

double f1_of(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

}  // namespace

MetricReport metrics_from_confusion(const ConfusionTable& t) {
    MetricReport r;
    r.patient_voice.support = t.tp + t.fn;
    r.not_relevant.support = t.fp + t.tn;

    r.patient_voice.precision =
        ratio_or_zero(t.tp, t.tp + t.fp, "precision", "patient_voice", r.warnings);
    r.patient_voice.recall =
        ratio_or_zero(t.tp, t.tp + t.fn, "recall", "patient_voice", r.warnings);
    r.patient_voice.f1 = f1_of(r.patient_voice.precision, r.patient_voice.recall);

    r.not_relevant.precision =
        ratio_or_zero(t.tn, t.tn + t.fn, "precision", "not_relevant", r.warnings);
    r.not_relevant.recall =
        ratio_or_zero(t.tn, t.tn + t.fp, "recall", "not_relevant", r.warnings);
    r.not_relevant.f1 = f1_of(r.not_relevant.precision, r.not_relevant.recall);

    r.precision_macro = (r.patient_voice.precision + r.not_relevant.precision) / 2.0;
    r.recall_macro = (r.patient_voice.recall + r.not_relevant.recall) / 2.0;
    r.f1_macro = (r.patient_voice.f1 + r.not_relevant.f1) / 2.0;

    const double total =
        static_cast<double>(r.patient_voice.support + r.not_relevant.support);
    if (total > 0.0) {
        const double wp = static_cast<double>(r.patient_voice.support) / total;
        const double wn = static_cast<double>(r.not_relevant.support) / total;
        r.precision_weighted = wp * r.patient_voice.precision + wn * r.not_relevant.precision;
        r.recall_weighted = wp * r.patient_voice.recall + wn * r.not_relevant.recall;
        r.f1_weighted = wp * r.patient_voice.f1 + wn * r.not_relevant.f1;
    }
    return r;
}

MetricReport compute_metrics(const std::vector<Label>& gold, const std::vector<Label>& pred) {
    return metrics_from_confusion(confusion(gold, pred));
}

Evaluation evaluate(const classifier::TrainedClassifier& model, const corpus::CorpusSlice& test) {
    if (test.empty()) throw DataError("evaluate: empty test slice " + test.key.str());
    Evaluation out;
    std::vector<Label> gold;
    std::vector<Label> pred;
    gold.reserve(test.size());
    pred.reserve(test.size());
    for (const corpus::Post& p : test.posts) {
        if (!p.label) throw DataError("evaluate: unlabeled post id=" + p.id);
        const auto o = classifier::predict(model, p);
        gold.push_back(*p.label);
        pred.push_back(o.label);
        out.predictions.push_back({p.id, *p.label, o.label, o.score, o.degenerate});
    }
    out.table = confusion(gold, pred);
    out.report = metrics_from_confusion(out.table);
    return out;
}

// ---- McNemar ----------------------------------------------------------------

std::string mcnemar_method_str(McNemarMethod m) {
    return m == McNemarMethod::exact_binomial ? "exact_binomial" : "chi2_continuity";
}

double chi2_survival_1df(double x) {
    if (x < 0.0) throw NumericError("chi2_survival_1df: negative statistic");
    return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar_from_counts(std::int64_t b, std::int64_t c) {
    if (b < 0 || c < 0) throw DataError("mcnemar: negative discordant counts");
    McNemarResult r;
    r.b = b;
    r.c = c;
    const std::int64_t n = b + c;
    if (n <= 25) {
        r.method = McNemarMethod::exact_binomial;
        // Two-sided exact binomial: 2 * sum_{k=0}^{min(b,c)} C(n,k) / 2^n.
        const std::int64_t m = std::min(b, c);
        double pmf = std::pow(0.5, static_cast<double>(n));  // C(n,0)/2^n
        double tail = 0.0;
        for (std::int64_t k = 0; k <= m; ++k) {
            tail += pmf;
            pmf *= static_cast<double>(n - k) / static_cast<double>(k + 1);
        }
        r.p_value = std::min(1.0, 2.0 * tail);
    } else {
        r.method = McNemarMethod::chi2_continuity;
        // Continuity correction clamped at zero so p stays monotone in |b-c|.
        const double d = std::max(std::abs(static_cast<double>(b - c)) - 1.0, 0.0);
        const double stat = d * d / static_cast<double>(n);
        r.statistic = stat;
        r.p_value = chi2_survival_1df(stat);
    }
    return r;
}

McNemarResult mcnemar(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b) {
    if (correct_a.size() != correct_b.size() || correct_a.empty())
        throw DataError("mcnemar: prediction vectors must have equal nonzero length");
    std::int64_t b = 0, c = 0;
    for (std::size_t i = 0; i < correct_a.size(); ++i) {
        if (correct_a[i] && !correct_b[i]) ++b;
        if (!correct_a[i] && correct_b[i]) ++c;
    }
    return mcnemar_from_counts(b, c);
}

McNemarResult mcnemar(const std::vector<Label>& preds_a, const std::vector<Label>& preds_b,
                      const std::vector<Label>& gold) {
    if (preds_a.size() != gold.size() || preds_b.size() != gold.size() || gold.empty())
        throw DataError("mcnemar: prediction/gold length mismatch");
    std::vector<bool> ca(gold.size()), cb(gold.size());
    for (std::size_t i = 0; i < gold.size(); ++i) {
        ca[i] = preds_a[i] == gold[i];
        cb[i] = preds_b[i] == gold[i];
    }
    return mcnemar(ca, cb);
}

McNemarGrid mcnemar_grid(const std::vector<std::pair<std::string, std::vector<Label>>>& preds,
                         const std::vector<Label>& gold) {
    if (preds.size() < 2)
        throw DataError("mcnemar_grid: need at least 2 classifiers, got " +
                        std::to_string(preds.size()));
    McNemarGrid g;
    const std::size_t m = preds.size();
    for (const auto& [name, p] : preds) {
        (void)p;
        g.names.push_back(name);
    }
    g.p_values.assign(m, std::vector<double>(m, 1.0));
    g.methods.assign(m, std::vector<McNemarMethod>(m, McNemarMethod::exact_binomial));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const McNemarResult r = mcnemar(preds[i].second, preds[j].second, gold);
            g.p_values[i][j] = g.p_values[j][i] = r.p_value;
            g.methods[i][j] = g.methods[j][i] = r.method;
        }
    }
    return g;
}

// ---- report emission --------------------------------------------------------

std::string metrics_csv_header() {
    return "backend,training_set,test_set,"
           "precision_pv,recall_pv,f1_pv,support_pv,"
           "precision_nr,recall_nr,f1_nr,support_nr,"
           "precision_macro,recall_macro,f1_macro,"
           "precision_weighted,recall_weighted,f1_weighted\n";
}

std::string metrics_csv_row(const std::string& backend, const std::string& training_set,
                            const std::string& test_set, const MetricReport& r) {
    const auto f = [](double v) { return util::to_fixed(v, 6); };
    return util::csv_row({backend, training_set, test_set, f(r.patient_voice.precision),
                          f(r.patient_voice.recall), f(r.patient_voice.f1),
                          std::to_string(r.patient_voice.support), f(r.not_relevant.precision),
                          f(r.not_relevant.recall), f(r.not_relevant.f1),
                          std::to_string(r.not_relevant.support), f(r.precision_macro),
                          f(r.recall_macro), f(r.f1_macro), f(r.precision_weighted),
                          f(r.recall_weighted), f(r.f1_weighted)});
}

std::string metrics_csv(const MetricReport& r) {
    const auto f = [](double v) { return util::to_fixed(v, 6); };
    std::string out = "label,precision,recall,f1,support\n";
    out += util::csv_row({"patient_voice", f(r.patient_voice.precision),
                          f(r.patient_voice.recall), f(r.patient_voice.f1),
                          std::to_string(r.patient_voice.support)});
    out += util::csv_row({"not_relevant", f(r.not_relevant.precision), f(r.not_relevant.recall),
                          f(r.not_relevant.f1), std::to_string(r.not_relevant.support)});
    out += util::csv_row({"macro", f(r.precision_macro), f(r.recall_macro), f(r.f1_macro),
                          std::to_string(r.patient_voice.support + r.not_relevant.support)});
    out += util::csv_row({"weighted", f(r.precision_weighted), f(r.recall_weighted),
                          f(r.f1_weighted),
                          std::to_string(r.patient_voice.support + r.not_relevant.support)});
    return out;
}

std::string metrics_json(const MetricReport& r) {
    nlohmann::json j;
    const auto label_json = [](const LabelMetrics& m) {
        return nlohmann::json{{"precision", m.precision},
                              {"recall", m.recall},
                              {"f1", m.f1},
                              {"support", m.support}};
    };
    j["patient_voice"] = label_json(r.patient_voice);
    j["not_relevant"] = label_json(r.not_relevant);
    j["macro"] = {{"precision", r.precision_macro},
                  {"recall", r.recall_macro},
                  {"f1", r.f1_macro}};
    j["weighted"] = {{"precision", r.precision_weighted},
                     {"recall", r.recall_weighted},
                     {"f1", r.f1_weighted}};
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    return j.dump(2);
}

std::string predictions_csv(const std::vector<Prediction>& preds) {
    std::string out = "post_id,gold,predicted,score,degenerate\n";
    for (const Prediction& p : preds)
        out += util::csv_row({p.post_id, corpus::label_str(p.gold), corpus::label_str(p.predicted),
                              util::to_fixed(p.score, 6), p.degenerate ? "true" : "false"});
    return out;
}

std::string grid_csv(const McNemarGrid& g) {
    std::string out = "classifier";
    for (const std::string& n : g.names) out += "," + util::csv_escape(n);
    out += '\n';
    for (std::size_t i = 0; i < g.names.size(); ++i) {
        out += util::csv_escape(g.names[i]);
        for (std::size_t j = 0; j < g.names.size(); ++j)
            out += "," + util::to_fixed(g.p_values[i][j], 6);
        out += '\n';
    }
    return out;
}

std::string grid_svg(const McNemarGrid& g, const std::string& title) {
    const std::size_t n = g.names.size();
    const int cell = 56, left = 150, top = 60;
    const int width = left + cell * static_cast<int>(n) + 20;
    const int height = top + cell * static_cast<int>(n) + 20;

    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(width) + "\" height=\"" + std::to_string(height) + "\">\n";
    svg += "<text x=\"10\" y=\"20\" font-size=\"14\" font-family=\"sans-serif\">" + title +
           "</text>\n";
    for (std::size_t i = 0; i < n; ++i) {
        svg += "<text x=\"" + std::to_string(left - 6) + "\" y=\"" +
               std::to_string(top + cell * static_cast<int>(i) + cell / 2 + 4) +
               "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">" + g.names[i] +
               "</text>\n";
        svg += "<text x=\"" + std::to_string(left + cell * static_cast<int>(i) + cell / 2) +
               "\" y=\"" + std::to_string(top - 8) +
               "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
               g.names[i] + "</text>\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double p = g.p_values[i][j];
            // Dark blue (p=0) to yellow (p=1).
            const int rch = static_cast<int>(40 + 215 * p);
            const int gch = static_cast<int>(40 + 195 * p);
            const int bch = static_cast<int>(120 - 90 * p);
            const int x = left + cell * static_cast<int>(j);
            const int y = top + cell * static_cast<int>(i);
            svg += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(y) +
                   "\" width=\"" + std::to_string(cell) + "\" height=\"" + std::to_string(cell) +
                   "\" fill=\"rgb(" + std::to_string(rch) + "," + std::to_string(gch) + "," +
                   std::to_string(bch) + ")\"";
            if (i != j && !g.significant(i, j))
                svg += " stroke=\"red\" stroke-width=\"2\"";  // not significant at 0.05
            svg += "/>\n";
            svg += "<text x=\"" + std::to_string(x + cell / 2) + "\" y=\"" +
                   std::to_string(y + cell / 2 + 4) +
                   "\" font-size=\"9\" font-family=\"sans-serif\" text-anchor=\"middle\">" +
                   util::to_fixed(p, 3) + "</text>\n";
        }
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace pvoice::evalstat
