#include "pvoice/agreement.hpp"

#include <json.hpp>

#include "pvoice/util.hpp"

namespace pvoice::agreement {

using corpus::Label;

AnnotationSet AnnotationSet::from_posts(const std::vector<corpus::Post>& posts) {
    AnnotationSet set;
    for (const corpus::Post& p : posts) {
        if (!p.annotator) throw DataError("annotation set: post id=" + p.id + " has no annotator");
        if (!p.label) throw DataError("annotation set: post id=" + p.id + " has no label");
        auto& by_annotator = set.records[p.id];
        const auto [it, inserted] = by_annotator.emplace(*p.annotator, *p.label);
        if (!inserted && it->second != *p.label)
            throw DataError("annotation set: conflicting labels for post id=" + p.id +
                            " by annotator " + *p.annotator);
    }
    return set;
}

std::vector<std::string> AnnotationSet::annotators() const {
    std::map<std::string, bool> seen;
    for (const auto& [post_id, by_annotator] : records) {
        (void)post_id;
        for (const auto& [annotator, label] : by_annotator) {
            (void)label;
            seen[annotator] = true;
        }
    }
    std::vector<std::string> out;
    for (const auto& [annotator, b] : seen) {
        (void)b;
        out.push_back(annotator);
    }
    return out;
}

double cohen_kappa(const std::vector<Label>& a, const std::vector<Label>& b) {
    if (a.size() != b.size() || a.empty())
        throw DataError("cohen_kappa: sequences must have equal nonzero length");
    const double n = static_cast<double>(a.size());
    std::int64_t agree = 0;
    std::int64_t a_pv = 0, b_pv = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == b[i]) ++agree;
        if (a[i] == Label::patient_voice) ++a_pv;
        if (b[i] == Label::patient_voice) ++b_pv;
    }
    const double p_o = static_cast<double>(agree) / n;
    const double pa = static_cast<double>(a_pv) / n;
    const double pb = static_cast<double>(b_pv) / n;
    const double p_e = pa * pb + (1.0 - pa) * (1.0 - pb);
    if (1.0 - p_e < 1e-12) return p_o > 1.0 - 1e-12 ? 1.0 : 0.0;
    return (p_o - p_e) / (1.0 - p_e);
}

namespace {

OrientedMetrics oriented(const std::vector<Label>& reference, const std::vector<Label>& other) {
    const evalstat::MetricReport r = evalstat::compute_metrics(reference, other);
    return {r.precision_macro,    r.recall_macro,    r.f1_macro,
            r.precision_weighted, r.recall_weighted, r.f1_weighted};
}

}  // namespace

AgreementReport pairwise_agreement(const AnnotationSet& set) {
    const std::vector<std::string> annotators = set.annotators();
    if (annotators.size() < 2)
        throw DataError("pairwise agreement: need at least 2 annotators, got " +
                        std::to_string(annotators.size()));

    AgreementReport out;
    double kappa_sum = 0.0;
    for (std::size_t i = 0; i < annotators.size(); ++i) {
        for (std::size_t j = i + 1; j < annotators.size(); ++j) {
            std::vector<Label> la, lb;
            // records is ordered by post id, so shared labels line up
            // deterministically.
            for (const auto& [post_id, by_annotator] : set.records) {
                (void)post_id;
                const auto ita = by_annotator.find(annotators[i]);
                const auto itb = by_annotator.find(annotators[j]);
                if (ita == by_annotator.end() || itb == by_annotator.end()) continue;
                la.push_back(ita->second);
                lb.push_back(itb->second);
            }
            if (la.empty()) continue;
            PairAgreement pa;
            pa.annotator_a = annotators[i];
            pa.annotator_b = annotators[j];
            pa.n_shared = la.size();
            pa.kappa = cohen_kappa(la, lb);
            pa.a_as_reference = oriented(la, lb);
            pa.b_as_reference = oriented(lb, la);
            kappa_sum += pa.kappa;
            out.pairs.push_back(std::move(pa));
        }
    }
    if (out.pairs.empty())
        throw DataError("pairwise agreement: no annotator pair shares any post");
    out.mean_kappa = kappa_sum / static_cast<double>(out.pairs.size());
    return out;
}

std::string agreement_csv(const AgreementReport& r) {
    std::string out =
        "reference,other,n_shared,precision_macro,recall_macro,f1_macro,"
        "precision_weighted,recall_weighted,f1_weighted,kappa\n";
    const auto f = [](double v) { return util::to_fixed(v, 6); };
    for (const PairAgreement& p : r.pairs) {
        out += util::csv_row({p.annotator_a, p.annotator_b, std::to_string(p.n_shared),
                              f(p.a_as_reference.precision_macro), f(p.a_as_reference.recall_macro),
                              f(p.a_as_reference.f1_macro), f(p.a_as_reference.precision_weighted),
                              f(p.a_as_reference.recall_weighted),
                              f(p.a_as_reference.f1_weighted), f(p.kappa)});
        out += util::csv_row({p.annotator_b, p.annotator_a, std::to_string(p.n_shared),
                              f(p.b_as_reference.precision_macro), f(p.b_as_reference.recall_macro),
                              f(p.b_as_reference.f1_macro), f(p.b_as_reference.precision_weighted),
                              f(p.b_as_reference.recall_weighted),
                              f(p.b_as_reference.f1_weighted), f(p.kappa)});
    }
    return out;
}

std::string agreement_json(const AgreementReport& r) {
    nlohmann::json j;
    j["n_pairs"] = r.pairs.size();
    j["mean_kappa"] = r.mean_kappa;
    return j.dump(2);
}

}  // namespace pvoice::agreement
