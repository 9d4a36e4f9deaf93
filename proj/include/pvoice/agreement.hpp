#pragma once

#include <map>
#include <string>
#include <vector>

#include "pvoice/corpus.hpp"
#include "pvoice/evalstat.hpp"

namespace pvoice::agreement {

// Multiply-annotated posts: post_id -> annotator_id -> label.
struct AnnotationSet {
    std::map<std::string, std::map<std::string, corpus::Label>> records;

    // Requires label and annotator on every post; conflicting duplicate
    // (post, annotator) rows are rejected.
    static AnnotationSet from_posts(const std::vector<corpus::Post>& posts);
    std::vector<std::string> annotators() const;
};

// (p_o - p_e) / (1 - p_e). When p_e is 1 (both raters constant on the same
// label) returns 1.0 for full agreement, 0.0 otherwise.
double cohen_kappa(const std::vector<corpus::Label>& a, const std::vector<corpus::Label>& b);

struct OrientedMetrics {
    double precision_macro = 0.0, recall_macro = 0.0, f1_macro = 0.0;
    double precision_weighted = 0.0, recall_weighted = 0.0, f1_weighted = 0.0;
};

// One entry per unordered annotator pair; P/R/F1 need a reference side, so
// both orientations are kept. Kappa is orientation-free.
struct PairAgreement {
    std::string annotator_a;
    std::string annotator_b;
    std::size_t n_shared = 0;
    double kappa = 0.0;
    OrientedMetrics a_as_reference;
    OrientedMetrics b_as_reference;
};

struct AgreementReport {
    std::vector<PairAgreement> pairs;
    double mean_kappa = 0.0;
};

// Rejects sets where no two annotators share a post.
AgreementReport pairwise_agreement(const AnnotationSet& set);

// Two rows per pair (one per orientation).
std::string agreement_csv(const AgreementReport& r);
std::string agreement_json(const AgreementReport& r);

}  // namespace pvoice::agreement
