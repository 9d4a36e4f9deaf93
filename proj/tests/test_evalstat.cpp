#include <doctest.h>

#include <cmath>

#include "pvoice/evalstat.hpp"
#include "pvoice/util.hpp"

using namespace pvoice;
using namespace pvoice::evalstat;
using corpus::Label;

namespace {

// Direct enumeration of the two-sided exact binomial p-value.
double oracle_exact_p(std::int64_t b, std::int64_t c) {
    const std::int64_t n = b + c;
    const auto binom = [](std::int64_t nn, std::int64_t kk) {
        double r = 1.0;
        for (std::int64_t i = 1; i <= kk; ++i)
            r = r * static_cast<double>(nn - kk + i) / static_cast<double>(i);
        return r;
    };
    double tail = 0.0;
    for (std::int64_t k = 0; k <= std::min(b, c); ++k)
        tail += binom(n, k) * std::pow(0.5, static_cast<double>(n));
    return std::min(1.0, 2.0 * tail);
}

// Adaptive Simpson integration of the chi-square(1) density on [x, hi].
double chi2_pdf_1df(double t) {
    return std::exp(-t / 2.0) / (std::sqrt(2.0 * M_PI) * std::sqrt(t));
}

double simpson(double a, double b, int n) {
    const double h = (b - a) / n;
    double s = chi2_pdf_1df(a) + chi2_pdf_1df(b);
    for (int i = 1; i < n; ++i) s += chi2_pdf_1df(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double oracle_chi2_sf(double x) {
    // Integrate to a far tail; the remainder beyond 200 is < 1e-40.
    return simpson(x, x + 200.0, 400000);
}

}  // namespace

TEST_CASE("confusion and metrics on a perfect predictor") {
    const std::vector<Label> gold = {Label::patient_voice, Label::not_relevant,
                                     Label::patient_voice};
    const auto r = compute_metrics(gold, gold);
    CHECK(r.patient_voice.precision == 1.0);
    CHECK(r.patient_voice.recall == 1.0);
    CHECK(r.patient_voice.f1 == 1.0);
    CHECK(r.not_relevant.f1 == 1.0);
    CHECK(r.f1_macro == 1.0);
    CHECK(r.f1_weighted == 1.0);
    CHECK(r.warnings.empty());
}

TEST_CASE("metrics match hand arithmetic for tp=8 fp=2 fn=4") {
    ConfusionTable t;
    t.tp = 8;
    t.fp = 2;
    t.fn = 4;
    t.tn = 6;
    const auto r = metrics_from_confusion(t);
    CHECK(r.patient_voice.precision == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.patient_voice.recall == doctest::Approx(8.0 / 12.0).epsilon(1e-12));
    CHECK(r.patient_voice.f1 == doctest::Approx(0.72727).epsilon(1e-4));
    CHECK(r.patient_voice.support == 12);
    CHECK(r.not_relevant.support == 8);
}

TEST_CASE("zero-denominator precision resolves to 0 with a warning") {
    // No predicted positives while positives exist.
    const std::vector<Label> gold = {Label::patient_voice, Label::not_relevant};
    const std::vector<Label> pred = {Label::not_relevant, Label::not_relevant};
    const auto r = compute_metrics(gold, pred);
    CHECK(r.patient_voice.precision == 0.0);
    CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("macro and weighted averages match their definitions on random tables") {
    util::Rng rng(555);
    for (int trial = 0; trial < 200; ++trial) {
        ConfusionTable t;
        t.tp = static_cast<std::int64_t>(rng.below(50));
        t.fp = static_cast<std::int64_t>(rng.below(50));
        t.fn = static_cast<std::int64_t>(rng.below(50));
        t.tn = static_cast<std::int64_t>(rng.below(50));
        if (t.total() == 0) continue;
        const auto r = metrics_from_confusion(t);

        CHECK(r.f1_macro ==
              doctest::Approx((r.patient_voice.f1 + r.not_relevant.f1) / 2.0).epsilon(1e-12));
        const double total = static_cast<double>(t.total());
        const double expected_weighted =
            (static_cast<double>(r.patient_voice.support) * r.patient_voice.f1 +
             static_cast<double>(r.not_relevant.support) * r.not_relevant.f1) /
            total;
        CHECK(r.f1_weighted == doctest::Approx(expected_weighted).epsilon(1e-12));
        for (const double v :
             {r.patient_voice.precision, r.patient_voice.recall, r.patient_voice.f1, r.f1_macro,
              r.f1_weighted, r.precision_macro, r.recall_macro}) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }
}

TEST_CASE("mcnemar with no discordance gives p = 1") {
    const auto r = mcnemar_from_counts(0, 0);
    CHECK(r.p_value == 1.0);
    CHECK(r.method == McNemarMethod::exact_binomial);
}

TEST_CASE("mcnemar exact branch matches the hand enumeration b=10 c=2") {
    const auto r = mcnemar_from_counts(10, 2);
    CHECK(r.method == McNemarMethod::exact_binomial);
    CHECK_FALSE(r.statistic.has_value());
    CHECK(r.p_value == doctest::Approx(158.0 / 4096.0).epsilon(1e-12));
}

TEST_CASE("mcnemar chi2 branch matches b=40 c=20") {
    const auto r = mcnemar_from_counts(40, 20);
    CHECK(r.method == McNemarMethod::chi2_continuity);
    REQUIRE(r.statistic.has_value());
    CHECK(*r.statistic == doctest::Approx(361.0 / 60.0).epsilon(1e-12));
    CHECK(r.p_value == doctest::Approx(0.0142).epsilon(2e-3));
    CHECK(r.p_value == doctest::Approx(oracle_chi2_sf(*r.statistic)).epsilon(1e-6));
}

TEST_CASE("mcnemar exact branch equals binomial enumeration for all b,c <= 10") {
    for (std::int64_t b = 0; b <= 10; ++b)
        for (std::int64_t c = 0; c <= 10; ++c) {
            const auto r = mcnemar_from_counts(b, c);
            REQUIRE(r.method == McNemarMethod::exact_binomial);
            CHECK(std::abs(r.p_value - oracle_exact_p(b, c)) <= 1e-12);
        }
}

TEST_CASE("mcnemar switches branch at b+c = 25") {
    CHECK(mcnemar_from_counts(13, 12).method == McNemarMethod::exact_binomial);
    CHECK(mcnemar_from_counts(13, 13).method == McNemarMethod::chi2_continuity);
}

TEST_CASE("mcnemar is symmetric in its arguments") {
    util::Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const auto b = static_cast<std::int64_t>(rng.below(60));
        const auto c = static_cast<std::int64_t>(rng.below(60));
        const auto rbc = mcnemar_from_counts(b, c);
        const auto rcb = mcnemar_from_counts(c, b);
        CHECK(std::abs(rbc.p_value - rcb.p_value) <= 1e-12);
        CHECK(rbc.b == rcb.c);
        CHECK(rbc.c == rcb.b);
    }
}

TEST_CASE("mcnemar p is non-increasing in |b - c| on each branch") {
    // Exact branch: fix c = 2, grow b while staying exact.
    double prev = 2.0;
    for (std::int64_t b = 2; b + 2 <= 25; ++b) {
        const double p = mcnemar_from_counts(b, 2).p_value;
        CHECK(p <= prev + 1e-12);
        prev = p;
    }
    // Chi2 branch: fix c = 20.
    prev = 2.0;
    for (std::int64_t b = 20; b <= 80; ++b) {
        const double p = mcnemar_from_counts(b, 20).p_value;
        CHECK(p <= prev + 1e-12);
        prev = p;
    }
}

TEST_CASE("mcnemar from label vectors counts discordant pairs") {
    const std::vector<Label> gold(6, Label::patient_voice);
    const std::vector<Label> a = {Label::patient_voice, Label::patient_voice,
                                  Label::patient_voice, Label::not_relevant,
                                  Label::patient_voice, Label::not_relevant};
    const std::vector<Label> b = {Label::patient_voice, Label::not_relevant,
                                  Label::not_relevant,  Label::not_relevant,
                                  Label::patient_voice, Label::patient_voice};
    const auto r = mcnemar(a, b, gold);
    CHECK(r.b == 2);  // a correct, b wrong
    CHECK(r.c == 1);  // a wrong, b correct
    CHECK_THROWS_AS(mcnemar(a, b, std::vector<Label>(5, Label::patient_voice)), DataError);
    CHECK_THROWS_AS(mcnemar({}, {}, {}), DataError);
}

TEST_CASE("chi2 survival function is accurate against numeric integration") {
    for (const double x : {0.5, 1.0, 2.0, 3.84, 6.0167, 10.0, 20.0}) {
        CHECK(chi2_survival_1df(x) == doctest::Approx(oracle_chi2_sf(x)).epsilon(1e-9));
    }
    CHECK(chi2_survival_1df(0.0) == 1.0);
    CHECK_THROWS_AS(chi2_survival_1df(-1.0), NumericError);
}

TEST_CASE("mcnemar grid over identical classifiers is all ones") {
    const std::vector<Label> gold(20, Label::patient_voice);
    std::vector<Label> preds(20, Label::patient_voice);
    preds[3] = Label::not_relevant;
    const auto grid = mcnemar_grid({{"m1", preds}, {"m2", preds}}, gold);
    CHECK(grid.p_values[0][1] == 1.0);
    CHECK(grid.p_values[0][0] == 1.0);  // diagonal convention
}

TEST_CASE("mcnemar grid over 4 classifiers has 6 informative symmetric cells") {
    util::Rng rng(12);
    std::vector<Label> gold;
    for (int i = 0; i < 60; ++i)
        gold.push_back(rng.uniform() < 0.5 ? Label::patient_voice : Label::not_relevant);
    std::vector<std::pair<std::string, std::vector<Label>>> preds;
    for (int m = 0; m < 4; ++m) {
        std::vector<Label> p;
        for (int i = 0; i < 60; ++i)
            p.push_back(rng.uniform() < 0.3 + 0.1 * m ? gold[static_cast<std::size_t>(i)]
                                                      : Label::not_relevant);
        preds.emplace_back("m" + std::to_string(m), std::move(p));
    }
    const auto grid = mcnemar_grid(preds, gold);
    REQUIRE(grid.names.size() == 4);
    std::size_t informative = 0;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            ++informative;
            CHECK(grid.p_values[i][j] == grid.p_values[j][i]);
        }
    CHECK(informative == 6);
    CHECK_THROWS_AS(mcnemar_grid({{"only", gold}}, gold), DataError);
}

TEST_CASE("grid csv and svg render") {
    const std::vector<Label> gold(30, Label::patient_voice);
    std::vector<Label> a(30, Label::patient_voice);
    std::vector<Label> b(30, Label::not_relevant);
    const auto grid = mcnemar_grid({{"good", a}, {"bad", b}}, gold);
    const std::string csv = grid_csv(grid);
    CHECK(csv.find("classifier,good,bad") == 0);
    const std::string svg = grid_svg(grid, "test grid");
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
}
