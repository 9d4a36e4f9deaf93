// pvoice_synth: writes the bundled synthetic corpora used by the demos and
// the acceptance suite. Deterministic per seed.

#include <iostream>

#include <CLI11.hpp>

#include "pvoice/corpus.hpp"
#include "pvoice/synth.hpp"
#include "pvoice/util.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic corpus generator"};
    std::filesystem::path out;
    std::string kind = "grid";
    std::uint64_t seed = 42;
    app.add_option("--out", out, "output directory")->required();
    app.add_option("--kind", kind, "grid|separable|aggregation");
    app.add_option("--seed", seed, "generator seed");
    CLI11_PARSE(app, argc, argv);

    using namespace pvoice;
    try {
        std::filesystem::create_directories(out);
        if (kind == "grid") {
            const synth::GridCorpus corpus = synth::table_grid_corpus(seed);
            synth::write_corpus_dir(corpus, out, seed + 1);
            std::size_t total = 0;
            for (const auto& [name, slice] : corpus.slices) total += slice.size();
            std::cout << "slices: " << corpus.slices.size() << "\n";
            std::cout << "posts: " << total << "\n";
        } else if (kind == "separable") {
            const synth::SliceBundle b = synth::separable_corpus(seed);
            const std::string prefix = "synthetic_separable_";
            corpus::write_records_file(out / (prefix + "train.jsonl"), b.train.posts);
            corpus::write_records_file(out / (prefix + "validation.jsonl"), b.validation.posts);
            corpus::write_records_file(out / (prefix + "test.jsonl"), b.test.posts);
            std::cout << "train: " << b.train.size() << " validation: " << b.validation.size()
                      << " test: " << b.test.size() << "\n";
        } else if (kind == "aggregation") {
            const synth::AggregationCorpus c = synth::aggregation_corpus(seed);
            for (const auto* bundle : {&c.a, &c.b, &c.c}) {
                for (const auto* slice :
                     {&bundle->train, &bundle->validation, &bundle->test})
                    corpus::write_records_file(out / (slice->key.str() + ".jsonl"), slice->posts);
            }
            std::cout << "slices: 9\n";
        } else {
            std::cerr << "unknown kind: " << kind << "\n";
            return 1;
        }
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
