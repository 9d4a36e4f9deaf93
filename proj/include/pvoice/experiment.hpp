#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvoice/classifier.hpp"
#include "pvoice/corpus.hpp"
#include "pvoice/evalstat.hpp"
#include "pvoice/similarity.hpp"

namespace pvoice::experiment {

enum class GridMode { per_slice, per_domain, per_source, all, full_cross };

std::string grid_mode_str(GridMode m);
std::optional<GridMode> parse_grid_mode(const std::string& s);

// Corpus directory: one record file per slice named
// <source>_<domain>_<split>.jsonl (source names may not contain underscores),
// plus an optional embeddings.txt for the embed_attn backend.
struct LoadedCorpus {
    std::map<std::string, corpus::CorpusSlice> slices;  // key: SliceKey.str()
    std::vector<corpus::Source> sources;                // distinct, ordered by name
    std::vector<corpus::Domain> domains;
    std::optional<classifier::EmbeddingTable> embeddings;
    std::size_t duplicates_removed_on_load = 0;

    static LoadedCorpus load_dir(const std::filesystem::path& dir);

    bool has(const corpus::Source& s, const corpus::Domain& d, corpus::Split split) const;
    const corpus::CorpusSlice& at(const corpus::Source& s, const corpus::Domain& d,
                                  corpus::Split split) const;
};

// Named aggregation of (source, domain) cells; resolved per split by merging.
struct AggSpec {
    std::string name;
    std::vector<std::pair<corpus::Source, corpus::Domain>> parts;
};

struct ExperimentPlan {
    GridMode mode = GridMode::per_slice;
    std::vector<classifier::Backend> backends;
    std::vector<AggSpec> training_sets;
    std::vector<AggSpec> test_sets;
    // (training_set name, test_set name); a training set may appear in many
    // evaluations but is trained exactly once per backend.
    std::vector<std::pair<std::string, std::string>> evaluations;
    classifier::TrainConfig train_config;
    std::uint64_t seed = 0;
};

// Grid construction per mode:
//   per_slice            one classifier per (source, domain), own test set
//   per_domain           one per domain (sources merged), domain test set
//   per_source           one per source (domains merged), source test set
//   all                  single classifier over everything
//   full_cross           for every slice test set, evaluates the four
//                        relevant classifiers: slice, domain, source, all
// Rejects plans referencing slices missing from the corpus.
ExperimentPlan build_grid(const LoadedCorpus& corpus, GridMode mode,
                          const std::vector<classifier::Backend>& backends,
                          const classifier::TrainConfig& train_config, std::uint64_t seed);

struct CellResult {
    std::string backend;
    std::string training_set;
    std::string test_set;
    std::optional<evalstat::MetricReport> report;
    std::optional<std::string> error;  // structured failure, run continues
};

struct ExperimentResult {
    ExperimentPlan plan;
    std::vector<CellResult> cells;
    // Per test-set McNemar grid over every classifier evaluated on it.
    std::map<std::string, evalstat::McNemarGrid> mcnemar_grids;
    // Similarity analysis over the per-slice training datasets (>= 2 slices).
    std::optional<similarity::SimilarityMatrix> slice_similarity;
    std::vector<similarity::TopTerms> slice_top_terms;  // k = 20
    std::map<std::string, std::string> model_manifest_hashes;  // backend:training_set
    std::string manifest_hash;  // covers plan, data fingerprints, models, metrics
};

ExperimentResult run(const ExperimentPlan& plan, const LoadedCorpus& corpus);

// Writes results/<mode>_seed<seed>/{tables/*.csv, mcnemar/*.csv,
// heatmaps/*.svg, manifest.json} under out_dir and returns the run directory.
std::filesystem::path write_results(const ExperimentResult& result,
                                    const std::filesystem::path& out_dir);

}  // namespace pvoice::experiment
