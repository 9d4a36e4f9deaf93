#include "pvoice/experiment.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <ctime>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "pvoice/textprep.hpp"
#include "pvoice/util.hpp"

namespace pvoice::experiment {

using classifier::Backend;
using corpus::CorpusSlice;
using corpus::Domain;
using corpus::SliceKey;
using corpus::Source;
using corpus::Split;
using nlohmann::json;

std::string grid_mode_str(GridMode m) {
    switch (m) {
        case GridMode::per_slice: return "per_slice";
        case GridMode::per_domain: return "per_domain";
        case GridMode::per_source: return "per_source";
        case GridMode::all: return "all";
        case GridMode::full_cross: return "full_cross";
    }
    return "per_slice";
}

std::optional<GridMode> parse_grid_mode(const std::string& s) {
    if (s == "per_slice") return GridMode::per_slice;
    if (s == "per_domain") return GridMode::per_domain;
    if (s == "per_source") return GridMode::per_source;
    if (s == "all") return GridMode::all;
    if (s == "full_cross") return GridMode::full_cross;
    return std::nullopt;
}

// ---- corpus loading ---------------------------------------------------------

LoadedCorpus LoadedCorpus::load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw DataError("corpus directory not found: " + dir.string());

    LoadedCorpus c;
    std::set<std::string> source_names, domain_names;

    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const std::filesystem::path& f : files) {
        const std::string stem = f.stem().string();
        const auto first = stem.find('_');
        const auto last = stem.rfind('_');
        if (first == std::string::npos || last == first)
            throw DataError("corpus file name not <source>_<domain>_<split>.jsonl: " + f.string());
        const auto source = Source::parse(stem.substr(0, first));
        const auto domain = Domain::parse(stem.substr(first + 1, last - first - 1));
        const auto split = corpus::parse_split(stem.substr(last + 1));
        if (!source || !domain || !split)
            throw DataError("corpus file name not <source>_<domain>_<split>.jsonl: " + f.string());

        const SliceKey key{*source, *domain, *split};
        corpus::DedupResult dr = corpus::dedup(corpus::load_records_strict(f), key);
        c.duplicates_removed_on_load += dr.removed;
        c.slices.emplace(key.str(), std::move(dr.slice));
        source_names.insert(source->str());
        domain_names.insert(domain->str());
    }
    if (c.slices.empty()) throw DataError("no .jsonl slice files in " + dir.string());

    for (const std::string& s : source_names) c.sources.push_back(*Source::parse(s));
    for (const std::string& d : domain_names) c.domains.push_back(*Domain::parse(d));

    const std::filesystem::path emb = dir / "embeddings.txt";
    if (std::filesystem::exists(emb)) c.embeddings = classifier::EmbeddingTable::load(emb);
    return c;
}

bool LoadedCorpus::has(const Source& s, const Domain& d, Split split) const {
    return slices.count(SliceKey{s, d, split}.str()) > 0;
}

const CorpusSlice& LoadedCorpus::at(const Source& s, const Domain& d, Split split) const {
    const std::string key = SliceKey{s, d, split}.str();
    const auto it = slices.find(key);
    if (it == slices.end()) throw DataError("missing slice in corpus: " + key);
    return it->second;
}

// ---- plan construction --------------------------------------------------------

namespace {

std::string slice_name(const Source& s, const Domain& d) { return s.str() + "_" + d.str(); }

void require_parts(const LoadedCorpus& corpus, const AggSpec& agg,
                   const std::vector<Split>& splits) {
    for (const auto& [s, d] : agg.parts)
        for (const Split split : splits)
            if (!corpus.has(s, d, split))
                throw DataError("missing slice in corpus: " + SliceKey{s, d, split}.str() +
                                " (needed by " + agg.name + ")");
}

}  // namespace

ExperimentPlan build_grid(const LoadedCorpus& corpus, GridMode mode,
                          const std::vector<Backend>& backends,
                          const classifier::TrainConfig& train_config, std::uint64_t seed) {
    if (backends.empty()) throw DataError("experiment: no backends selected");
    ExperimentPlan plan;
    plan.mode = mode;
    plan.backends = backends;
    plan.train_config = train_config;
    plan.seed = seed;

    const auto slice_aggs = [&] {
        std::vector<AggSpec> out;
        for (const Source& s : corpus.sources)
            for (const Domain& d : corpus.domains) out.push_back({slice_name(s, d), {{s, d}}});
        return out;
    }();
    const auto domain_aggs = [&] {
        std::vector<AggSpec> out;
        for (const Domain& d : corpus.domains) {
            AggSpec a{d.str(), {}};
            for (const Source& s : corpus.sources) a.parts.emplace_back(s, d);
            out.push_back(std::move(a));
        }
        return out;
    }();
    const auto source_aggs = [&] {
        std::vector<AggSpec> out;
        for (const Source& s : corpus.sources) {
            AggSpec a{s.str() + "_coin", {}};
            for (const Domain& d : corpus.domains) a.parts.emplace_back(s, d);
            out.push_back(std::move(a));
        }
        return out;
    }();
    const AggSpec all_agg = [&] {
        AggSpec a{"all", {}};
        for (const Source& s : corpus.sources)
            for (const Domain& d : corpus.domains) a.parts.emplace_back(s, d);
        return a;
    }();

    switch (mode) {
        case GridMode::per_slice:
            plan.training_sets = slice_aggs;
            plan.test_sets = slice_aggs;
            for (const AggSpec& a : slice_aggs) plan.evaluations.emplace_back(a.name, a.name);
            break;
        case GridMode::per_domain:
            plan.training_sets = domain_aggs;
            plan.test_sets = domain_aggs;
            for (const AggSpec& a : domain_aggs) plan.evaluations.emplace_back(a.name, a.name);
            break;
        case GridMode::per_source:
            plan.training_sets = source_aggs;
            plan.test_sets = source_aggs;
            for (const AggSpec& a : source_aggs) plan.evaluations.emplace_back(a.name, a.name);
            break;
        case GridMode::all:
            plan.training_sets = {all_agg};
            plan.test_sets = {all_agg};
            plan.evaluations.emplace_back("all", "all");
            break;
        case GridMode::full_cross:
            plan.training_sets = slice_aggs;
            plan.training_sets.insert(plan.training_sets.end(), domain_aggs.begin(),
                                      domain_aggs.end());
            plan.training_sets.insert(plan.training_sets.end(), source_aggs.begin(),
                                      source_aggs.end());
            plan.training_sets.push_back(all_agg);
            plan.test_sets = slice_aggs;
            for (const Source& s : corpus.sources) {
                for (const Domain& d : corpus.domains) {
                    const std::string test = slice_name(s, d);
                    plan.evaluations.emplace_back(test, test);
                    plan.evaluations.emplace_back(d.str(), test);
                    plan.evaluations.emplace_back(s.str() + "_coin", test);
                    plan.evaluations.emplace_back("all", test);
                }
            }
            break;
    }

    for (const AggSpec& a : plan.training_sets)
        require_parts(corpus, a, {Split::train, Split::validation});
    for (const AggSpec& a : plan.test_sets) require_parts(corpus, a, {Split::test});
    return plan;
}

// ---- plan execution -------------------------------------------------------------

namespace {

CorpusSlice resolve(const LoadedCorpus& corpus, const AggSpec& agg, Split split) {
    std::vector<CorpusSlice> parts;
    for (const auto& [s, d] : agg.parts) parts.push_back(corpus.at(s, d, split));
    SliceKey key;
    key.split = split;
    if (!agg.parts.empty()) {
        key.source = agg.parts.front().first;
        key.domain = agg.parts.front().second;
        for (const auto& [s, d] : agg.parts) {
            if (key.source && !(*key.source == s)) key.source.reset();
            if (key.domain && !(*key.domain == d)) key.domain.reset();
        }
    }
    return corpus::merge(parts, key);
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& backend,
                          const std::string& training_set) {
    std::uint64_t h = util::fnv1a64(util::hex64(base));
    h = util::fnv1a64(backend, h);
    h = util::fnv1a64(training_set, h);
    return h;
}

void hash_double_bits(util::Fingerprint& fp, double v) {
    fp.add(util::hex64(std::bit_cast<std::uint64_t>(v)));
}

}  // namespace

ExperimentResult run(const ExperimentPlan& plan, const LoadedCorpus& corpus) {
    ExperimentResult result;
    result.plan = plan;

    const bool needs_embeddings =
        std::find(plan.backends.begin(), plan.backends.end(), Backend::embed_attn) !=
        plan.backends.end();
    if (needs_embeddings && !corpus.embeddings)
        throw DataError("experiment: embed_attn backend selected but corpus has no embeddings.txt");

    // Validate and resolve everything before any training starts.
    std::map<std::string, CorpusSlice> train_slices, val_slices, test_slices;
    for (const AggSpec& a : plan.training_sets) {
        train_slices.emplace(a.name, resolve(corpus, a, Split::train));
        val_slices.emplace(a.name, resolve(corpus, a, Split::validation));
    }
    for (const AggSpec& a : plan.test_sets)
        test_slices.emplace(a.name, resolve(corpus, a, Split::test));

    // Leakage guard across every planned evaluation pair.
    std::map<std::string, std::unordered_set<std::string>> train_ids;
    for (const auto& [name, slice] : train_slices) {
        auto& ids = train_ids[name];
        for (const corpus::Post& p : slice.posts) ids.insert(p.id);
    }
    for (const auto& [training, test] : plan.evaluations) {
        const auto& ids = train_ids.at(training);
        for (const corpus::Post& p : test_slices.at(test).posts)
            if (ids.count(p.id))
                throw DataError("experiment: test post " + p.id + " of " + test +
                                " leaks into training set " + training);
    }

    // Train each (backend, training_set) exactly once.
    std::map<std::string, classifier::TrainedClassifier> models;
    std::map<std::string, std::string> train_errors;
    for (const Backend backend : plan.backends) {
        for (const AggSpec& a : plan.training_sets) {
            const std::string key = classifier::backend_str(backend) + ":" + a.name;
            classifier::TrainConfig cfg = plan.train_config;
            cfg.seed = derive_seed(plan.seed, classifier::backend_str(backend), a.name);
            try {
                models.emplace(key, classifier::train(
                                        backend, train_slices.at(a.name), val_slices.at(a.name),
                                        cfg, corpus.embeddings ? &*corpus.embeddings : nullptr));
                result.model_manifest_hashes[key] = models.at(key).manifest.hash();
            } catch (const std::exception& e) {
                train_errors.emplace(key, e.what());
            }
        }
    }

    // Evaluate; keep per-test predictions for the McNemar grids.
    std::map<std::string, std::vector<std::pair<std::string, std::vector<corpus::Label>>>>
        grid_preds;
    for (const Backend backend : plan.backends) {
        const std::string bname = classifier::backend_str(backend);
        for (const auto& [training, test] : plan.evaluations) {
            const std::string key = bname + ":" + training;
            CellResult cell;
            cell.backend = bname;
            cell.training_set = training;
            cell.test_set = test;
            if (const auto it = train_errors.find(key); it != train_errors.end()) {
                cell.error = "training failed: " + it->second;
                result.cells.push_back(std::move(cell));
                continue;
            }
            try {
                const evalstat::Evaluation ev =
                    evalstat::evaluate(models.at(key), test_slices.at(test));
                cell.report = ev.report;
                std::vector<corpus::Label> preds;
                preds.reserve(ev.predictions.size());
                for (const evalstat::Prediction& p : ev.predictions) preds.push_back(p.predicted);
                grid_preds[test].emplace_back(key, std::move(preds));
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
            result.cells.push_back(std::move(cell));
        }
    }

    for (const auto& [test, preds] : grid_preds) {
        if (preds.size() < 2) continue;
        std::vector<corpus::Label> gold;
        for (const corpus::Post& p : test_slices.at(test).posts) gold.push_back(*p.label);
        result.mcnemar_grids.emplace(test, evalstat::mcnemar_grid(preds, gold));
    }

    // Similarity analysis over the per-slice training data (Fig. 3/Table 2
    // analogs) whenever at least two base slices exist.
    {
        std::vector<std::pair<std::string, textprep::TermCounts>> datasets;
        for (const Source& s : corpus.sources) {
            for (const Domain& d : corpus.domains) {
                if (!corpus.has(s, d, Split::train)) continue;
                textprep::TermCounts tc;
                for (const corpus::Post& p : corpus.at(s, d, Split::train).posts) {
                    for (std::string& t : textprep::tokenize(p.text)) {
                        ++tc.counts[std::move(t)];
                        ++tc.total;
                    }
                }
                datasets.emplace_back(slice_name(s, d), std::move(tc));
            }
        }
        if (datasets.size() >= 2) {
            const auto model = similarity::TfidfModel::build(std::move(datasets));
            result.slice_similarity = similarity::similarity_matrix(model);
            for (const std::string& id : model.ids())
                result.slice_top_terms.push_back(similarity::top_terms(model, id, 20));
        }
    }

    // Deterministic run hash: plan, data, models, metrics. No wall-clock.
    util::Fingerprint fp;
    fp.add(grid_mode_str(plan.mode));
    fp.add(util::hex64(plan.seed));
    for (const Backend b : plan.backends) fp.add(classifier::backend_str(b));
    for (const auto& [name, slice] : train_slices) {
        fp.add("train:" + name);
        fp.add(slice.fingerprint());
    }
    for (const auto& [name, slice] : val_slices) {
        fp.add("val:" + name);
        fp.add(slice.fingerprint());
    }
    for (const auto& [name, slice] : test_slices) {
        fp.add("test:" + name);
        fp.add(slice.fingerprint());
    }
    for (const auto& [key, hash] : result.model_manifest_hashes) {
        fp.add(key);
        fp.add(hash);
    }
    for (const CellResult& c : result.cells) {
        fp.add(c.backend + ":" + c.training_set + "@" + c.test_set);
        if (c.report) {
            hash_double_bits(fp, c.report->f1_macro);
            hash_double_bits(fp, c.report->f1_weighted);
            hash_double_bits(fp, c.report->patient_voice.f1);
            hash_double_bits(fp, c.report->not_relevant.f1);
        } else {
            fp.add("error:" + *c.error);
        }
    }
    for (const auto& [test, grid] : result.mcnemar_grids) {
        fp.add("grid:" + test);
        for (const auto& row : grid.p_values)
            for (const double p : row) hash_double_bits(fp, p);
    }
    if (result.slice_similarity)
        for (const auto& row : result.slice_similarity->values)
            for (const double v : row) hash_double_bits(fp, v);
    result.manifest_hash = fp.str();
    return result;
}

// ---- result emission --------------------------------------------------------------

namespace {

std::string iso_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::filesystem::path write_results(const ExperimentResult& result,
                                    const std::filesystem::path& out_dir) {
    const ExperimentPlan& plan = result.plan;
    const std::filesystem::path run_dir =
        out_dir / (grid_mode_str(plan.mode) + "_seed" + std::to_string(plan.seed));
    std::filesystem::create_directories(run_dir / "tables");
    std::filesystem::create_directories(run_dir / "mcnemar");
    std::filesystem::create_directories(run_dir / "heatmaps");

    std::string metrics = evalstat::metrics_csv_header();
    for (const CellResult& c : result.cells)
        if (c.report)
            metrics += evalstat::metrics_csv_row(c.backend, c.training_set, c.test_set, *c.report);
    util::write_file(run_dir / "tables" / "metrics.csv", metrics);

    if (result.slice_similarity) {
        util::write_file(run_dir / "tables" / "similarity.csv",
                         similarity::matrix_csv(*result.slice_similarity));
        util::write_file(run_dir / "tables" / "similarity_bands.csv",
                         similarity::band_table_csv(*result.slice_similarity));
    }
    for (const similarity::TopTerms& t : result.slice_top_terms)
        util::write_file(run_dir / "tables" / ("terms_" + t.dataset_id + ".csv"),
                         similarity::top_terms_csv(t));

    for (const auto& [test, grid] : result.mcnemar_grids) {
        util::write_file(run_dir / "mcnemar" / (test + ".csv"), evalstat::grid_csv(grid));
        util::write_file(run_dir / "heatmaps" / (test + ".svg"),
                         evalstat::grid_svg(grid, "McNemar p-values: " + test));
    }

    json manifest;
    manifest["generated_at"] = iso_utc_now();  // informational; not part of the hash
    manifest["mode"] = grid_mode_str(plan.mode);
    manifest["seed"] = plan.seed;
    {
        std::vector<std::string> b;
        for (const Backend backend : plan.backends) b.push_back(classifier::backend_str(backend));
        manifest["backends"] = b;
    }
    manifest["train_config"] = {{"learning_rate", plan.train_config.learning_rate},
                                {"epochs_max", plan.train_config.epochs_max},
                                {"patience", plan.train_config.patience},
                                {"batch_size", plan.train_config.batch_size},
                                {"class_weighting", plan.train_config.class_weighting}};
    {
        json sets = json::array();
        for (const AggSpec& a : plan.training_sets) {
            json parts = json::array();
            for (const auto& [s, d] : a.parts) parts.push_back(s.str() + "_" + d.str());
            sets.push_back({{"name", a.name}, {"parts", parts}});
        }
        manifest["training_sets"] = sets;
    }
    {
        json evals = json::array();
        for (const auto& [training, test] : plan.evaluations)
            evals.push_back({{"training_set", training}, {"test_set", test}});
        manifest["evaluations"] = evals;
    }
    manifest["model_manifest_hashes"] = result.model_manifest_hashes;
    {
        json errors = json::array();
        for (const CellResult& c : result.cells)
            if (c.error)
                errors.push_back({{"backend", c.backend},
                                  {"training_set", c.training_set},
                                  {"test_set", c.test_set},
                                  {"error", *c.error}});
        manifest["cell_errors"] = errors;
    }
    {
        // McNemar variant used per grid cell.
        json grids;
        for (const auto& [test, grid] : result.mcnemar_grids) {
            json methods = json::array();
            for (std::size_t i = 0; i < grid.names.size(); ++i)
                for (std::size_t j = i + 1; j < grid.names.size(); ++j)
                    methods.push_back({{"a", grid.names[i]},
                                       {"b", grid.names[j]},
                                       {"p", grid.p_values[i][j]},
                                       {"method", evalstat::mcnemar_method_str(grid.methods[i][j])},
                                       {"significant", grid.significant(i, j)}});
            grids[test] = methods;
        }
        manifest["mcnemar"] = grids;
    }
    manifest["manifest_hash"] = result.manifest_hash;
    util::write_file(run_dir / "manifest.json", manifest.dump(2) + "\n");
    return run_dir;
}

}  // namespace pvoice::experiment
