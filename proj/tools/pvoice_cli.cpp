// pvoice: corpus analytics and patient-voice classification pipeline.
//
// Subcommands: ingest, split, similarity, iaa, train, evaluate, compare,
// experiment. Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric
// failure. Every mutating command writes a rerun manifest next to (or inside)
// its --out target.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvoice/agreement.hpp"
#include "pvoice/classifier.hpp"
#include "pvoice/corpus.hpp"
#include "pvoice/evalstat.hpp"
#include "pvoice/experiment.hpp"
#include "pvoice/ingest.hpp"
#include "pvoice/similarity.hpp"
#include "pvoice/util.hpp"

namespace {

constexpr const char* kToolVersion = "1.0.0";
constexpr const char* kRecordFormatVersion = "1";
constexpr const char* kModelFormatVersion = "1";

using nlohmann::json;
using namespace pvoice;

std::string iso_utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_fingerprint(const std::filesystem::path& p) {
    return util::hex64(util::fnv1a64(util::read_file(p)));
}

// Rerun manifest: tool version, command snapshot, input fingerprints, seed.
void write_manifest(const std::filesystem::path& target, const std::string& subcommand,
                    const json& args, const std::vector<std::filesystem::path>& inputs,
                    std::optional<std::uint64_t> seed) {
    json m;
    m["tool_version"] = kToolVersion;
    m["record_format_version"] = kRecordFormatVersion;
    m["model_format_version"] = kModelFormatVersion;
    m["subcommand"] = subcommand;
    m["args"] = args;
    json fps;
    for (const auto& p : inputs)
        if (std::filesystem::is_regular_file(p)) fps[p.string()] = file_fingerprint(p);
    m["input_fingerprints"] = fps;
    if (seed) m["seed"] = *seed;
    m["generated_at"] = iso_utc_now();

    const std::filesystem::path manifest_path =
        std::filesystem::is_directory(target) ? target / "manifest.json"
                                              : std::filesystem::path(target.string() + ".manifest.json");
    util::write_file(manifest_path, m.dump(2) + "\n");
}

corpus::CorpusSlice load_slice(const std::filesystem::path& p, corpus::Split split) {
    corpus::SliceKey key;
    key.split = split;
    return corpus::dedup(corpus::load_records_strict(p), key).slice;
}

// ---- ingest -------------------------------------------------------------

struct IngestConfig {
    ingest::SearchConfig search;
    std::optional<std::filesystem::path> pages_dir;
    std::string first_page = "page-000.json";
    std::vector<std::filesystem::path> input_files;
};

IngestConfig load_ingest_config(const std::filesystem::path& p) {
    const json j = json::parse(util::read_file(p), nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw DataError("ingest config is not a JSON object: " + p.string());
    IngestConfig cfg;
    try {
        if (j.contains("source")) {
            const auto s = corpus::Source::parse(j.at("source").get<std::string>());
            if (!s) throw DataError("ingest config: empty source");
            cfg.search.source = *s;
        }
        if (j.contains("domain")) {
            const auto d = corpus::Domain::parse(j.at("domain").get<std::string>());
            if (!d) throw DataError("ingest config: empty domain");
            cfg.search.domain = *d;
        }
        if (j.contains("communities"))
            cfg.search.communities = j.at("communities").get<std::vector<std::string>>();
        if (j.contains("terms")) cfg.search.terms = j.at("terms").get<std::vector<std::string>>();
        if (j.contains("page_size")) cfg.search.page_size = j.at("page_size").get<std::size_t>();
        if (j.contains("max_pages")) cfg.search.max_pages = j.at("max_pages").get<std::size_t>();
        if (j.contains("pages_dir"))
            cfg.pages_dir = std::filesystem::path(j.at("pages_dir").get<std::string>());
        if (j.contains("first_page")) cfg.first_page = j.at("first_page").get<std::string>();
        if (j.contains("input_files"))
            for (const auto& f : j.at("input_files").get<std::vector<std::string>>())
                cfg.input_files.emplace_back(f);
    } catch (const json::exception& e) {
        throw DataError("malformed ingest config " + p.string() + ": " + e.what());
    }
    if (!cfg.pages_dir && cfg.input_files.empty())
        throw DataError("ingest config needs pages_dir and/or input_files");
    // Relative paths resolve against the config file location.
    const std::filesystem::path base = p.parent_path();
    if (cfg.pages_dir && cfg.pages_dir->is_relative()) cfg.pages_dir = base / *cfg.pages_dir;
    for (auto& f : cfg.input_files)
        if (f.is_relative()) f = base / f;
    return cfg;
}

int cmd_ingest(const std::filesystem::path& config_path, const std::filesystem::path& out) {
    const IngestConfig cfg = load_ingest_config(config_path);

    std::vector<corpus::Post> posts;
    std::size_t parse_errors = 0;
    std::size_t fetch_retries = 0;
    std::size_t removed = 0;

    for (const auto& f : cfg.input_files) {
        corpus::ParseResult r = corpus::parse_records_file(f);
        for (const corpus::ParseError& e : r.errors)
            std::cerr << f.string() << ":" << e.line_no << ": " << e.message << "\n";
        parse_errors += r.errors.size();
        for (auto& p : r.posts) posts.push_back(std::move(p));
    }
    if (cfg.pages_dir) {
        ingest::DirectoryPageClient client(*cfg.pages_dir, cfg.first_page);
        ingest::FetchResult r = ingest::fetch_all(cfg.search, client);
        parse_errors += r.stats.skipped_records;
        fetch_retries = r.stats.retries;
        removed += r.stats.removed_duplicates;
        for (auto& p : r.posts) posts.push_back(std::move(p));
    }

    const corpus::DedupResult deduped = corpus::dedup(std::move(posts));
    removed += deduped.removed;
    corpus::write_records_file(out, deduped.slice.posts);
    write_manifest(out, "ingest", {{"config", config_path.string()}, {"out", out.string()}},
                   {config_path}, std::nullopt);

    std::cout << "posts: " << deduped.slice.size() << "\n";
    std::cout << "removed duplicates: " << removed << "\n";
    if (parse_errors) std::cout << "malformed records skipped: " << parse_errors << "\n";
    if (fetch_retries) std::cout << "transport retries: " << fetch_retries << "\n";
    return 0;
}

// ---- split ---------------------------------------------------------------

int cmd_split(const std::filesystem::path& in, std::uint64_t seed, const std::string& ratios,
              const std::filesystem::path& out_dir) {
    corpus::SplitSpec spec;
    spec.seed = seed;
    {
        const auto fields = util::csv_parse_line(ratios);
        if (fields.size() != 3) throw DataError("--ratios wants three comma-separated fractions");
        try {
            spec.train_ratio = std::stod(fields[0]);
            spec.validation_ratio = std::stod(fields[1]);
            spec.test_ratio = std::stod(fields[2]);
        } catch (const std::exception&) {
            throw DataError("--ratios wants three comma-separated fractions");
        }
    }

    const corpus::CorpusSlice slice = load_slice(in, corpus::Split::unsplit);
    const corpus::SplitResult r = corpus::stratified_split(slice, spec);
    corpus::assert_no_leakage(r.train, r.validation, r.test);

    std::filesystem::create_directories(out_dir);
    corpus::write_records_file(out_dir / "train.jsonl", r.train.posts);
    corpus::write_records_file(out_dir / "validation.jsonl", r.validation.posts);
    corpus::write_records_file(out_dir / "test.jsonl", r.test.posts);
    write_manifest(out_dir, "split",
                   {{"in", in.string()},
                    {"seed", seed},
                    {"ratios", ratios},
                    {"out_dir", out_dir.string()},
                    {"split_policy", "single three-way stratified split, remainder to train"}},
                   {in}, seed);

    std::cout << "train: " << r.train.size() << "\n";
    std::cout << "validation: " << r.validation.size() << "\n";
    std::cout << "test: " << r.test.size() << "\n";
    return 0;
}

// ---- similarity -----------------------------------------------------------

int cmd_similarity(const std::filesystem::path& in_dir, const std::filesystem::path& out,
                   bool per_post, std::size_t top_k) {
    if (!std::filesystem::is_directory(in_dir))
        throw DataError("similarity: not a directory: " + in_dir.string());

    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(in_dir))
        if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.size() < 2)
        throw DataError("similarity: need at least 2 .jsonl datasets in " + in_dir.string());

    std::vector<std::pair<std::string, textprep::TermCounts>> datasets;
    std::vector<std::pair<std::string, std::vector<textprep::TermCounts>>> per_post_sets;
    for (const auto& f : files) {
        const std::vector<corpus::Post> posts = corpus::load_records_strict(f);
        textprep::TermCounts combined;
        std::vector<textprep::TermCounts> separate;
        for (const corpus::Post& p : posts) {
            const auto tokens = textprep::tokenize(p.text);
            separate.push_back(textprep::count_terms(tokens));
            for (const std::string& t : tokens) {
                ++combined.counts[t];
                ++combined.total;
            }
        }
        datasets.emplace_back(f.stem().string(), std::move(combined));
        per_post_sets.emplace_back(f.stem().string(), std::move(separate));
    }

    const similarity::TfidfModel model = similarity::TfidfModel::build(std::move(datasets));
    const similarity::SimilarityMatrix matrix =
        per_post ? similarity::per_post_similarity_matrix(per_post_sets)
                 : similarity::similarity_matrix(model);

    util::write_file(out, similarity::matrix_csv(matrix));
    const std::string stem = (out.parent_path() / out.stem()).string();
    util::write_file(stem + ".json", similarity::matrix_json(matrix));
    util::write_file(stem + "_bands.csv", similarity::band_table_csv(matrix));
    for (const std::string& id : model.ids()) {
        const similarity::TopTerms t = similarity::top_terms(model, id, top_k);
        util::write_file(stem + "_terms_" + id + ".csv", similarity::top_terms_csv(t));
        if (t.truncated)
            std::cerr << "note: dataset " << id << " has fewer than " << top_k
                      << " nonzero terms\n";
    }
    for (const std::string& id : matrix.zero_norm_datasets)
        std::cerr << "warning: dataset " << id
                  << " has a zero tf-idf vector; its similarities default to 0\n";

    const std::vector<std::filesystem::path> inputs(files.begin(), files.end());
    write_manifest(out, "similarity",
                   {{"in_dir", in_dir.string()},
                    {"out", out.string()},
                    {"per_post", per_post},
                    {"top_k", top_k},
                    {"idf_log_base", "e"}},
                   inputs, std::nullopt);
    std::cout << "datasets: " << model.ids().size() << "\n";
    return 0;
}

// ---- iaa --------------------------------------------------------------------

int cmd_iaa(const std::filesystem::path& in, const std::filesystem::path& out) {
    const std::vector<corpus::Post> posts = corpus::load_records_strict(in);
    const agreement::AnnotationSet set = agreement::AnnotationSet::from_posts(posts);
    const agreement::AgreementReport report = agreement::pairwise_agreement(set);
    util::write_file(out, agreement::agreement_csv(report));
    write_manifest(out, "iaa", {{"in", in.string()}, {"out", out.string()}}, {in}, std::nullopt);
    std::cout << agreement::agreement_json(report) << "\n";
    return 0;
}

// ---- train -------------------------------------------------------------------

struct TrainFlags {
    std::string backend = "bow_linear";
    std::filesystem::path train, val, model_out, embeddings;
    classifier::TrainConfig config;
};

int cmd_train(const TrainFlags& f) {
    const auto backend = classifier::parse_backend(f.backend);
    if (!backend) throw DataError("unknown backend: " + f.backend);

    const corpus::CorpusSlice train_slice = load_slice(f.train, corpus::Split::train);
    const corpus::CorpusSlice val_slice = load_slice(f.val, corpus::Split::validation);

    std::optional<classifier::EmbeddingTable> table;
    if (!f.embeddings.empty()) table = classifier::EmbeddingTable::load(f.embeddings);
    if (*backend == classifier::Backend::embed_attn && !table)
        throw DataError("embed_attn backend requires --embeddings");

    const classifier::TrainedClassifier model =
        classifier::train(*backend, train_slice, val_slice, f.config, table ? &*table : nullptr);
    model.save(f.model_out);

    std::vector<std::filesystem::path> inputs = {f.train, f.val};
    if (!f.embeddings.empty()) inputs.push_back(f.embeddings);
    write_manifest(f.model_out, "train",
                   {{"backend", f.backend},
                    {"train", f.train.string()},
                    {"val", f.val.string()},
                    {"model_out", f.model_out.string()},
                    {"embeddings", f.embeddings.string()},
                    {"learning_rate", f.config.learning_rate},
                    {"epochs_max", f.config.epochs_max},
                    {"patience", f.config.patience},
                    {"batch_size", f.config.batch_size},
                    {"class_weighting", f.config.class_weighting}},
                   inputs, f.config.seed);

    const auto& curve = model.manifest.validation_f1_curve;
    std::cout << "epochs trained: " << curve.size() << "\n";
    std::cout << "best epoch: " << model.manifest.best_epoch << "\n";
    if (model.manifest.best_epoch >= 0)
        std::cout << "best validation macro F1: "
                  << util::to_fixed(curve[static_cast<std::size_t>(model.manifest.best_epoch)], 4)
                  << "\n";
    std::cout << "manifest hash: " << model.manifest.hash() << "\n";
    if (model.manifest.degenerate)
        std::cerr << "warning: single-class training slice; model predicts the majority class\n";
    return 0;
}

// ---- evaluate ------------------------------------------------------------------

int cmd_evaluate(const std::filesystem::path& model_path, const std::filesystem::path& test_path,
                 const std::filesystem::path& out, const std::filesystem::path& preds_out) {
    const classifier::TrainedClassifier model = classifier::TrainedClassifier::load(model_path);
    const corpus::CorpusSlice test = load_slice(test_path, corpus::Split::test);
    const evalstat::Evaluation ev = evalstat::evaluate(model, test);

    util::write_file(out, evalstat::metrics_csv(ev.report));
    util::write_file(out.parent_path() / (out.stem().string() + ".json"),
                     evalstat::metrics_json(ev.report) + "\n");
    if (!preds_out.empty()) util::write_file(preds_out, evalstat::predictions_csv(ev.predictions));
    write_manifest(out, "evaluate",
                   {{"model", model_path.string()},
                    {"test", test_path.string()},
                    {"out", out.string()},
                    {"preds_out", preds_out.string()}},
                   {model_path, test_path}, std::nullopt);

    for (const std::string& w : ev.report.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "confusion tp=" << ev.table.tp << " fp=" << ev.table.fp << " fn=" << ev.table.fn
              << " tn=" << ev.table.tn << "\n";
    std::cout << "macro F1: " << util::to_fixed(ev.report.f1_macro, 4) << "\n";
    std::cout << "weighted F1: " << util::to_fixed(ev.report.f1_weighted, 4) << "\n";
    return 0;
}

// ---- compare --------------------------------------------------------------------

std::map<std::string, corpus::Label> load_predictions_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open predictions file: " + p.string());
    std::map<std::string, corpus::Label> out;
    std::string line;
    bool header = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        const auto fields = util::csv_parse_line(line);
        if (fields.size() < 3)
            throw DataError(p.string() + ":" + std::to_string(line_no) +
                            ": expected post_id,gold,predicted columns");
        const auto label = corpus::parse_label(fields[2]);
        if (!label)
            throw DataError(p.string() + ":" + std::to_string(line_no) + ": unknown label " +
                            fields[2]);
        if (!out.emplace(fields[0], *label).second)
            throw DataError(p.string() + ":" + std::to_string(line_no) + ": duplicate post id " +
                            fields[0]);
    }
    if (out.empty()) throw DataError("no predictions in " + p.string());
    return out;
}

int cmd_compare(const std::vector<std::filesystem::path>& preds,
                const std::filesystem::path& gold_path) {
    const auto preds_a = load_predictions_csv(preds[0]);
    const auto preds_b = load_predictions_csv(preds[1]);
    const corpus::CorpusSlice gold = load_slice(gold_path, corpus::Split::test);

    std::vector<corpus::Label> a, b, g;
    for (const corpus::Post& p : gold.posts) {
        if (!p.label) throw DataError("compare: unlabeled gold post id=" + p.id);
        const auto ia = preds_a.find(p.id);
        const auto ib = preds_b.find(p.id);
        if (ia == preds_a.end())
            throw DataError("compare: post " + p.id + " missing from " + preds[0].string());
        if (ib == preds_b.end())
            throw DataError("compare: post " + p.id + " missing from " + preds[1].string());
        a.push_back(ia->second);
        b.push_back(ib->second);
        g.push_back(*p.label);
    }

    const evalstat::McNemarResult r = evalstat::mcnemar(a, b, g);
    json j;
    j["b"] = r.b;
    j["c"] = r.c;
    j["method"] = evalstat::mcnemar_method_str(r.method);
    if (r.statistic) j["statistic"] = *r.statistic;
    j["p_value"] = r.p_value;
    j["significant_at_0.05"] = r.p_value <= 0.05;
    std::cout << j.dump(2) << "\n";
    return 0;
}

// ---- experiment ------------------------------------------------------------------

int cmd_experiment(const std::string& mode_str, const std::filesystem::path& corpus_dir,
                   const std::filesystem::path& out_dir, const std::string& backends_str,
                   std::uint64_t seed, const classifier::TrainConfig& config) {
    const auto mode = experiment::parse_grid_mode(mode_str);
    if (!mode) throw DataError("unknown experiment mode: " + mode_str);

    std::vector<classifier::Backend> backends;
    for (const std::string& b : util::csv_parse_line(backends_str)) {
        const auto parsed = classifier::parse_backend(b);
        if (!parsed) throw DataError("unknown backend: " + b);
        backends.push_back(*parsed);
    }

    const experiment::LoadedCorpus corpus = experiment::LoadedCorpus::load_dir(corpus_dir);
    const experiment::ExperimentPlan plan =
        experiment::build_grid(corpus, *mode, backends, config, seed);
    const experiment::ExperimentResult result = experiment::run(plan, corpus);
    const std::filesystem::path run_dir = experiment::write_results(result, out_dir);
    write_manifest(run_dir, "experiment",
                   {{"mode", mode_str},
                    {"corpus", corpus_dir.string()},
                    {"out", out_dir.string()},
                    {"backends", backends_str}},
                   {}, seed);

    std::size_t failed = 0;
    for (const auto& c : result.cells)
        if (c.error) ++failed;
    std::cout << "run dir: " << run_dir.string() << "\n";
    std::cout << "metric cells: " << result.cells.size() - failed << "\n";
    if (failed) std::cout << "failed cells: " << failed << "\n";
    std::cout << "mcnemar grids: " << result.mcnemar_grids.size() << "\n";
    std::cout << "manifest hash: " << result.manifest_hash << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"patient-voice corpus analytics and classification toolkit"};
    app.set_version_flag("--version", std::string("pvoice ") + kToolVersion + " (record format v" +
                                          kRecordFormatVersion + ", model format v" +
                                          kModelFormatVersion + ")");
    app.require_subcommand(1);

    // ingest
    std::filesystem::path ingest_config, ingest_out;
    auto* ingest_cmd = app.add_subcommand("ingest", "fetch/parse raw posts, dedup, write records");
    ingest_cmd->add_option("--config", ingest_config, "ingest config JSON")->required();
    ingest_cmd->add_option("--out", ingest_out, "output record file")->required();

    // split
    std::filesystem::path split_in, split_out_dir;
    std::uint64_t split_seed = 0;
    std::string split_ratios = "0.66,0.17,0.17";
    auto* split_cmd = app.add_subcommand("split", "stratified train/validation/test split");
    split_cmd->add_option("--in", split_in, "input record file")->required();
    split_cmd->add_option("--seed", split_seed, "shuffle seed")->required();
    split_cmd->add_option("--ratios", split_ratios, "train,validation,test fractions");
    split_cmd->add_option("--out-dir", split_out_dir, "output directory")->required();

    // similarity
    std::filesystem::path sim_in_dir, sim_out;
    bool sim_per_post = false;
    std::size_t sim_top_k = 20;
    auto* sim_cmd = app.add_subcommand("similarity", "tf-idf cosine similarity analysis");
    sim_cmd->add_option("--in-dir", sim_in_dir, "directory of .jsonl datasets")->required();
    sim_cmd->add_option("--out", sim_out, "matrix CSV path")->required();
    sim_cmd->add_flag("--per-post", sim_per_post, "treat posts as documents (sensitivity mode)");
    sim_cmd->add_option("--top-k", sim_top_k, "ranked terms per dataset (default 20)");

    // iaa
    std::filesystem::path iaa_in, iaa_out;
    auto* iaa_cmd = app.add_subcommand("iaa", "pairwise inter-annotator agreement");
    iaa_cmd->add_option("--in", iaa_in, "annotated record file")->required();
    iaa_cmd->add_option("--out", iaa_out, "pairwise agreement CSV")->required();

    // train
    TrainFlags tf;
    bool no_class_weighting = false;
    auto* train_cmd = app.add_subcommand("train", "train a classifier");
    train_cmd->add_option("--backend", tf.backend, "bow_linear|embed_attn");
    train_cmd->add_option("--train", tf.train, "training record file")->required();
    train_cmd->add_option("--val", tf.val, "validation record file")->required();
    train_cmd->add_option("--model-out", tf.model_out, "model output path")->required();
    train_cmd->add_option("--embeddings", tf.embeddings, "embedding table (embed_attn)");
    train_cmd->add_option("--seed", tf.config.seed, "training seed");
    train_cmd->add_option("--learning-rate", tf.config.learning_rate,
                          "0 = backend default (0.1 bow, 0.05 embed)");
    train_cmd->add_option("--epochs-max", tf.config.epochs_max, "max epochs (default 50)");
    train_cmd->add_option("--patience", tf.config.patience, "early-stop patience (default 5)");
    train_cmd->add_option("--batch-size", tf.config.batch_size, "minibatch size (default 32)");
    train_cmd->add_flag("--no-class-weighting", no_class_weighting,
                        "disable inverse-frequency class weights");

    // evaluate
    std::filesystem::path eval_model, eval_test, eval_out, eval_preds_out;
    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a model on a test slice");
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--test", eval_test, "test record file")->required();
    eval_cmd->add_option("--out", eval_out, "metrics CSV")->required();
    eval_cmd->add_option("--preds-out", eval_preds_out, "per-post predictions CSV");

    // compare
    std::vector<std::filesystem::path> cmp_preds;
    std::filesystem::path cmp_gold;
    auto* cmp_cmd = app.add_subcommand("compare", "McNemar test between two prediction files");
    cmp_cmd->add_option("--preds", cmp_preds, "two prediction CSVs")->expected(2)->required();
    cmp_cmd->add_option("--gold", cmp_gold, "gold record file")->required();

    // experiment
    std::string exp_mode, exp_backends = "bow_linear,embed_attn";
    std::filesystem::path exp_corpus, exp_out;
    std::uint64_t exp_seed = 0;
    classifier::TrainConfig exp_config;
    auto* exp_cmd = app.add_subcommand("experiment", "run a training/evaluation grid");
    exp_cmd->add_option("--mode", exp_mode, "per_slice|per_domain|per_source|all|full_cross")
        ->required();
    exp_cmd->add_option("--corpus", exp_corpus, "corpus directory")->required();
    exp_cmd->add_option("--out", exp_out, "results directory")->required();
    exp_cmd->add_option("--backends", exp_backends, "comma-separated backend list");
    exp_cmd->add_option("--seed", exp_seed, "experiment seed");
    exp_cmd->add_option("--epochs-max", exp_config.epochs_max, "max epochs per training");
    exp_cmd->add_option("--patience", exp_config.patience, "early-stop patience");
    exp_cmd->add_option("--batch-size", exp_config.batch_size, "minibatch size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // --help and --version land here with code 0; real usage errors map to 1.
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*ingest_cmd) return cmd_ingest(ingest_config, ingest_out);
        if (*split_cmd) return cmd_split(split_in, split_seed, split_ratios, split_out_dir);
        if (*sim_cmd) return cmd_similarity(sim_in_dir, sim_out, sim_per_post, sim_top_k);
        if (*iaa_cmd) return cmd_iaa(iaa_in, iaa_out);
        if (*train_cmd) {
            tf.config.class_weighting = !no_class_weighting;
            return cmd_train(tf);
        }
        if (*eval_cmd) return cmd_evaluate(eval_model, eval_test, eval_out, eval_preds_out);
        if (*cmp_cmd) return cmd_compare(cmp_preds, cmp_gold);
        if (*exp_cmd)
            return cmd_experiment(exp_mode, exp_corpus, exp_out, exp_backends, exp_seed,
                                  exp_config);
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const ingest::TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
