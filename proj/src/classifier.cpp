#include "pvoice/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pvoice/evalstat.hpp"
#include "pvoice/util.hpp"

namespace pvoice::classifier {

using corpus::Label;
using nlohmann::json;

std::string backend_str(Backend b) {
    return b == Backend::bow_linear ? "bow_linear" : "embed_attn";
}

std::optional<Backend> parse_backend(const std::string& s) {
    if (s == "bow_linear") return Backend::bow_linear;
    if (s == "embed_attn") return Backend::embed_attn;
    return std::nullopt;
}

namespace {

double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double softplus(double z) {
    return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

void hash_double(util::Fingerprint& fp, double v) {
    fp.add(util::hex64(std::bit_cast<std::uint64_t>(v)));
}

}  // namespace

// ---- features ---------------------------------------------------------------

FeatureSpace FeatureSpace::build(const corpus::CorpusSlice& train, std::size_t min_doc_freq) {
    FeatureSpace space;
    space.min_doc_freq = min_doc_freq;
    space.train_fingerprint = train.fingerprint();

    std::map<std::string, std::size_t> df;
    for (const corpus::Post& p : train.posts) {
        std::set<std::string> uniq;
        for (std::string& t : textprep::tokenize(p.text)) uniq.insert(std::move(t));
        for (const std::string& t : uniq) ++df[t];
    }

    const double n = static_cast<double>(train.size());
    for (const auto& [term, count] : df) {
        if (count < min_doc_freq) continue;
        const std::size_t idx = space.vocabulary.size();
        space.vocabulary.emplace(term, idx);
        space.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    return space;
}

SparseVec featurize(const corpus::Post& post, const FeatureSpace& space) {
    SparseVec v;
    const textprep::TermCounts tc = textprep::count_terms(textprep::tokenize(post.text));
    double norm_sq = 0.0;
    for (const auto& [term, count] : tc.counts) {
        const auto it = space.vocabulary.find(term);
        if (it == space.vocabulary.end()) continue;
        const double w = static_cast<double>(count) * space.idf[it->second];
        v.items.emplace_back(it->second, w);
        norm_sq += w * w;
    }
    if (v.items.empty()) {
        v.empty_doc = true;
        return v;
    }
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [idx, w] : v.items) w *= inv;
    std::sort(v.items.begin(), v.items.end());
    return v;
}

// ---- embeddings --------------------------------------------------------------

EmbeddingTable EmbeddingTable::parse(std::istream& in) {
    EmbeddingTable t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string token;
        ls >> token;
        if (token.empty()) continue;
        std::vector<double> vec;
        double x;
        while (ls >> x) vec.push_back(x);
        if (vec.empty())
            throw DataError("embedding file line " + std::to_string(line_no) + ": no values");
        if (t.dim == 0) t.dim = vec.size();
        if (vec.size() != t.dim)
            throw DataError("embedding file line " + std::to_string(line_no) + ": expected " +
                            std::to_string(t.dim) + " values, got " + std::to_string(vec.size()));
        if (!t.index.emplace(token, t.tokens.size()).second)
            throw DataError("embedding file line " + std::to_string(line_no) +
                            ": duplicate token " + token);
        t.tokens.push_back(std::move(token));
        t.vectors.push_back(std::move(vec));
    }
    if (t.tokens.empty()) throw DataError("embedding file has no entries");
    return t;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw DataError("cannot open embedding file: " + p.string());
    return parse(in);
}

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
    const auto it = index.find(token);
    return it == index.end() ? nullptr : &vectors[it->second];
}

std::string EmbeddingTable::to_text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        out += tokens[i];
        for (const double v : vectors[i]) out += " " + util::to_compact(v);
        out += '\n';
    }
    return out;
}

std::vector<double> attn_pool(const std::vector<std::vector<double>>& vectors,
                              const std::vector<double>& query) {
    if (vectors.empty()) throw DataError("attn_pool: empty vector list");
    const std::size_t dim = query.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));

    std::vector<double> scores(vectors.size());
    double max_s = -1e300;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        if (vectors[i].size() != dim)
            throw DataError("attn_pool: vector dimension mismatch");
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += query[k] * vectors[i][k];
        scores[i] = s * scale;
        max_s = std::max(max_s, scores[i]);
    }
    double z = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_s);
        z += s;
    }
    std::vector<double> out(dim, 0.0);
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        const double a = scores[i] / z;
        for (std::size_t k = 0; k < dim; ++k) out[k] += a * vectors[i][k];
    }
    return out;
}

// ---- config / manifest --------------------------------------------------------

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw DataError("train config: negative learning rate");
    if (epochs_max <= 0 || patience <= 0 || batch_size <= 0)
        throw DataError("train config: epochs_max, patience and batch_size must be positive");
}

double TrainConfig::effective_learning_rate(Backend b) const {
    if (learning_rate > 0.0) return learning_rate;
    return b == Backend::bow_linear ? 0.1 : 0.05;
}

std::string TrainManifest::hash() const {
    util::Fingerprint fp;
    fp.add(backend_str(backend));
    hash_double(fp, learning_rate_used);
    fp.add(std::to_string(config.epochs_max));
    fp.add(std::to_string(config.patience));
    fp.add(std::to_string(config.batch_size));
    fp.add(util::hex64(config.seed));
    fp.add(config.class_weighting ? "cw1" : "cw0");
    fp.add(train_fingerprint);
    fp.add(validation_fingerprint);
    for (const double f1 : validation_f1_curve) hash_double(fp, f1);
    fp.add(std::to_string(best_epoch));
    fp.add(degenerate ? "deg1" : "deg0");
    fp.add(params_hash);
    return fp.str();
}

// ---- loss / gradients -----------------------------------------------------------

namespace grad {

BowGrad bow_loss_grad(const std::vector<double>& weights, double bias,
                      const std::vector<SparseVec>& docs, const std::vector<int>& labels,
                      const std::vector<double>& sample_weights,
                      const std::vector<std::size_t>& batch) {
    BowGrad g;
    g.d_weights.assign(weights.size(), 0.0);
    for (const std::size_t idx : batch) {
        const SparseVec& doc = docs[idx];
        const double y = labels[idx];
        const double sw = sample_weights[idx];
        double z = bias;
        for (const auto& [i, v] : doc.items) z += weights[i] * v;
        g.loss += sw * (softplus(z) - y * z);
        const double dz = sw * (sigmoid(z) - y);
        for (const auto& [i, v] : doc.items) g.d_weights[i] += dz * v;
        g.d_bias += dz;
    }
    return g;
}

EmbedGrad embed_loss_grad(const std::vector<double>& query, const std::vector<double>& head_weights,
                          double head_bias, const std::vector<std::vector<double>>& matrix,
                          const std::vector<std::vector<std::size_t>>& docs,
                          const std::vector<int>& labels,
                          const std::vector<double>& sample_weights,
                          const std::vector<std::size_t>& batch) {
    const std::size_t dim = query.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    EmbedGrad g;
    g.d_query.assign(dim, 0.0);
    g.d_head.assign(dim, 0.0);

    std::vector<double> scores, alphas, h;
    for (const std::size_t idx : batch) {
        const std::vector<std::size_t>& rows = docs[idx];
        const double y = labels[idx];
        const double sw = sample_weights[idx];

        h.assign(dim, 0.0);
        alphas.assign(rows.size(), 0.0);
        if (!rows.empty()) {
            scores.assign(rows.size(), 0.0);
            double max_s = -1e300;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const std::vector<double>& v = matrix[rows[r]];
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k) s += query[k] * v[k];
                scores[r] = s * scale;
                max_s = std::max(max_s, scores[r]);
            }
            double zsum = 0.0;
            for (std::size_t r = 0; r < rows.size(); ++r) {
                alphas[r] = std::exp(scores[r] - max_s);
                zsum += alphas[r];
            }
            for (std::size_t r = 0; r < rows.size(); ++r) {
                alphas[r] /= zsum;
                const std::vector<double>& v = matrix[rows[r]];
                for (std::size_t k = 0; k < dim; ++k) h[k] += alphas[r] * v[k];
            }
        }

        double z = head_bias;
        for (std::size_t k = 0; k < dim; ++k) z += head_weights[k] * h[k];
        g.loss += sw * (softplus(z) - y * z);
        const double dz = sw * (sigmoid(z) - y);

        for (std::size_t k = 0; k < dim; ++k) g.d_head[k] += dz * h[k];
        g.d_bias += dz;

        if (!rows.empty()) {
            // d z / d q = sum_j alpha_j (u_j - ubar) v_j / sqrt(E), u_j = head.v_j
            double ubar = 0.0;
            std::vector<double> u(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const std::vector<double>& v = matrix[rows[r]];
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k) s += head_weights[k] * v[k];
                u[r] = s;
                ubar += alphas[r] * s;
            }
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const double coef = dz * alphas[r] * (u[r] - ubar) * scale;
                if (coef == 0.0) continue;
                const std::vector<double>& v = matrix[rows[r]];
                for (std::size_t k = 0; k < dim; ++k) g.d_query[k] += coef * v[k];
            }
        }
    }
    return g;
}

}  // namespace grad

// ---- training ----------------------------------------------------------------------

namespace {

struct TrainData {
    std::vector<int> labels;
    std::vector<double> sample_weights;
    Label majority = Label::patient_voice;
    bool degenerate = false;
};

TrainData prepare_labels(const corpus::CorpusSlice& train, bool class_weighting) {
    TrainData d;
    std::int64_t n_pos = 0, n_neg = 0;
    for (const corpus::Post& p : train.posts) {
        if (!p.label) throw DataError("train: unlabeled post id=" + p.id);
        const bool pos = *p.label == Label::patient_voice;
        d.labels.push_back(pos ? 1 : 0);
        pos ? ++n_pos : ++n_neg;
    }
    d.majority = n_pos >= n_neg ? Label::patient_voice : Label::not_relevant;
    d.degenerate = n_pos == 0 || n_neg == 0;

    double w_pos = 1.0, w_neg = 1.0;
    if (class_weighting && !d.degenerate) {
        const double n = static_cast<double>(n_pos + n_neg);
        w_pos = n / (2.0 * static_cast<double>(n_pos));
        w_neg = n / (2.0 * static_cast<double>(n_neg));
    }
    for (const int y : d.labels) d.sample_weights.push_back(y ? w_pos : w_neg);
    return d;
}

void check_disjoint(const corpus::CorpusSlice& train, const corpus::CorpusSlice& validation) {
    std::unordered_set<std::string> ids;
    for (const corpus::Post& p : train.posts) ids.insert(p.id);
    for (const corpus::Post& p : validation.posts)
        if (ids.count(p.id))
            throw DataError("train: validation post id=" + p.id + " also present in train");
}

std::string hash_params(const std::vector<const std::vector<double>*>& vecs,
                        const std::vector<double>& scalars) {
    util::Fingerprint fp;
    for (const auto* v : vecs)
        for (const double x : *v) hash_double(fp, x);
    for (const double x : scalars) hash_double(fp, x);
    return fp.str();
}

}  // namespace

TrainedClassifier train(Backend backend, const corpus::CorpusSlice& train_slice,
                        const corpus::CorpusSlice& validation, const TrainConfig& config,
                        const EmbeddingTable* embeddings) {
    config.validate();
    if (train_slice.empty()) throw DataError("train: empty training slice");
    if (validation.empty()) throw DataError("train: empty validation slice");
    check_disjoint(train_slice, validation);

    const double lr = config.effective_learning_rate(backend);
    const TrainData data = prepare_labels(train_slice, config.class_weighting);

    TrainedClassifier model;
    model.backend = backend;
    model.majority_label = data.majority;
    model.manifest.backend = backend;
    model.manifest.config = config;
    model.manifest.learning_rate_used = lr;
    model.manifest.train_fingerprint = train_slice.fingerprint();
    model.manifest.validation_fingerprint = validation.fingerprint();
    model.manifest.degenerate = data.degenerate;

    std::vector<Label> val_gold;
    for (const corpus::Post& p : validation.posts) {
        if (!p.label) throw DataError("train: unlabeled validation post id=" + p.id);
        val_gold.push_back(*p.label);
    }

    // Backend-specific featurization, shared optimizer loop below.
    std::vector<SparseVec> bow_docs, bow_val;
    std::vector<std::vector<double>> matrix;
    std::vector<std::vector<std::size_t>> emb_docs, emb_val;

    if (backend == Backend::bow_linear) {
        model.space = FeatureSpace::build(train_slice);
        for (const corpus::Post& p : train_slice.posts) bow_docs.push_back(featurize(p, model.space));
        for (const corpus::Post& p : validation.posts) bow_val.push_back(featurize(p, model.space));
        model.weights.assign(model.space.size(), 0.0);
        model.bias = 0.0;
    } else {
        if (!embeddings) throw DataError("train: embed_attn backend requires an embedding table");
        model.embeddings = *embeddings;
        matrix.reserve(embeddings->vectors.size() + 1);
        matrix.emplace_back(embeddings->dim, 0.0);  // row 0: out-of-vocabulary
        for (const auto& v : embeddings->vectors) matrix.push_back(v);
        const auto doc_rows = [&](const corpus::Post& p) {
            std::vector<std::size_t> rows;
            for (const std::string& t : textprep::tokenize(p.text)) {
                const auto it = embeddings->index.find(t);
                rows.push_back(it == embeddings->index.end() ? 0 : it->second + 1);
            }
            return rows;
        };
        for (const corpus::Post& p : train_slice.posts) emb_docs.push_back(doc_rows(p));
        for (const corpus::Post& p : validation.posts) emb_val.push_back(doc_rows(p));
        model.query.assign(embeddings->dim, 0.0);  // zero query = mean pooling at start
        model.head_weights.assign(embeddings->dim, 0.0);
        model.head_bias = 0.0;
    }

    const auto validation_f1 = [&]() {
        std::vector<Label> pred;
        pred.reserve(val_gold.size());
        for (std::size_t i = 0; i < val_gold.size(); ++i) {
            double logit = 0.0;
            bool degenerate_doc = false;
            if (backend == Backend::bow_linear) {
                const SparseVec& v = bow_val[i];
                degenerate_doc = v.empty_doc;
                logit = model.bias;
                for (const auto& [k, x] : v.items) logit += model.weights[k] * x;
            } else {
                const std::vector<std::size_t>& rows = emb_val[i];
                degenerate_doc =
                    rows.empty() ||
                    std::all_of(rows.begin(), rows.end(), [](std::size_t r) { return r == 0; });
                if (!degenerate_doc) {
                    std::vector<std::vector<double>> vecs;
                    vecs.reserve(rows.size());
                    for (const std::size_t r : rows) vecs.push_back(matrix[r]);
                    const std::vector<double> h = attn_pool(vecs, model.query);
                    logit = model.head_bias;
                    for (std::size_t k = 0; k < h.size(); ++k)
                        logit += model.head_weights[k] * h[k];
                }
            }
            if (degenerate_doc) {
                pred.push_back(model.majority_label);
            } else {
                pred.push_back(sigmoid(logit) >= model.threshold ? Label::patient_voice
                                                                 : Label::not_relevant);
            }
        }
        return evalstat::compute_metrics(val_gold, pred).f1_macro;
    };

    // Checkpoint of the best-validation parameters.
    std::vector<double> best_w = model.weights, best_q = model.query, best_h = model.head_weights;
    double best_b = model.bias, best_hb = model.head_bias;
    double best_f1 = -1.0;
    int patience_left = config.patience;

    util::Rng rng(config.seed);
    std::vector<std::size_t> order(train_slice.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs_max; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                                 order.begin() + static_cast<std::ptrdiff_t>(end));
            double loss;
            if (backend == Backend::bow_linear) {
                const auto g = grad::bow_loss_grad(model.weights, model.bias, bow_docs,
                                                   data.labels, data.sample_weights, batch);
                loss = g.loss;
                for (std::size_t k = 0; k < model.weights.size(); ++k)
                    model.weights[k] -= lr * g.d_weights[k];
                model.bias -= lr * g.d_bias;
            } else {
                const auto g =
                    grad::embed_loss_grad(model.query, model.head_weights, model.head_bias, matrix,
                                          emb_docs, data.labels, data.sample_weights, batch);
                loss = g.loss;
                for (std::size_t k = 0; k < model.query.size(); ++k) {
                    model.query[k] -= lr * g.d_query[k];
                    model.head_weights[k] -= lr * g.d_head[k];
                }
                model.head_bias -= lr * g.d_bias;
            }
            if (!std::isfinite(loss))
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   " (learning rate " + util::to_compact(lr) + " too high?)");
        }

        const double f1 = validation_f1();
        model.manifest.validation_f1_curve.push_back(f1);
        if (f1 >= best_f1) {
            // On ties the checkpoint rolls forward to the more-converged epoch.
            model.manifest.best_epoch = epoch;
            best_w = model.weights;
            best_b = model.bias;
            best_q = model.query;
            best_h = model.head_weights;
            best_hb = model.head_bias;
        }
        if (f1 > best_f1) {
            best_f1 = f1;
            patience_left = config.patience;
        } else if (--patience_left == 0) {
            break;
        }
    }

    model.weights = std::move(best_w);
    model.bias = best_b;
    model.query = std::move(best_q);
    model.head_weights = std::move(best_h);
    model.head_bias = best_hb;

    if (backend == Backend::bow_linear)
        model.manifest.params_hash = hash_params({&model.weights}, {model.bias, model.threshold});
    else
        model.manifest.params_hash = hash_params({&model.query, &model.head_weights},
                                                 {model.head_bias, model.threshold});
    return model;
}

PredictOutcome predict(const TrainedClassifier& model, const corpus::Post& post) {
    if (model.backend == Backend::bow_linear) {
        const SparseVec v = featurize(post, model.space);
        if (v.empty_doc) return {model.majority_label, 0.5, true};
        double z = model.bias;
        for (const auto& [k, x] : v.items) z += model.weights[k] * x;
        const double score = sigmoid(z);
        return {score >= model.threshold ? Label::patient_voice : Label::not_relevant, score,
                false};
    }

    const std::vector<std::string> tokens = textprep::tokenize(post.text);
    std::vector<std::vector<double>> vecs;
    bool any_known = false;
    for (const std::string& t : tokens) {
        if (const std::vector<double>* v = model.embeddings.find(t)) {
            vecs.push_back(*v);
            any_known = true;
        } else {
            vecs.emplace_back(model.embeddings.dim, 0.0);
        }
    }
    if (tokens.empty() || !any_known) return {model.majority_label, 0.5, true};

    const std::vector<double> h = attn_pool(vecs, model.query);
    double z = model.head_bias;
    for (std::size_t k = 0; k < h.size(); ++k) z += model.head_weights[k] * h[k];
    const double score = sigmoid(z);
    return {score >= model.threshold ? Label::patient_voice : Label::not_relevant, score, false};
}

// ---- serialization ----------------------------------------------------------------

namespace {
constexpr int kModelFormatVersion = 1;

json manifest_to_json(const TrainManifest& m) {
    json j;
    j["backend"] = backend_str(m.backend);
    j["learning_rate"] = m.config.learning_rate;
    j["learning_rate_used"] = m.learning_rate_used;
    j["epochs_max"] = m.config.epochs_max;
    j["patience"] = m.config.patience;
    j["batch_size"] = m.config.batch_size;
    j["seed"] = m.config.seed;
    j["class_weighting"] = m.config.class_weighting;
    j["train_fingerprint"] = m.train_fingerprint;
    j["validation_fingerprint"] = m.validation_fingerprint;
    j["validation_f1_curve"] = m.validation_f1_curve;
    j["best_epoch"] = m.best_epoch;
    j["degenerate"] = m.degenerate;
    j["params_hash"] = m.params_hash;
    j["manifest_hash"] = m.hash();
    return j;
}

TrainManifest manifest_from_json(const json& j) {
    TrainManifest m;
    m.backend = *parse_backend(j.at("backend").get<std::string>());
    m.config.learning_rate = j.at("learning_rate").get<double>();
    m.learning_rate_used = j.at("learning_rate_used").get<double>();
    m.config.epochs_max = j.at("epochs_max").get<int>();
    m.config.patience = j.at("patience").get<int>();
    m.config.batch_size = j.at("batch_size").get<int>();
    m.config.seed = j.at("seed").get<std::uint64_t>();
    m.config.class_weighting = j.at("class_weighting").get<bool>();
    m.train_fingerprint = j.at("train_fingerprint").get<std::string>();
    m.validation_fingerprint = j.at("validation_fingerprint").get<std::string>();
    m.validation_f1_curve = j.at("validation_f1_curve").get<std::vector<double>>();
    m.best_epoch = j.at("best_epoch").get<int>();
    m.degenerate = j.at("degenerate").get<bool>();
    m.params_hash = j.at("params_hash").get<std::string>();
    return m;
}

}  // namespace

void TrainedClassifier::save(const std::filesystem::path& p) const {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["backend"] = backend_str(backend);
    j["threshold"] = threshold;
    j["majority_label"] = corpus::label_str(majority_label);
    if (backend == Backend::bow_linear) {
        std::vector<std::string> terms(space.size());
        for (const auto& [term, idx] : space.vocabulary) terms[idx] = term;
        j["bow"] = {{"vocabulary", terms},
                    {"idf", space.idf},
                    {"min_doc_freq", space.min_doc_freq},
                    {"train_fingerprint", space.train_fingerprint},
                    {"weights", weights},
                    {"bias", bias}};
    } else {
        j["embed"] = {{"dim", embeddings.dim},
                      {"tokens", embeddings.tokens},
                      {"vectors", embeddings.vectors},
                      {"query", query},
                      {"head_weights", head_weights},
                      {"head_bias", head_bias}};
    }
    j["manifest"] = manifest_to_json(manifest);
    util::write_file(p, j.dump(2) + "\n");
}

TrainedClassifier TrainedClassifier::load(const std::filesystem::path& p) {
    const json j = json::parse(util::read_file(p), nullptr, false);
    if (j.is_discarded()) throw DataError("model file is not valid JSON: " + p.string());
    try {
        if (j.at("format_version").get<int>() != kModelFormatVersion)
            throw DataError("unsupported model format version in " + p.string());
        TrainedClassifier m;
        const auto backend = parse_backend(j.at("backend").get<std::string>());
        if (!backend) throw DataError("unknown backend in model file " + p.string());
        m.backend = *backend;
        m.threshold = j.at("threshold").get<double>();
        const auto label = corpus::parse_label(j.at("majority_label").get<std::string>());
        if (!label) throw DataError("unknown majority_label in model file " + p.string());
        m.majority_label = *label;
        if (m.backend == Backend::bow_linear) {
            const json& b = j.at("bow");
            const auto terms = b.at("vocabulary").get<std::vector<std::string>>();
            for (std::size_t i = 0; i < terms.size(); ++i) m.space.vocabulary.emplace(terms[i], i);
            m.space.idf = b.at("idf").get<std::vector<double>>();
            m.space.min_doc_freq = b.at("min_doc_freq").get<std::size_t>();
            m.space.train_fingerprint = b.at("train_fingerprint").get<std::string>();
            m.weights = b.at("weights").get<std::vector<double>>();
            m.bias = b.at("bias").get<double>();
            if (m.weights.size() != m.space.size())
                throw DataError("model file weight/vocabulary size mismatch: " + p.string());
        } else {
            const json& e = j.at("embed");
            m.embeddings.dim = e.at("dim").get<std::size_t>();
            m.embeddings.tokens = e.at("tokens").get<std::vector<std::string>>();
            m.embeddings.vectors = e.at("vectors").get<std::vector<std::vector<double>>>();
            for (std::size_t i = 0; i < m.embeddings.tokens.size(); ++i)
                m.embeddings.index.emplace(m.embeddings.tokens[i], i);
            m.query = e.at("query").get<std::vector<double>>();
            m.head_weights = e.at("head_weights").get<std::vector<double>>();
            m.head_bias = e.at("head_bias").get<double>();
        }
        m.manifest = manifest_from_json(j.at("manifest"));
        return m;
    } catch (const json::exception& e) {
        throw DataError("malformed model file " + p.string() + ": " + e.what());
    }
}

}  // namespace pvoice::classifier
