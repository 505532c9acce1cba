#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "newscite/corpus.hpp"
#include "newscite/curation.hpp"
#include "newscite/fc_features.hpp"
#include "newscite/forest.hpp"
#include "newscite/kneser_ney.hpp"
#include "newscite/lda.hpp"
#include "newscite/retrieval.hpp"
#include "newscite/sc_features.hpp"
#include "newscite/taxonomy.hpp"
#include "newscite/text.hpp"

// Orchestration for the two-stage pipeline: curation, prior/authority
// fitting, per-type SC training with learning curves and ablation, indexing,
// FC training, end-to-end suggestion with majority-vote categorization, and
// the E1 / E1+FP / pipeline evaluation harnesses.

namespace newscite::pipeline {

using corpus::AnnotationLayer;
using corpus::Entity;
using corpus::NewsArticle;
using corpus::Statement;
using taxonomy::TypeContext;
using taxonomy::TypeDag;

// ---------------------------------------------------------------------------
// Configuration (single JSON document; all keys optional except paths used
// by the invoked command)

struct Config {
    // inputs
    std::filesystem::path statements;
    std::filesystem::path articles;
    std::filesystem::path entities;
    std::filesystem::path taxonomy_path;
    std::filesystem::path annotations;  // optional
    std::filesystem::path resources = "resources";
    std::filesystem::path out = "out";

    std::uint64_t seed = 42;

    // curation
    int min_chars = 200;

    // priors / taxonomy
    int min_support = 10;
    std::size_t min_instances = 1000;
    sc::SectionFilter section_filter = sc::SectionFilter::both_rules;

    // retrieval
    std::size_t top_k = 100;
    std::size_t top_k_terms = 50;
    double dfr_c = 1.0;

    // learning
    std::vector<double> tau_grid = {0.1, 0.5, 0.9};
    double fc_train_fraction = 0.6;
    double fc_threshold = 0.5;
    double e1fp_similarity = 0.8;
    bool use_language_style = true;
    bool use_entity_structure = true;
    int lm_order = 3;
    int lda_topics = 20;
    int lda_iterations = 500;
    double lda_alpha = 0.0;  // 0 -> 50 / K
    double lda_beta = 0.01;
    learn::ForestParams forest;

    // pipeline evaluation
    std::size_t sample_size = 1000;

    static Config from_json(const nlohmann::json& j) {
        Config c;
        auto path = [&](const char* key) -> std::filesystem::path {
            return j.contains(key) ? std::filesystem::path(j.at(key).get<std::string>()) : "";
        };
        c.statements = path("statements");
        c.articles = path("articles");
        c.entities = path("entities");
        c.taxonomy_path = path("taxonomy");
        c.annotations = path("annotations");
        if (j.contains("resources")) c.resources = j.at("resources").get<std::string>();
        if (j.contains("out")) c.out = j.at("out").get<std::string>();
        c.seed = j.value("seed", c.seed);
        c.min_chars = j.value("min_chars", c.min_chars);
        c.min_support = j.value("min_support", c.min_support);
        c.min_instances = j.value("min_instances", c.min_instances);
        if (j.value("section_filter", "both_rules") == "combined_rule")
            c.section_filter = sc::SectionFilter::combined_rule;
        c.top_k = j.value("top_k", c.top_k);
        c.top_k_terms = j.value("top_k_terms", c.top_k_terms);
        c.dfr_c = j.value("dfr_c", c.dfr_c);
        if (j.contains("tau_grid")) c.tau_grid = j.at("tau_grid").get<std::vector<double>>();
        c.fc_train_fraction = j.value("fc_train_fraction", c.fc_train_fraction);
        c.fc_threshold = j.value("fc_threshold", c.fc_threshold);
        c.e1fp_similarity = j.value("e1fp_similarity", c.e1fp_similarity);
        c.use_language_style = j.value("use_language_style", true);
        c.use_entity_structure = j.value("use_entity_structure", true);
        c.lm_order = j.value("lm_order", c.lm_order);
        c.lda_topics = j.value("lda_topics", c.lda_topics);
        c.lda_iterations = j.value("lda_iterations", c.lda_iterations);
        c.lda_alpha = j.value("lda_alpha", c.lda_alpha);
        c.lda_beta = j.value("lda_beta", c.lda_beta);
        if (j.contains("forest")) {
            const auto& f = j.at("forest");
            c.forest.n_trees = f.value("n_trees", c.forest.n_trees);
            c.forest.max_depth = f.value("max_depth", c.forest.max_depth);
            c.forest.min_leaf = f.value("min_leaf", c.forest.min_leaf);
            c.forest.features_per_split = f.value("features_per_split", c.forest.features_per_split);
        }
        c.forest.seed = c.seed;
        c.sample_size = j.value("sample_size", c.sample_size);
        return c;
    }

    static Config load(const std::filesystem::path& file) {
        return from_json(jsonl::read_json_file(file));
    }

    double effective_lda_alpha() const {
        return lda_alpha > 0.0 ? lda_alpha : 50.0 / static_cast<double>(lda_topics);
    }
};

// ---------------------------------------------------------------------------
// In-memory bundle of the loaded corpus

struct CorpusBundle {
    std::vector<Statement> statements;
    std::vector<NewsArticle> articles;
    std::vector<Entity> entities;
    std::unordered_map<std::string, AnnotationLayer> annotations;  // by unit id
    TypeDag dag;           // depth-consistent
    TypeContext types;
    text::Resources resources;

    std::unordered_map<std::string, const NewsArticle*> article_by_id;
    std::unordered_map<std::string, const NewsArticle*> article_by_url;
    std::unordered_map<std::string, const Statement*> statement_by_id;

    void reindex() {
        article_by_id.clear();
        article_by_url.clear();
        statement_by_id.clear();
        for (const auto& a : articles) {
            article_by_id[a.id] = &a;
            if (!a.url.empty()) article_by_url[a.url] = &a;
        }
        for (const auto& s : statements) statement_by_id[s.id] = &s;
    }

    // Ground-truth cited articles N_s present in the collection.
    std::vector<std::string> cited_article_ids(const Statement& s) const {
        std::vector<std::string> out;
        std::set<std::string> seen;
        for (const auto& c : s.citations) {
            auto it = article_by_url.find(c.url);
            if (it != article_by_url.end() && seen.insert(it->second->id).second)
                out.push_back(it->second->id);
        }
        return out;
    }
};

inline CorpusBundle load_bundle(const Config& cfg, bool need_articles = true) {
    CorpusBundle b;
    b.resources = text::Resources::load(cfg.resources);
    b.statements = corpus::load_statements(cfg.statements);
    if (need_articles && !cfg.articles.empty()) b.articles = corpus::load_articles(cfg.articles);
    if (!cfg.entities.empty()) b.entities = corpus::load_entities(cfg.entities);
    if (!cfg.annotations.empty() && std::filesystem::exists(cfg.annotations)) {
        for (auto& layer : corpus::load_annotations(cfg.annotations))
            b.annotations.emplace(layer.unit_id, std::move(layer));
    }
    if (!cfg.taxonomy_path.empty()) {
        b.dag = taxonomy::make_depth_consistent(taxonomy::load_taxonomy(cfg.taxonomy_path));
    } else {
        b.dag.nodes = {taxonomy::kRootType};
        b.dag.depth[taxonomy::kRootType] = 0;
    }
    b.types = TypeContext::build(b.dag, b.entities);
    b.reindex();
    return b;
}

// ---------------------------------------------------------------------------
// Curation command

struct CurationOutcome {
    curation::MajorityVoteResult majority;
    curation::UrlPatternResult url_patterns;
    curation::DropReport drops;
    int uncited = 0;

    nlohmann::json report() const {
        return nlohmann::json{{"majority_voting",
                               {{"reassigned_domains", majority.reassigned_domains},
                                {"changes", majority.changes.to_json()}}},
                              {"url_patterns",
                               {{"changed_citations", url_patterns.changed_citations},
                                {"changes", url_patterns.changes.to_json()}}},
                              {"article_filter", drops.to_json()},
                              {"uncited_statements", uncited}};
    }
};

// Applies the heuristics in order (majority voting, then URL patterns),
// filters articles and labels statements.
inline CurationOutcome curate(std::vector<Statement>& statements, std::vector<NewsArticle>& articles,
                              int min_chars, const text::Resources& resources) {
    CurationOutcome outcome;
    outcome.majority = curation::majority_vote_domains(statements);
    outcome.url_patterns = curation::apply_url_patterns(statements);
    articles = curation::filter_articles(articles, min_chars, resources.stopwords, &outcome.drops);
    outcome.uncited = curation::mark_news_statements(statements);
    return outcome;
}

// ---------------------------------------------------------------------------
// Type-conditioned language resources (LM and topics over N_t)

struct TypeResources {
    std::unique_ptr<lm::NGramLM> lm;
    std::unique_ptr<lda::TopicModel> topics;
};

// N_t: articles cited from news statements of entities of type t.
inline std::vector<const NewsArticle*> articles_for_type(const CorpusBundle& b, const std::string& type_id) {
    std::set<std::string> ids;
    std::vector<const NewsArticle*> out;
    for (const auto& s : b.statements) {
        if (!s.is_news) continue;
        if (!b.types.is_instance(s.entity_id, type_id)) continue;
        for (const auto& id : b.cited_article_ids(s)) {
            if (ids.insert(id).second) out.push_back(b.article_by_id.at(id));
        }
    }
    return out;
}

inline TypeResources build_type_resources(const CorpusBundle& b, const std::string& type_id,
                                          const Config& cfg) {
    TypeResources tr;
    auto articles = articles_for_type(b, type_id);
    if (articles.empty()) return tr;
    std::vector<std::vector<std::string>> docs;
    docs.reserve(articles.size());
    for (const auto* a : articles) docs.push_back(text::tokenize(a->title + " " + a->body()));
    tr.lm = std::make_unique<lm::NGramLM>(lm::NGramLM::train(docs, cfg.lm_order));
    const int k = std::min<int>(cfg.lda_topics, static_cast<int>(docs.size()));
    if (k >= 1) {
        tr.topics = std::make_unique<lda::TopicModel>(
            lda::train_lda(docs, k, cfg.lda_iterations, cfg.lda_alpha > 0.0 ? cfg.lda_alpha : 50.0 / k,
                           cfg.lda_beta, cfg.seed));
    }
    return tr;
}

// ---------------------------------------------------------------------------
// SC: dataset building, per-type training, majority-vote categorization

inline features::NamedFeatures sc_features_for(const CorpusBundle& b, const Statement& s,
                                               const sc::PriorTables& priors, const TypeResources& tr,
                                               bool language_style, bool entity_structure) {
    features::NamedFeatures row;
    if (language_style) {
        const AnnotationLayer* ann = nullptr;
        auto it = b.annotations.find(s.id);
        if (it != b.annotations.end()) ann = &it->second;
        auto ls = sc::language_style_features(s, ann, tr.lm.get(), tr.topics.get(), b.resources);
        row.insert(row.end(), ls.begin(), ls.end());
    }
    if (entity_structure) {
        auto es = sc::entity_structure_features(s, b.types, priors);
        row.insert(row.end(), es.begin(), es.end());
    }
    return row;
}

inline std::vector<std::string> sc_class_list(const std::vector<Statement>& statements) {
    std::set<std::string> labels;
    for (const auto& s : statements)
        if (s.trainable()) labels.insert(s.label);
    return {labels.begin(), labels.end()};
}

struct ScTypeReport {
    std::string type_id;
    double tau = 0.0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    learn::MetricsReport metrics;
};

struct ScTrainResult {
    std::map<std::string, learn::RandomForest> models;  // per type, trained at max tau
    std::vector<ScTypeReport> learning_curve;
    std::vector<std::string> classes;
    std::vector<std::string> skipped;  // types skipped, with reason
};

// One model per eligible type; metrics per training fraction in the tau
// grid. The model kept for categorization is the one trained at the largest
// tau.
inline ScTrainResult train_sc(const CorpusBundle& b, const sc::PriorTables& priors, const Config& cfg) {
    ScTrainResult result;
    result.classes = sc_class_list(b.statements);

    auto eligible = taxonomy::eligible_types(b.dag, b.types, cfg.min_instances);
    if (eligible.empty()) eligible.push_back(b.dag.root);

    // statements per entity
    std::unordered_map<std::string, std::vector<const Statement*>> by_entity;
    for (const auto& s : b.statements)
        if (s.trainable()) by_entity[s.entity_id].push_back(&s);

    std::vector<double> taus = cfg.tau_grid;
    std::sort(taus.begin(), taus.end());
    if (taus.empty()) taus.push_back(0.9);

    for (const auto& type_id : eligible) {
        TypeResources tr = cfg.use_language_style ? build_type_resources(b, type_id, cfg)
                                                  : TypeResources{};
        learn::RandomForest best_model;
        bool have_model = false;
        std::string skip_reason;

        for (double tau : taus) {
            taxonomy::SampleSplit split;
            try {
                split = taxonomy::stratified_sample(b.dag, type_id, b.types, tau, cfg.seed);
            } catch (const Error& e) {
                skip_reason = e.what();
                break;
            }
            auto build = [&](const std::vector<std::string>& entity_ids, learn::Dataset& data) {
                data.set_classes(result.classes);
                for (const auto& eid : entity_ids) {
                    auto it = by_entity.find(eid);
                    if (it == by_entity.end()) continue;
                    for (const Statement* s : it->second) {
                        data.add_row(sc_features_for(b, *s, priors, tr, cfg.use_language_style,
                                                     cfg.use_entity_structure),
                                     s->label, s->entity_id);
                    }
                }
            };
            learn::Dataset train, test;
            build(split.train_ids, train);
            build(split.test_ids, test);
            if (train.rows.empty() || test.rows.empty()) {
                skip_reason = "no labeled statements in the split";
                continue;
            }
            learn::RandomForest model;
            try {
                model = learn::train_forest(train, cfg.forest, {}, "SC");
            } catch (const Error& e) {
                skip_reason = e.what();
                continue;
            }
            std::vector<int> pred, gold;
            for (std::size_t i = 0; i < test.rows.size(); ++i) {
                pred.push_back(learn::predict(model, test.rows[i]).class_index);
                gold.push_back(test.labels[i]);
            }
            ScTypeReport row;
            row.type_id = type_id;
            row.tau = tau;
            row.n_train = train.rows.size();
            row.n_test = test.rows.size();
            row.metrics = learn::compute_metrics(pred, gold, result.classes.size());
            result.learning_curve.push_back(std::move(row));
            best_model = std::move(model);
            have_model = true;
        }
        if (have_model) {
            result.models.emplace(type_id, std::move(best_model));
        } else {
            result.skipped.push_back(type_id + ": " + (skip_reason.empty() ? "no data" : skip_reason));
        }
    }
    return result;
}

// Majority vote across the type-specific models applicable to the
// statement's entity; ties prefer news, then the lexicographically smaller
// class. Falls back to the root-type model.
inline std::string categorize_statement(const CorpusBundle& b, const Statement& s,
                                        const std::map<std::string, learn::RandomForest>& models,
                                        const sc::PriorTables& priors,
                                        const std::map<std::string, TypeResources>& type_resources,
                                        const Config& cfg) {
    std::vector<const learn::RandomForest*> applicable;
    std::vector<const TypeResources*> applicable_res;
    static const TypeResources kEmpty;
    for (const auto& t : b.types.types_of(s.entity_id)) {
        auto it = models.find(t);
        if (it == models.end()) continue;
        applicable.push_back(&it->second);
        auto rit = type_resources.find(t);
        applicable_res.push_back(rit == type_resources.end() ? &kEmpty : &rit->second);
    }
    if (applicable.empty()) {
        auto it = models.find(b.dag.root);
        if (it == models.end()) throw Error("no applicable SC model and no root model");
        applicable.push_back(&it->second);
        auto rit = type_resources.find(b.dag.root);
        applicable_res.push_back(rit == type_resources.end() ? &kEmpty : &rit->second);
    }

    std::map<std::string, int> votes;
    for (std::size_t i = 0; i < applicable.size(); ++i) {
        const auto& model = *applicable[i];
        auto row = sc_features_for(b, s, priors, *applicable_res[i], cfg.use_language_style,
                                   cfg.use_entity_structure);
        auto pred = learn::predict(model, features::values_of(row));
        votes[model.classes[pred.class_index]] += 1;
    }
    int best = 0;
    for (const auto& [label, n] : votes) best = std::max(best, n);
    if (votes.count("news") && votes.at("news") == best) return "news";
    for (const auto& [label, n] : votes)
        if (n == best) return label;
    return "news";  // unreachable
}

// ---------------------------------------------------------------------------
// FC: pair dataset, training, suggestion

struct FcPairInfo {
    std::string statement_id;
    std::string article_id;
    double score = 0.0;
    int rank = 0;
    bool correct = false;
};

struct FcData {
    learn::Dataset dataset;  // rows aligned with pairs
    std::vector<FcPairInfo> pairs;
};

enum class FcFeatureMode { full, baseline_only };

// Shared per-run feature state: article views are built once per article.
struct FcRunContext {
    fc::PairContext pair_ctx;
    std::unordered_map<std::string, fc::ArticleView> views;
    const CorpusBundle* bundle = nullptr;
    const Config* cfg = nullptr;

    const fc::ArticleView& view_of(const std::string& article_id) {
        auto it = views.find(article_id);
        if (it == views.end()) {
            const NewsArticle* a = bundle->article_by_id.at(article_id);
            it = views
                     .emplace(article_id,
                              fc::ArticleView::build(*a, *pair_ctx.catalog,
                                                     bundle->annotations.empty() ? nullptr
                                                                                 : &bundle->annotations))
                     .first;
        }
        return it->second;
    }
};

inline FcRunContext make_fc_run_context(const CorpusBundle& b, const Config& cfg,
                                        const fc::AuthorityTables* authority, const TypeResources* tr,
                                        const std::string& model_type = taxonomy::kRootType) {
    FcRunContext ctx;
    ctx.bundle = &b;
    ctx.cfg = &cfg;
    ctx.pair_ctx.resources = &b.resources;
    ctx.pair_ctx.types = &b.types;
    ctx.pair_ctx.model_type = model_type;
    ctx.pair_ctx.type_lm = tr ? tr->lm.get() : nullptr;
    ctx.pair_ctx.type_topics = tr ? tr->topics.get() : nullptr;
    ctx.pair_ctx.authority = authority;
    ctx.pair_ctx.catalog = &b.entities;
    ctx.pair_ctx.annotations = b.annotations.empty() ? nullptr : &b.annotations;
    return ctx;
}

// Retrieves top-k candidates for each news statement with ground truth and
// extracts pair features; label is `correct` iff the candidate is cited by
// the statement.
inline FcData build_fc_data(const CorpusBundle& b, const retrieval::InvertedIndex& index,
                            const std::vector<const Statement*>& statements,
                            const std::vector<Statement>& query_pool, FcRunContext& ctx,
                            FcFeatureMode mode) {
    FcData data;
    data.dataset.set_classes({"correct", "incorrect"});
    for (const Statement* s : statements) {
        auto truth_list = b.cited_article_ids(*s);
        std::set<std::string> truth(truth_list.begin(), truth_list.end());
        retrieval::Query query;
        try {
            query = retrieval::construct_query_qca1(*s, query_pool, b.resources, ctx.cfg->top_k_terms);
        } catch (const Error&) {
            continue;  // unretrievable statement: no pairs
        }
        auto results = retrieval::search(index, query, ctx.cfg->top_k, ctx.cfg->dfr_c);

        std::optional<kernel::DependencyTree> stmt_tree;
        if (!b.annotations.empty()) {
            auto it = b.annotations.find(s->id);
            if (it != b.annotations.end() && !it->second.dependencies.empty())
                stmt_tree = kernel::DependencyTree::from_annotation(it->second);
        }
        for (const auto& r : results) {
            auto row = fc::pair_features(*s, ctx.view_of(r.doc), ctx.pair_ctx, r.score, r.rank,
                                         stmt_tree ? &*stmt_tree : nullptr);
            FcPairInfo info;
            info.statement_id = s->id;
            info.article_id = r.doc;
            info.score = r.score;
            info.rank = r.rank;
            info.correct = truth.count(r.doc) > 0;
            data.dataset.add_row(row, info.correct ? "correct" : "incorrect", s->id);
            data.pairs.push_back(std::move(info));
        }
    }
    if (mode == FcFeatureMode::baseline_only) {
        data.dataset = data.dataset.select_features(
            [](const std::string& name) { return name.rfind("fc_retrieval_", 0) == 0; });
    }
    return data;
}

// Group split keeping pairs aligned with dataset rows.
inline std::pair<std::vector<std::size_t>, std::vector<std::size_t>> fc_group_split(
    const FcData& data, double fraction, std::uint64_t seed) {
    std::vector<std::string> group_ids;
    std::map<std::string, std::vector<std::size_t>> by_group;
    for (std::size_t i = 0; i < data.pairs.size(); ++i) {
        auto [it, inserted] = by_group.try_emplace(data.pairs[i].statement_id);
        if (inserted) group_ids.push_back(data.pairs[i].statement_id);
        it->second.push_back(i);
    }
    std::sort(group_ids.begin(), group_ids.end());
    rng::Rng r(seed);
    r.shuffle(group_ids);
    std::size_t n_train = static_cast<std::size_t>(fraction * static_cast<double>(group_ids.size()));
    if (group_ids.size() > 1) n_train = std::clamp<std::size_t>(n_train, 1, group_ids.size() - 1);
    std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
    for (std::size_t g = 0; g < group_ids.size(); ++g) {
        auto& side = g < n_train ? out.first : out.second;
        for (auto i : by_group[group_ids[g]]) side.push_back(i);
    }
    std::sort(out.first.begin(), out.first.end());
    std::sort(out.second.begin(), out.second.end());
    return out;
}

// Cost-sensitive FC forest (inverse-class-frequency weights).
inline learn::RandomForest train_fc_forest(const learn::Dataset& train, const Config& cfg) {
    return learn::train_forest(train, cfg.forest, learn::inverse_frequency_weights(train), "FC");
}

struct Suggestion {
    std::string article_id;
    double probability = 0.0;  // positive-class probability
    double retrieval_score = 0.0;
    int retrieval_rank = 0;
};

// Candidates predicted `correct` (positive probability >= threshold),
// ordered by probability descending. Empty output is a valid result.
inline std::vector<Suggestion> suggest_for_statement(const CorpusBundle& b,
                                                     const retrieval::InvertedIndex& index,
                                                     const learn::RandomForest& fc_model,
                                                     const Statement& s,
                                                     const std::vector<Statement>& query_pool,
                                                     FcRunContext& ctx) {
    auto query = retrieval::construct_query_qca1(s, query_pool, b.resources, ctx.cfg->top_k_terms);
    auto results = retrieval::search(index, query, ctx.cfg->top_k, ctx.cfg->dfr_c);

    const int correct_idx = [&] {
        for (std::size_t i = 0; i < fc_model.classes.size(); ++i)
            if (fc_model.classes[i] == "correct") return static_cast<int>(i);
        throw Error("FC model has no 'correct' class");
    }();

    std::optional<kernel::DependencyTree> stmt_tree;
    if (!b.annotations.empty()) {
        auto it = b.annotations.find(s.id);
        if (it != b.annotations.end() && !it->second.dependencies.empty())
            stmt_tree = kernel::DependencyTree::from_annotation(it->second);
    }

    const bool baseline_only = fc_model.feature_names.size() == 2 &&
                               fc_model.feature_names[0].rfind("fc_retrieval_", 0) == 0;
    std::vector<Suggestion> accepted;
    for (const auto& r : results) {
        auto row = fc::pair_features(s, ctx.view_of(r.doc), ctx.pair_ctx, r.score, r.rank,
                                     stmt_tree ? &*stmt_tree : nullptr);
        std::vector<double> values;
        if (baseline_only) {
            for (const auto& [name, v] : row)
                if (name.rfind("fc_retrieval_", 0) == 0) values.push_back(v);
        } else {
            values = features::values_of(row);
        }
        auto pred = learn::predict(fc_model, values);
        const double p = pred.distribution[correct_idx];
        if (p >= ctx.cfg->fc_threshold) accepted.push_back({r.doc, p, r.score, r.rank});
    }
    std::sort(accepted.begin(), accepted.end(), [](const Suggestion& a, const Suggestion& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        return a.article_id < b.article_id;
    });
    return accepted;
}

// ---------------------------------------------------------------------------
// Evaluation: E1 and E1+FP

enum class EvalMode { e1, e1fp };

struct EvalCounts {
    long suggested = 0;       // total suggested articles
    long correct = 0;         // suggested articles judged correct
    long truth_total = 0;     // ground-truth articles
    long truth_found = 0;     // ground-truth articles recovered

    double precision() const {
        return suggested > 0 ? static_cast<double>(correct) / static_cast<double>(suggested) : 0.0;
    }
    double recall() const {
        return truth_total > 0 ? static_cast<double>(truth_found) / static_cast<double>(truth_total) : 0.0;
    }
    double f1() const {
        const double p = precision(), r = recall();
        return (p + r) > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    void accumulate(const EvalCounts& o) {
        suggested += o.suggested;
        correct += o.correct;
        truth_total += o.truth_total;
        truth_found += o.truth_found;
    }
};

struct EvalReport {
    EvalCounts micro;
    std::map<std::string, EvalCounts> per_type;  // keyed by the entity's primary declared type

    nlohmann::json to_json() const {
        nlohmann::json types = nlohmann::json::object();
        for (const auto& [t, c] : per_type) {
            types[t] = {{"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()},
                        {"suggested", c.suggested},   {"correct", c.correct},
                        {"truth_total", c.truth_total}, {"truth_found", c.truth_found}};
        }
        return nlohmann::json{{"micro",
                               {{"precision", micro.precision()},
                                {"recall", micro.recall()},
                                {"f1", micro.f1()},
                                {"suggested", micro.suggested},
                                {"correct", micro.correct},
                                {"truth_total", micro.truth_total},
                                {"truth_found", micro.truth_found}}},
                              {"per_type", types}};
    }
};

struct SuggestionSet {
    std::string statement_id;
    std::vector<std::string> article_ids;  // ranked accepted suggestions
};

namespace detail {

inline std::string primary_type(const CorpusBundle& b, const std::string& entity_id) {
    auto it = b.types.entities.find(entity_id);
    if (it != b.types.entities.end() && !it->second->type_ids.empty())
        return it->second->type_ids.front();
    return taxonomy::kRootType;
}

}  // namespace detail

// E1 counts a suggestion as correct iff it is a ground-truth citation;
// E1+FP additionally accepts near-duplicates (token Jaccard above the
// threshold to any ground-truth article). The E1+FP correct set is a
// superset of E1's, so E1+FP precision dominates on every run.
inline EvalReport evaluate_suggestions(const CorpusBundle& b, const std::vector<SuggestionSet>& suggestions,
                                       const std::map<std::string, std::vector<std::string>>& ground_truth,
                                       EvalMode mode, double sim_threshold = 0.8) {
    std::unordered_map<std::string, text::TokenSet> body_tokens;
    auto tokens_of = [&](const std::string& article_id) -> const text::TokenSet& {
        auto it = body_tokens.find(article_id);
        if (it == body_tokens.end()) {
            const NewsArticle* a = b.article_by_id.count(article_id) ? b.article_by_id.at(article_id)
                                                                     : nullptr;
            it = body_tokens.emplace(article_id, a ? text::token_set(a->body()) : text::TokenSet{}).first;
        }
        return it->second;
    };

    EvalReport report;
    for (const auto& sugg : suggestions) {
        auto git = ground_truth.find(sugg.statement_id);
        const std::vector<std::string> empty;
        const std::vector<std::string>& truth = git == ground_truth.end() ? empty : git->second;
        std::set<std::string> truth_set(truth.begin(), truth.end());

        EvalCounts counts;
        counts.suggested = static_cast<long>(sugg.article_ids.size());
        counts.truth_total = static_cast<long>(truth_set.size());

        std::set<std::string> found;
        for (const auto& aid : sugg.article_ids) {
            if (truth_set.count(aid)) {
                counts.correct += 1;
                found.insert(aid);
                continue;
            }
            if (mode == EvalMode::e1fp) {
                for (const auto& t : truth_set) {
                    if (text::jaccard(tokens_of(aid), tokens_of(t)) > sim_threshold) {
                        counts.correct += 1;
                        found.insert(t);
                        break;
                    }
                }
            }
        }
        counts.truth_found = static_cast<long>(found.size());

        const Statement* s = b.statement_by_id.count(sugg.statement_id)
                                 ? b.statement_by_id.at(sugg.statement_id)
                                 : nullptr;
        const std::string type = s ? detail::primary_type(b, s->entity_id) : taxonomy::kRootType;
        report.per_type[type].accumulate(counts);
        report.micro.accumulate(counts);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Pipeline evaluation (two-stage) and the E2 task file

struct PipelineEvalResult {
    long sampled = 0;
    long ground_truth_news = 0;
    long predicted_news = 0;
    long predicted_news_correct = 0;
    EvalReport e1;
    EvalReport e1fp;
    long e2_tasks = 0;

    double stage1_precision() const {
        return predicted_news > 0
                   ? static_cast<double>(predicted_news_correct) / static_cast<double>(predicted_news)
                   : 0.0;
    }
    double stage1_recall() const {
        return ground_truth_news > 0
                   ? static_cast<double>(predicted_news_correct) / static_cast<double>(ground_truth_news)
                   : 0.0;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"sampled", sampled},
                              {"stage1",
                               {{"ground_truth_news", ground_truth_news},
                                {"predicted_news", predicted_news},
                                {"predicted_news_correct", predicted_news_correct},
                                {"precision", stage1_precision()},
                                {"recall", stage1_recall()}}},
                              {"stage2", {{"e1", e1.to_json()}, {"e1fp", e1fp.to_json()}}},
                              {"e2_tasks", e2_tasks}};
    }
};

inline constexpr const char* kE2Question =
    "Which of the two shown news articles is an appropriate citation for the statement?";

// Emits one blinded judgment task per suggested non-ground-truth article:
// the suggestion and one ground-truth article in seeded random order, with
// no marker of which is which.
inline long write_e2_tasks(const CorpusBundle& b, const std::vector<SuggestionSet>& suggestions,
                           const std::map<std::string, std::vector<std::string>>& ground_truth,
                           const std::filesystem::path& path, std::uint64_t seed) {
    jsonl::Writer writer(path);
    rng::Rng r(seed);
    long tasks = 0;
    for (const auto& sugg : suggestions) {
        auto git = ground_truth.find(sugg.statement_id);
        if (git == ground_truth.end() || git->second.empty()) continue;
        std::set<std::string> truth(git->second.begin(), git->second.end());
        const Statement* s = b.statement_by_id.at(sugg.statement_id);
        for (const auto& aid : sugg.article_ids) {
            if (truth.count(aid)) continue;
            const std::string& gt = git->second[r.next_index(git->second.size())];
            auto article_json = [&](const std::string& id) {
                const NewsArticle* a = b.article_by_id.count(id) ? b.article_by_id.at(id) : nullptr;
                return nlohmann::json{{"id", id},
                                      {"title", a ? a->title : ""},
                                      {"url", a ? a->url : ""}};
            };
            std::vector<std::string> order{aid, gt};
            if (r.next_index(2) == 1) std::swap(order[0], order[1]);
            writer.write(nlohmann::json{{"statement_id", s->id},
                                        {"statement", s->text},
                                        {"question", kE2Question},
                                        {"articles",
                                         nlohmann::json::array({article_json(order[0]),
                                                                article_json(order[1])})},
                                        {"options", {"first", "second", "both", "none",
                                                     "insufficient info"}}});
            ++tasks;
        }
    }
    return tasks;
}

}  // namespace newscite::pipeline
