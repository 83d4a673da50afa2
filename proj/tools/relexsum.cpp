// relexsum: relation-based decision summarization for meeting transcripts.
//
// Subcommands: validate, train, summarize, baseline, cluster, evaluate,
// synth, report. Exit codes: 0 ok, 1 domain error, 2 I/O error.
// RELEXSUM_LOG=debug|info|warn|quiet controls stderr verbosity.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "relexsum/artifact.hpp"
#include "relexsum/baselines.hpp"
#include "relexsum/corpus.hpp"
#include "relexsum/inference.hpp"
#include "relexsum/model.hpp"
#include "relexsum/pipeline.hpp"
#include "relexsum/rouge.hpp"

namespace rx = relexsum;

namespace {

int log_level() {  // 0 quiet, 1 warn, 2 info, 3 debug
    const char* env = std::getenv("RELEXSUM_LOG");
    if (!env) return 2;
    std::string v = env;
    if (v == "quiet") return 0;
    if (v == "warn") return 1;
    if (v == "debug") return 3;
    return 2;
}

void log_info(const std::string& msg) {
    if (log_level() >= 2) std::cerr << "[relexsum] " << msg << "\n";
}

void log_warn(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[relexsum] warning: " << msg << "\n";
}

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_readable(const std::string& path) {
    if (!std::filesystem::exists(path))
        throw IoError("no such file: " + path);
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
}

rx::StopwordSet resolve_stopwords(const std::string& path) {
    if (path.empty()) return rx::default_stopwords();
    require_readable(path);
    return rx::load_stopwords(path);
}

// Shared options for commands that read a corpus and optionally group it
// by an external clustering instead of the decision annotations.
struct CorpusArgs {
    std::string corpus_path;
    std::string clusters_path;

    void attach(CLI::App* cmd, bool clusters = true) {
        cmd->add_option("--corpus", corpus_path, "corpus JSON file")
            ->required();
        if (clusters)
            cmd->add_option("--clusters", clusters_path,
                            "TSV clustering (da_id<TAB>cluster_id); when "
                            "absent, decision annotations group the DAs");
    }

    rx::Corpus load() const {
        require_readable(corpus_path);
        return rx::load_corpus(corpus_path);
    }

    std::vector<rx::DecisionDocument> documents(
        const rx::Corpus& corpus, std::vector<std::string>* warnings) const {
        if (clusters_path.empty())
            return rx::build_decision_documents(corpus, 4, warnings);
        require_readable(clusters_path);
        auto clusters = rx::load_cluster_file(clusters_path);
        return rx::build_decision_documents(corpus, clusters, 4, warnings);
    }
};

struct TrainArgs {
    CorpusArgs corpus;
    std::string phase = "both";
    int k = 10;
    int k_cue = 5;
    int restarts = 10;
    double tol = 1e-5;
    int max_sweeps = 200;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string stopwords_path;
    std::string lexicon_path;
    bool allow_null = false;
    bool no_constraints = false;
    bool coarse_pos = false;
    std::string out;
    std::string trace_path;

    void attach(CLI::App* cmd) {
        corpus.attach(cmd);
        cmd->add_option("--phase", phase, "cue | content | both")
            ->check(CLI::IsMember({"cue", "content", "both"}));
        cmd->add_option("--k", k, "content relation types")->check(CLI::PositiveNumber);
        cmd->add_option("--k-cue", k_cue, "cue relation types")->check(CLI::PositiveNumber);
        cmd->add_option("--restarts", restarts)->check(CLI::PositiveNumber);
        cmd->add_option("--tol", tol, "relative free-energy convergence threshold");
        cmd->add_option("--max-sweeps", max_sweeps)->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed);
        cmd->add_option("--threads", threads)->check(CLI::PositiveNumber);
        cmd->add_option("--stopwords", stopwords_path, "stopword list, one per line");
        cmd->add_option("--lexicon", lexicon_path, "hypernym lexicon file");
        cmd->add_flag("--allow-null", allow_null,
                      "let every document opt out of each relation");
        cmd->add_flag("--no-constraints", no_constraints,
                      "disable posterior constraints");
        cmd->add_flag("--coarse-pos", coarse_pos, "collapse POS tags to coarse classes");
        cmd->add_option("--out", out, "artifact output path")->required();
        cmd->add_option("--trace", trace_path, "free-energy trace output path");
    }
};

rx::json train_config_json(const TrainArgs& a) {
    return {{"phase", a.phase},
            {"k", a.k},
            {"k_cue", a.k_cue},
            {"restarts", a.restarts},
            {"tol", a.tol},
            {"max_sweeps", a.max_sweeps},
            {"threads", a.threads},
            {"allow_null", a.allow_null},
            {"constraints", !a.no_constraints},
            {"coarse_pos", a.coarse_pos},
            {"theta0", 0.1},
            {"lambda0", 0.1},
            {"segments", 4}};
}

int cmd_validate(const CorpusArgs& args) {
    rx::Corpus corpus = args.load();
    std::vector<std::string> warnings;
    auto docs = args.documents(corpus, &warnings);
    for (const auto& w : warnings) log_warn(w);
    std::size_t das = 0, decisions = 0;
    for (const auto& m : corpus.meetings) {
        das += m.das.size();
        decisions += m.decisions.size();
    }
    std::cout << "meetings=" << corpus.meetings.size() << " das=" << das
              << " decisions=" << decisions << " documents=" << docs.size()
              << "\n";
    return 0;
}

int cmd_train(const TrainArgs& args) {
    rx::Corpus corpus = args.corpus.load();
    std::vector<std::string> warnings;
    auto docs = args.corpus.documents(corpus, &warnings);
    for (const auto& w : warnings) log_warn(w);
    if (docs.empty()) throw std::invalid_argument("corpus yields no documents");

    rx::HypernymLexicon lexicon;
    if (!args.lexicon_path.empty()) {
        require_readable(args.lexicon_path);
        lexicon = rx::load_lexicon(args.lexicon_path);
    }
    rx::StopwordSet stopwords = resolve_stopwords(args.stopwords_path);

    rx::PipelineOptions opts;
    opts.hyper.K = args.k;
    opts.hyper.allow_null = args.allow_null;
    opts.k_cue = args.k_cue;
    opts.config.restarts = args.restarts;
    opts.config.tol = args.tol;
    opts.config.max_sweeps = args.max_sweeps;
    opts.config.seed = args.seed;
    opts.config.threads = args.threads;
    opts.use_constraints = !args.no_constraints;
    opts.lexicon = args.lexicon_path.empty() ? nullptr : &lexicon;
    opts.stopwords = &stopwords;
    opts.coarse_pos_tags = args.coarse_pos;

    rx::ModelArtifact artifact;
    artifact.config = train_config_json(args);
    artifact.seed = args.seed;

    std::vector<rx::CueContext> cue_ctxs(docs.size());
    if (args.phase == "cue" || args.phase == "both") {
        log_info("training cue model (K=" + std::to_string(args.k_cue) + ")");
        rx::PhaseResult cue = rx::learn_cue_model(docs, opts);
        cue_ctxs = rx::annotate_cue_context(docs, cue.instances);
        std::cout << "cue free_energy=" << cue.inference.free_energy
                  << " max_violation=" << cue.inference.final_max_violation
                  << " restart=" << cue.inference.best_restart << "\n";
        if (!args.trace_path.empty())
            rx::save_trace(cue.inference.trace,
                           args.phase == "cue" ? args.trace_path
                                               : args.trace_path + ".cue");
        artifact.cue = rx::make_phase_artifact(cue, args.k_cue);
    }
    if (args.phase == "content" || args.phase == "both") {
        log_info("training content model (K=" + std::to_string(args.k) + ")");
        rx::PhaseResult content =
            rx::learn_content_model(docs, cue_ctxs, opts, &warnings);
        for (const auto& w : warnings) log_warn(w);
        std::cout << "content free_energy=" << content.inference.free_energy
                  << " max_violation="
                  << content.inference.final_max_violation
                  << " restart=" << content.inference.best_restart << "\n";
        if (!args.trace_path.empty())
            rx::save_trace(content.inference.trace, args.trace_path);
        artifact.content = rx::make_phase_artifact(content, args.k);
    }

    rx::save_artifact(artifact, args.out);
    log_info("artifact written to " + args.out);
    return 0;
}

int cmd_summarize(const CorpusArgs& cargs, const std::string& model_path,
                  const std::string& out_path) {
    require_readable(model_path);
    rx::ModelArtifact artifact = rx::load_artifact(model_path);
    if (!artifact.content)
        throw std::invalid_argument(
            "artifact has no content model; train with --phase content|both");
    rx::Corpus corpus = cargs.load();
    std::vector<std::string> warnings;
    auto docs = cargs.documents(corpus, &warnings);
    for (const auto& w : warnings) log_warn(w);

    std::vector<rx::Summary> summaries;
    for (const auto& dd : docs)
        summaries.push_back(rx::summarize(dd, artifact.content->instances));
    rx::save_summaries(summaries, out_path);
    log_info("wrote " + std::to_string(summaries.size()) + " summaries");
    return 0;
}

int cmd_baseline(const CorpusArgs& cargs, const std::string& method,
                 const std::string& stopwords_path,
                 const std::string& out_path) {
    rx::Corpus corpus = cargs.load();
    std::vector<std::string> warnings;
    auto docs = cargs.documents(corpus, &warnings);
    rx::StopwordSet stopwords = resolve_stopwords(stopwords_path);

    std::vector<rx::Summary> summaries;
    if (method == "longest") {
        for (const auto& dd : docs) summaries.push_back(rx::longest_da(dd));
    } else if (method == "prototype") {
        rx::IdfTable idf(corpus, stopwords);
        for (const auto& dd : docs)
            summaries.push_back(rx::prototype_da(dd, idf, stopwords, &warnings));
    } else if (method == "upperbound") {
        for (const auto& dd : docs)
            summaries.push_back(rx::upperbound_summary(dd, stopwords));
    } else {
        throw std::invalid_argument("unknown baseline method: " + method);
    }
    for (const auto& w : warnings) log_warn(w);
    rx::save_summaries(summaries, out_path);
    return 0;
}

int cmd_cluster(const std::string& corpus_path, double threshold,
                const std::string& stopwords_path,
                const std::string& out_path) {
    require_readable(corpus_path);
    rx::Corpus corpus = rx::load_corpus(corpus_path);
    rx::StopwordSet stopwords = resolve_stopwords(stopwords_path);
    rx::ClusterConfig config;
    config.threshold = threshold;
    std::map<std::string, std::string> all;
    for (const auto& meeting : corpus.meetings) {
        auto clusters = rx::cluster_drdas(meeting, corpus, stopwords, config);
        all.insert(clusters.begin(), clusters.end());
    }
    rx::save_cluster_file(all, out_path);
    log_info("clustered " + std::to_string(all.size()) + " DAs");
    return 0;
}

// Pair each summary with the gold abstract of the matching decision.
std::vector<std::pair<std::string, rx::ScoredPair>> gold_pairs(
    const rx::Corpus& corpus, const std::vector<rx::Summary>& summaries,
    const rx::StopwordSet& stopwords) {
    std::map<std::string, const rx::Decision*> by_id;
    for (const auto& m : corpus.meetings)
        for (const auto& d : m.decisions) by_id[d.id] = &d;

    std::vector<std::pair<std::string, rx::ScoredPair>> pairs;
    for (const auto& s : summaries) {
        auto it = by_id.find(s.decision_id);
        if (it == by_id.end())
            throw std::invalid_argument("summary for unknown decision '" +
                                        s.decision_id + "'");
        rx::ScoredPair pair;
        pair.system = rx::rouge_preprocess(s.rendered(), stopwords);
        pair.reference = rx::rouge_preprocess(it->second->abstract, stopwords);
        pairs.emplace_back(s.decision_id, std::move(pair));
    }
    return pairs;
}

struct EvalArgs {
    std::string corpus_path;
    std::string summaries_path;
    std::string aggregate = "macro";
    std::string stopwords_path;
    std::string out;

    void attach(CLI::App* cmd) {
        cmd->add_option("--corpus", corpus_path)->required();
        cmd->add_option("--summaries", summaries_path)->required();
        cmd->add_option("--aggregate", aggregate, "macro | micro")
            ->check(CLI::IsMember({"macro", "micro"}));
        cmd->add_option("--stopwords", stopwords_path);
        cmd->add_option("--out", out, "output path (default: stdout)");
    }

    rx::RougeReport run() const {
        require_readable(corpus_path);
        require_readable(summaries_path);
        rx::Corpus corpus = rx::load_corpus(corpus_path);
        auto summaries = rx::load_summaries(summaries_path);
        rx::StopwordSet stopwords = resolve_stopwords(stopwords_path);
        auto pairs = gold_pairs(corpus, summaries, stopwords);
        return rx::evaluate_rouge(pairs, aggregate == "micro"
                                             ? rx::Aggregate::Micro
                                             : rx::Aggregate::Macro);
    }
};

int cmd_evaluate(const EvalArgs& args) {
    rx::RougeReport report = args.run();
    if (args.out.empty()) {
        rx::write_rouge_report(report, std::cout);
    } else {
        std::ofstream out(args.out);
        if (!out) throw IoError("cannot write: " + args.out);
        rx::write_rouge_report(report, out);
    }
    return 0;
}

// Aggregate metric table plus a gold/system side-by-side per decision.
int cmd_report(const EvalArgs& args) {
    rx::RougeReport report = args.run();

    require_readable(args.summaries_path);
    auto summaries = rx::load_summaries(args.summaries_path);
    rx::Corpus corpus = rx::load_corpus(args.corpus_path);
    std::map<std::string, std::string> golds;
    for (const auto& m : corpus.meetings)
        for (const auto& d : m.decisions) golds[d.id] = d.abstract;

    std::ostream* outp = &std::cout;
    std::ofstream file;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) throw IoError("cannot write: " + args.out);
        outp = &file;
    }
    std::ostream& out = *outp;

    char buf[160];
    out << "metric\tP\tR\tF\n";
    auto row = [&](const char* name, const rx::RougeScore& s) {
        std::snprintf(buf, sizeof buf, "%s\t%.2f\t%.2f\t%.2f\n", name,
                      100.0 * s.precision, 100.0 * s.recall, 100.0 * s.f1);
        out << buf;
    };
    row("ROUGE-1", report.aggregate.r1);
    row("ROUGE-2", report.aggregate.r2);
    row("ROUGE-SU4", report.aggregate.su4);

    out << "\n";
    for (const auto& s : summaries) {
        out << "== " << s.decision_id << " ==\n";
        out << "gold:   " << golds[s.decision_id] << "\n";
        out << "system: " << s.rendered() << "\n";
    }
    return 0;
}

struct SynthArgs {
    int docs = 40;
    int das = 8;
    int k = 2;
    std::uint64_t seed = 7;
    int segment = 3;         // planted location segment
    bool random_params = false;
    std::string out;
    std::string truth_path;

    void attach(CLI::App* cmd) {
        cmd->add_option("--docs", docs)->check(CLI::PositiveNumber);
        cmd->add_option("--das", das, "dialogue acts per document")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--k", k)->check(CLI::PositiveNumber);
        cmd->add_option("--seed", seed);
        cmd->add_option("--segment", segment, "segment carrying the planted location mass (0-3)")
            ->check(CLI::Range(0, 3));
        cmd->add_flag("--random-params", random_params,
                      "draw parameters from the prior instead of planting "
                      "well-separated ones");
        cmd->add_option("--out", out, "corpus output path")->required();
        cmd->add_option("--truth", truth_path, "planted-assignment TSV output");
    }
};

int cmd_synth(const SynthArgs& args) {
    rx::HyperParams hyper;
    hyper.K = args.k;
    rx::SynthShape shape;
    shape.docs = args.docs;
    shape.das_per_doc = args.das;

    rx::ModelParams params;
    if (args.random_params) {
        rx::Rng rng(args.seed);
        params = rx::sample_synth_params(shape, hyper, rng);
    } else {
        params = rx::make_planted_params(shape, hyper, args.segment);
    }
    rx::SynthResult result =
        rx::sample_corpus(params, hyper, shape, args.seed + 1);
    rx::save_corpus(result.corpus, args.out);
    if (!args.truth_path.empty())
        rx::save_ground_truth(result.truth, args.truth_path);
    log_info("sampled " + std::to_string(args.docs) + " documents");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relation-based decision summarization for meetings"};
    app.require_subcommand(1);

    CorpusArgs validate_args;
    auto* validate = app.add_subcommand("validate", "check a corpus file");
    validate_args.attach(validate);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "fit cue/content relation models");
    train_args.attach(train);

    CorpusArgs sum_args;
    std::string sum_model, sum_out;
    auto* summarize = app.add_subcommand("summarize",
                                         "emit relation summaries from a trained model");
    sum_args.attach(summarize);
    summarize->add_option("--model", sum_model, "trained artifact")->required();
    summarize->add_option("--out", sum_out)->required();

    CorpusArgs base_args;
    std::string base_method = "longest", base_stop, base_out;
    auto* baseline = app.add_subcommand("baseline", "extractive baseline summaries");
    base_args.attach(baseline);
    baseline->add_option("--method", base_method, "longest | prototype | upperbound")
        ->check(CLI::IsMember({"longest", "prototype", "upperbound"}));
    baseline->add_option("--stopwords", base_stop);
    baseline->add_option("--out", base_out)->required();

    std::string cl_corpus, cl_stop, cl_out;
    double cl_threshold = 0.3;
    auto* cluster = app.add_subcommand("cluster", "group DRDAs by TF-IDF similarity");
    cluster->add_option("--corpus", cl_corpus)->required();
    cluster->add_option("--threshold", cl_threshold, "merge clusters while best-pair cosine >= threshold");
    cluster->add_option("--stopwords", cl_stop);
    cluster->add_option("--out", cl_out)->required();

    EvalArgs eval_args;
    auto* evaluate = app.add_subcommand("evaluate", "score summaries against gold abstracts");
    eval_args.attach(evaluate);

    EvalArgs report_args;
    auto* report = app.add_subcommand("report", "metric table and side-by-side texts");
    report_args.attach(report);

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "sample a synthetic corpus");
    synth_args.attach(synth);

    CLI11_PARSE(app, argc, argv);

    try {
        if (validate->parsed()) return cmd_validate(validate_args);
        if (train->parsed()) return cmd_train(train_args);
        if (summarize->parsed())
            return cmd_summarize(sum_args, sum_model, sum_out);
        if (baseline->parsed())
            return cmd_baseline(base_args, base_method, base_stop, base_out);
        if (cluster->parsed())
            return cmd_cluster(cl_corpus, cl_threshold, cl_stop, cl_out);
        if (evaluate->parsed()) return cmd_evaluate(eval_args);
        if (report->parsed()) return cmd_report(report_args);
        if (synth->parsed()) return cmd_synth(synth_args);
    } catch (const IoError& e) {
        std::cerr << "relexsum: " << e.what() << "\n";
        return 2;
    } catch (const rx::LoadError& e) {
        std::string what = e.what();
        std::cerr << "relexsum: " << what << "\n";
        // "cannot open"/"cannot write" failures are I/O; the rest are bad data
        return what.rfind("cannot ", 0) == 0 ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "relexsum: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
