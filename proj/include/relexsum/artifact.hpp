#pragma once

// Versioned model artifact and summary-file serialization. JSON keeps key
// order sorted, so identical inputs serialize byte-identically.

#include <json.hpp>

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "relexsum/pipeline.hpp"

namespace relexsum {

inline constexpr int kArtifactVersion = 1;

struct PhaseArtifact {
    int k = 0;
    double free_energy = 0.0;
    int best_restart = -1;
    double max_violation = 0.0;
    json vocabulary;         // template name -> value list
    json params;             // posterior means
    std::vector<RelationInstance> instances;
};

struct ModelArtifact {
    int version = kArtifactVersion;
    json config;
    std::uint64_t seed = 0;
    std::optional<PhaseArtifact> cue;
    std::optional<PhaseArtifact> content;
};

namespace detail {

inline json vocab_to_json(const FeatureVocabulary& vocab) {
    json out = json::object();
    for (int t = 0; t < kNumTemplates; ++t) {
        Tmpl tmpl = static_cast<Tmpl>(t);
        if (vocab.cardinality(tmpl) == 0) continue;
        json values = json::array();
        for (int v = 0; v < vocab.cardinality(tmpl); ++v)
            values.push_back(vocab.value(tmpl, v));
        out[template_name(tmpl)] = values;
    }
    return out;
}

inline json params_to_json(const ModelParams& params,
                           const ModelLayout& layout) {
    json relations = json::array();
    for (const auto& rel : params) {
        json jr;
        jr["lambda"] = rel.lambda;
        json ti = json::object(), tbi = json::object();
        for (int t : layout.indicator_templates) {
            ti[template_name(static_cast<Tmpl>(t))] = rel.theta_i[t];
            tbi[template_name(static_cast<Tmpl>(t))] = rel.theta_bi[t];
        }
        json ta = json::object(), tba = json::object();
        for (int t : layout.argument_templates) {
            ta[template_name(static_cast<Tmpl>(t))] = rel.theta_a[t];
            tba[template_name(static_cast<Tmpl>(t))] = rel.theta_ba[t];
        }
        jr["theta_i"] = ti;
        jr["theta_bi"] = tbi;
        jr["theta_a"] = ta;
        jr["theta_ba"] = tba;
        relations.push_back(jr);
    }
    return relations;
}

inline json instance_to_json(const RelationInstance& inst) {
    return {{"k", inst.k},
            {"decision_id", inst.decision_id},
            {"da_id", inst.da_id},
            {"da_index", inst.da_index},
            {"indicator_token", inst.indicator_token},
            {"indicator", inst.indicator_surface},
            {"arg_lo", inst.arg_lo},
            {"arg_hi", inst.arg_hi},
            {"argument", inst.argument_text},
            {"probability", inst.probability}};
}

inline RelationInstance instance_from_json(const json& j) {
    RelationInstance inst;
    inst.k = j.at("k").get<int>();
    inst.decision_id = j.at("decision_id").get<std::string>();
    inst.da_id = j.at("da_id").get<std::string>();
    inst.da_index = j.at("da_index").get<int>();
    inst.indicator_token = j.at("indicator_token").get<int>();
    inst.indicator_surface = j.at("indicator").get<std::string>();
    inst.arg_lo = j.at("arg_lo").get<int>();
    inst.arg_hi = j.at("arg_hi").get<int>();
    inst.argument_text = j.at("argument").get<std::string>();
    inst.probability = j.at("probability").get<double>();
    return inst;
}

}  // namespace detail

inline PhaseArtifact make_phase_artifact(const PhaseResult& phase, int k) {
    PhaseArtifact out;
    out.k = k;
    out.free_energy = phase.inference.free_energy;
    out.best_restart = phase.inference.best_restart;
    out.max_violation = phase.inference.final_max_violation;
    out.vocabulary = detail::vocab_to_json(phase.vocab);
    out.params = detail::params_to_json(
        posterior_mean(phase.inference.state.dirichlets, phase.layout),
        phase.layout);
    out.instances = phase.instances;
    return out;
}

inline void save_artifact(const ModelArtifact& artifact,
                          const std::string& path) {
    json root;
    root["format_version"] = artifact.version;
    root["seed"] = artifact.seed;
    root["config"] = artifact.config;
    auto phase_json = [](const PhaseArtifact& p) {
        json j;
        j["k"] = p.k;
        j["free_energy"] = p.free_energy;
        j["best_restart"] = p.best_restart;
        j["max_violation"] = p.max_violation;
        j["vocabulary"] = p.vocabulary;
        j["params"] = p.params;
        j["instances"] = json::array();
        for (const auto& inst : p.instances)
            j["instances"].push_back(detail::instance_to_json(inst));
        return j;
    };
    if (artifact.cue) root["cue"] = phase_json(*artifact.cue);
    if (artifact.content) root["content"] = phase_json(*artifact.content);
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write artifact file: " + path);
    out << root.dump(2) << "\n";
}

inline ModelArtifact load_artifact(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open artifact file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("artifact parse failure: ") + e.what());
    }
    ModelArtifact artifact;
    artifact.version = root.at("format_version").get<int>();
    if (artifact.version != kArtifactVersion)
        throw LoadError("artifact format version " +
                        std::to_string(artifact.version) +
                        " not supported (expected " +
                        std::to_string(kArtifactVersion) + ")");
    artifact.seed = root.at("seed").get<std::uint64_t>();
    artifact.config = root.value("config", json::object());
    auto phase_from = [](const json& j) {
        PhaseArtifact p;
        p.k = j.at("k").get<int>();
        p.free_energy = j.at("free_energy").get<double>();
        p.best_restart = j.at("best_restart").get<int>();
        p.max_violation = j.value("max_violation", 0.0);
        p.vocabulary = j.value("vocabulary", json::object());
        p.params = j.value("params", json::array());
        for (const auto& ji : j.at("instances"))
            p.instances.push_back(detail::instance_from_json(ji));
        return p;
    };
    if (root.contains("cue")) artifact.cue = phase_from(root.at("cue"));
    if (root.contains("content"))
        artifact.content = phase_from(root.at("content"));
    return artifact;
}

// ---------------------------------------------------------------------------
// summary files

inline void save_summaries(const std::vector<Summary>& summaries,
                           const std::string& path) {
    json root;
    root["summaries"] = json::array();
    for (const auto& s : summaries) {
        json j;
        j["decision_id"] = s.decision_id;
        j["method"] = s.method;
        if (!s.items.empty()) {
            j["items"] = json::array();
            for (const auto& inst : s.items)
                j["items"].push_back(detail::instance_to_json(inst));
        }
        if (!s.texts.empty()) j["texts"] = s.texts;
        root["summaries"].push_back(j);
    }
    std::ofstream out(path);
    if (!out) throw LoadError("cannot write summary file: " + path);
    out << root.dump(2) << "\n";
}

inline std::vector<Summary> load_summaries(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw LoadError("cannot open summary file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw LoadError(std::string("summary parse failure: ") + e.what());
    }
    std::vector<Summary> out;
    for (const auto& j : root.at("summaries")) {
        Summary s;
        s.decision_id = j.at("decision_id").get<std::string>();
        s.method = j.value("method", "");
        if (j.contains("items"))
            for (const auto& ji : j.at("items"))
                s.items.push_back(detail::instance_from_json(ji));
        if (j.contains("texts"))
            s.texts = j.at("texts").get<std::vector<std::string>>();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace relexsum
