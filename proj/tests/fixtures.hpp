#pragma once

// Shared test fixture: a small meeting transcript with three decisions,
// parse trees, dependencies, and gold abstracts. Document d2 groups five
// dialogue acts; d1 three; d3 two.

#include <string>
#include <vector>

#include "relexsum/corpus.hpp"
#include "relexsum/porter.hpp"

namespace fixtures {

using namespace relexsum;

inline std::vector<Token> toks(const std::vector<std::string>& specs) {
    std::vector<Token> out;
    for (const auto& spec : specs) {
        auto slash = spec.rfind('/');
        Token t;
        t.index = static_cast<int>(out.size());
        t.surface = spec.substr(0, slash);
        t.pos = spec.substr(slash + 1);
        t.stem = porter::stem(to_lower(t.surface));
        out.push_back(std::move(t));
    }
    return out;
}

inline ConstituentNode C(std::string label, int lo, int hi, int head,
                         std::vector<ConstituentNode> children = {}) {
    ConstituentNode n;
    n.label = std::move(label);
    n.lo = lo;
    n.hi = hi;
    if (head >= 0) n.head = head;
    n.children = std::move(children);
    return n;
}

inline DependencyEdge dep(std::string rel, int head, int dependent) {
    return {std::move(rel), head, dependent};
}

inline DialogueAct make_da(std::string id, int order, std::string speaker,
                           const std::vector<std::string>& token_specs,
                           ConstituentNode parse,
                           std::vector<DependencyEdge> deps,
                           std::vector<std::string> decisions) {
    DialogueAct da;
    da.id = std::move(id);
    da.meeting_id = "m1";
    da.order = order;
    da.speaker = std::move(speaker);
    da.speaker_role = "participant";
    da.da_type = "inform";
    da.topic = "design";
    da.tokens = toks(token_specs);
    da.parse = std::move(parse);
    da.deps = std::move(deps);
    da.decision_ids = std::move(decisions);
    return da;
}

inline Corpus figure_corpus() {
    Meeting m;
    m.id = "m1";
    m.decisions = {
        {"d1", "The group decided to make the standby button in the shape "
               "of an apple."},
        {"d2", "The remote will also feature a rubber case and rubber "
               "buttons, and a single curved design."},
        {"d3", "The remote will feature the company logo, possibly in a "
               "sticker form."}};

    // decision 1
    m.das.push_back(make_da(
        "da_1", 0, "C",
        {"the/DT", "standby/NN", "button/NN", "is/VBZ", "quite/RB",
         "separate/JJ"},
        C("S", 0, 6, 3, {C("NP", 0, 3, 2), C("VP", 3, 6, 3)}),
        {dep("root", kRootSentinel, 3), dep("nsubj", 3, 2), dep("det", 2, 0),
         dep("nn", 2, 1), dep("acomp", 3, 5), dep("advmod", 5, 4)},
        {"d1"}));
    m.das.push_back(make_da(
        "da_2", 1, "C",
        {"Maybe/RB", "that/DT", "could/MD", "be/VB", "a/DT", "little/JJ",
         "apple/NN"},
        C("S", 0, 7, 3,
          {C("NP", 1, 2, 1), C("VP", 2, 7, 3, {C("NP", 4, 7, 6)})}),
        {dep("root", kRootSentinel, 3), dep("advmod", 3, 0), dep("nsubj", 3, 1),
         dep("aux", 3, 2), dep("attr", 3, 6), dep("det", 6, 4),
         dep("amod", 6, 5)},
        {"d1"}));
    m.das.push_back(make_da(
        "da_3", 9, "D",
        {"Could/MD", "be/VB", "a/DT", "red/JJ", "apple/NN", "yeah/UH"},
        C("S", 0, 6, 1, {C("VP", 1, 5, 1, {C("NP", 2, 5, 4)})}),
        {dep("root", kRootSentinel, 1), dep("aux", 1, 0), dep("attr", 1, 4),
         dep("det", 4, 2), dep("amod", 4, 3), dep("intj", 1, 5)},
        {"d1"}));

    // decision 2
    m.das.push_back(make_da(
        "da_4", 2, "C",
        {"you/PRP", "are/VBP", "gonna/VBG", "have/VB", "rubber/NN",
         "cases/NNS", "and/CC", "buttons/NNS"},
        C("S", 0, 8, 3,
          {C("NP", 0, 1, 0),
           C("VP", 1, 8, 3, {C("NP", 4, 6, 5), C("NP", 7, 8, 7)})}),
        {dep("root", kRootSentinel, 3), dep("nsubj", 3, 0), dep("aux", 3, 1),
         dep("aux", 3, 2), dep("dobj", 3, 5), dep("nn", 5, 4), dep("cc", 5, 6),
         dep("conj", 5, 7)},
        {"d2"}));
    m.das.push_back(make_da(
        "da_5", 3, "A",
        {"Rubber/NN", "buttons/NNS", "require/VBP", "rubber/NN", "case/NN"},
        C("S", 0, 5, 2,
          {C("NP", 0, 2, 1), C("VP", 2, 5, 2, {C("NP", 3, 5, 4)})}),
        {dep("root", kRootSentinel, 2), dep("nsubj", 2, 1), dep("nn", 1, 0),
         dep("dobj", 2, 4), dep("nn", 4, 3)},
        {"d2"}));
    {
        DialogueAct da = make_da(
            "da_6", 6, "C",
            {"Shall/MD", "we/PRP", "go/VB", "for/IN", "single/JJ",
             "curve/NN"},
            C("S", 0, 6, 2,
              {C("NP", 1, 2, 1),
               C("VP", 2, 6, 2, {C("PP", 3, 6, 5, {C("NP", 4, 6, 5)})})}),
            {dep("root", kRootSentinel, 2), dep("aux", 2, 0),
             dep("nsubj", 2, 1), dep("prep", 2, 3), dep("pobj", 3, 5),
             dep("amod", 5, 4)},
            {"d2"});
        AdjacencyPairInfo ap;
        ap.ap_type = "assess";
        ap.part = "source";
        ap.other_da_id = "da_7";
        ap.target_is_positive_feedback = true;
        da.adjacency_pair = ap;
        m.das.push_back(std::move(da));
    }
    {
        DialogueAct da = make_da(
            "da_7", 7, "B",
            {"We/PRP", "will/MD", "go/VB", "for/IN", "single/JJ", "curve/NN",
             "yeah/UH"},
            C("S", 0, 7, 2,
              {C("NP", 0, 1, 0),
               C("VP", 2, 7, 2, {C("PP", 3, 6, 5, {C("NP", 4, 6, 5)})})}),
            {dep("root", kRootSentinel, 2), dep("nsubj", 2, 0),
             dep("aux", 2, 1), dep("prep", 2, 3), dep("pobj", 3, 5),
             dep("amod", 5, 4), dep("intj", 2, 6)},
            {"d2"});
        AdjacencyPairInfo ap;
        ap.ap_type = "assess";
        ap.part = "target";
        ap.other_da_id = "da_6";
        ap.source_is_question = true;
        da.adjacency_pair = ap;
        m.das.push_back(std::move(da));
    }
    m.das.push_back(make_da(
        "da_8", 8, "C",
        {"the/DT", "rubber/NN", "push/NN", "buttons/NNS", "rubber/NN",
         "case/NN"},
        C("NP", 0, 6, 3, {C("NP", 0, 4, 3), C("NP", 4, 6, 5)}),
        {dep("root", kRootSentinel, 3), dep("det", 3, 0), dep("nn", 3, 1),
         dep("nn", 3, 2), dep("appos", 3, 5), dep("nn", 5, 4)},
        {"d2"}));

    // decision 3
    m.das.push_back(make_da(
        "da_9", 4, "A",
        {"You/PRP", "could/MD", "have/VB", "your/PRP$", "company/NN",
         "badge/NN", "and/CC", "logo/NN"},
        C("S", 0, 8, 2,
          {C("NP", 0, 1, 0),
           C("VP", 2, 8, 2, {C("NP", 3, 6, 5), C("NP", 7, 8, 7)})}),
        {dep("root", kRootSentinel, 2), dep("nsubj", 2, 0), dep("aux", 2, 1),
         dep("dobj", 2, 5), dep("poss", 5, 3), dep("nn", 5, 4),
         dep("cc", 5, 6), dep("conj", 5, 7)},
        {"d3"}));
    m.das.push_back(make_da(
        "da_10", 5, "A",
        {"it/PRP", "has/VBZ", "a/DT", "stick/NN", "on/IN", "badge/NN"},
        C("S", 0, 6, 1,
          {C("NP", 0, 1, 0),
           C("VP", 1, 6, 1,
             {C("NP", 2, 6, 3,
                {C("NP", 2, 4, 3), C("PP", 4, 6, 5, {C("NP", 5, 6, 5)})})})}),
        {dep("root", kRootSentinel, 1), dep("nsubj", 1, 0), dep("dobj", 1, 3),
         dep("det", 3, 2), dep("prep", 3, 4), dep("pobj", 4, 5)},
        {"d3"}));

    Corpus corpus;
    corpus.meetings.push_back(std::move(m));
    return corpus;
}

}  // namespace fixtures
