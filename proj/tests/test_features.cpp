#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fixtures.hpp"
#include "relexsum/features.hpp"

using namespace relexsum;

namespace {
std::vector<DecisionDocument> docs() {
    static auto corpus = fixtures::figure_corpus();
    return build_decision_documents(corpus);
}
}  // namespace

TEST_CASE("indicator features on a verb") {
    auto dd = docs()[1];                    // d2
    IndicatorCandidate cand{1, 2};          // da_5 "require"
    FeatureOptions opts{Phase::Cue, false};
    auto fv = indicator_features(dd, cand, opts);
    CHECK(*fv.get(Tmpl::UnigramStem) == "requir");
    CHECK(*fv.get(Tmpl::Pos) == "VBP");
    CHECK(*fv.get(Tmpl::ConstituentLabel) == "VP");
    REQUIRE(fv.get(Tmpl::DependencyLabel));
    CHECK(*fv.get(Tmpl::DependencyLabel) == "root");
    CHECK(*fv.get(Tmpl::DaType) == "inform");
    CHECK(*fv.get(Tmpl::SpeakerRole) == "participant");
    CHECK(*fv.get(Tmpl::ApPresent) == "false");
    // cue phase must not emit content templates
    CHECK(fv.get(Tmpl::ClausePosition) == nullptr);
    CHECK(fv.get(Tmpl::PositionToFirstCue) == nullptr);
}

TEST_CASE("coarse POS collapses Penn tags") {
    CHECK(coarse_pos("VBP") == "v");
    CHECK(coarse_pos("NNS") == "n");
    CHECK(coarse_pos("JJR") == "a");
    CHECK(coarse_pos("RB") == "r");
    CHECK(coarse_pos("DT") == "");
    auto dd = docs()[1];
    FeatureOptions opts{Phase::Cue, true};
    auto fv = indicator_features(dd, IndicatorCandidate{1, 2}, opts);
    CHECK(*fv.get(Tmpl::Pos) == "v");
}

TEST_CASE("adjacency-pair templates fire only on the right part") {
    auto dd = docs()[1];
    FeatureOptions opts{Phase::Cue, false};
    // da_6 "Shall we go for single curve" is an AP source
    auto src = indicator_features(dd, IndicatorCandidate{2, 2}, opts);
    CHECK(*src.get(Tmpl::ApPresent) == "true");
    CHECK(*src.get(Tmpl::ApType) == "assess");
    CHECK(*src.get(Tmpl::ApPart) == "source");
    CHECK(src.get(Tmpl::ApSourceIsQuestion) == nullptr);
    // da_7 is the target with positive feedback
    auto tgt = indicator_features(dd, IndicatorCandidate{3, 2}, opts);
    CHECK(*tgt.get(Tmpl::ApPart) == "target");
    REQUIRE(tgt.get(Tmpl::ApSourceIsQuestion));
    CHECK(*tgt.get(Tmpl::ApSourceIsQuestion) == "true");
}

TEST_CASE("argument features describe the constituent") {
    auto dd = docs()[1];
    auto [indicators, arguments] = extract_candidates(dd);
    const ArgumentCandidate* rubber_case = nullptr;
    for (const auto& a : arguments)
        if (a.da_index == 1 && argument_text(dd, a) == "rubber case")
            rubber_case = &a;
    REQUIRE(rubber_case);
    FeatureOptions opts{Phase::Cue, false};
    auto sw = default_stopwords();
    auto fv = argument_features(dd, *rubber_case, opts, nullptr, nullptr, &sw);
    CHECK(*fv.get(Tmpl::ConstituentLabel) == "NP");
    CHECK(*fv.get(Tmpl::UnigramStem) == "case");  // headword
    CHECK(*fv.get(Tmpl::ArgNumWords) == "2");
    CHECK(*fv.get(Tmpl::ArgHasCapitalized) == "false");
    CHECK(*fv.get(Tmpl::ArgHasProperNoun) == "false");
}

TEST_CASE("content-phase features require a cue context") {
    auto dd = docs()[0];
    FeatureOptions opts{Phase::Content, false};
    CHECK_THROWS_AS(indicator_features(dd, IndicatorCandidate{0, 2}, opts),
                    std::invalid_argument);
    CueContext ctx;
    auto fv = indicator_features(dd, IndicatorCandidate{0, 2}, opts, &ctx);
    // no cue in the document: everything counts as before the first cue
    CHECK(*fv.get(Tmpl::PositionToFirstCue) == "before");
    CHECK(fv.get(Tmpl::ClausePosition) != nullptr);
}

TEST_CASE("position relative to the first cue") {
    auto dd = docs()[0];  // da_1, da_2, da_3
    FeatureOptions opts{Phase::Content, false};
    CueContext ctx;
    ctx.cues.push_back({1, 3});  // cue at da_2 token "be"
    auto before = indicator_features(dd, IndicatorCandidate{0, 2}, opts, &ctx);
    CHECK(*before.get(Tmpl::PositionToFirstCue) == "before");
    auto same = indicator_features(dd, IndicatorCandidate{1, 3}, opts, &ctx);
    CHECK(*same.get(Tmpl::PositionToFirstCue) == "before");
    auto after = indicator_features(dd, IndicatorCandidate{1, 6}, opts, &ctx);
    CHECK(*after.get(Tmpl::PositionToFirstCue) == "after");
    auto later_da = indicator_features(dd, IndicatorCandidate{2, 1}, opts, &ctx);
    CHECK(*later_da.get(Tmpl::PositionToFirstCue) == "after");
}

TEST_CASE("pronoun-only spans are recognized") {
    auto dd = docs()[2];  // d3
    auto [indicators, arguments] = extract_candidates(dd);
    auto sw = default_stopwords();
    int pronoun_only = 0, content = 0;
    for (const auto& a : arguments) {
        if (is_pronoun_only(dd, a, sw))
            ++pronoun_only;
        else
            ++content;
    }
    CHECK(pronoun_only == 2);  // NP[You], NP[it]
    CHECK(content == 6);
}

TEST_CASE("hypernym lexicon features") {
    auto path = std::filesystem::temp_directory_path() / "relexsum_lex.tsv";
    std::ofstream(path) << "case\tn\tcase.n.01\tcontainer>artifact>object\n";
    auto lex = load_lexicon(path.string());
    std::filesystem::remove(path);

    auto dd = docs()[1];
    FeatureOptions opts{Phase::Cue, false};
    auto fv = indicator_features(dd, IndicatorCandidate{1, 4}, opts, nullptr,
                                 &lex);  // "case"
    REQUIRE(fv.get(Tmpl::WnFirstSynset));
    CHECK(*fv.get(Tmpl::WnFirstSynset) == "case.n.01");
    CHECK(*fv.get(Tmpl::WnHypernymPath) == "container>artifact>object");
    // no entry for "require"
    auto miss = indicator_features(dd, IndicatorCandidate{1, 2}, opts, nullptr,
                                   &lex);
    CHECK(miss.get(Tmpl::WnFirstSynset) == nullptr);
}

TEST_CASE("vocabulary construction is deterministic and typed") {
    auto ds = docs();
    FeatureOptions opts{Phase::Content, false};
    auto sw = default_stopwords();
    auto v1 = build_vocabulary(ds, opts, nullptr, &sw);
    auto v2 = build_vocabulary(ds, opts, nullptr, &sw);
    for (int t = 0; t < kNumTemplates; ++t) {
        Tmpl tmpl = static_cast<Tmpl>(t);
        REQUIRE(v1.cardinality(tmpl) == v2.cardinality(tmpl));
        for (int v = 0; v < v1.cardinality(tmpl); ++v)
            CHECK(v1.value(tmpl, v) == v2.value(tmpl, v));
    }
    // closed sets are registered up front
    CHECK(v1.cardinality(Tmpl::PositionToFirstCue) == 2);
    CHECK(v1.cardinality(Tmpl::ClausePosition) == 3);
    CHECK(v1.lookup(Tmpl::UnigramStem, "requir") >= 0);
    CHECK(v1.lookup(Tmpl::UnigramStem, "nonexistent") == -1);
}

TEST_CASE("clause position is computed over top-level clauses") {
    auto da = fixtures::make_da(
        "x", 0, "A",
        {"go/VB", "left/RB", "then/RB", "go/VB", "right/RB"},
        fixtures::C("S", 0, 5, 0,
                    {fixtures::C("S", 0, 2, 0), fixtures::C("S", 2, 5, 3)}),
        {fixtures::dep("root", kRootSentinel, 0)}, {});
    DecisionDocument dd;
    dd.decision_id = "x";
    dd.das.push_back(da);
    CHECK(detail::clause_position(dd.das[0], 0) == "first");
    CHECK(detail::clause_position(dd.das[0], 3) == "second");
}
