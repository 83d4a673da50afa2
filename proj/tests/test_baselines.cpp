#include <doctest.h>

#include <cmath>
#include <set>

#include "fixtures.hpp"
#include "relexsum/baselines.hpp"

using namespace relexsum;

TEST_CASE("tf-idf weights and cosine on a hand example") {
    // two documents: {a, b} and {a, c}; idf(a)=ln(1)=0, idf(b)=idf(c)=ln 2
    Corpus corpus;
    Meeting m;
    m.id = "m";
    m.das.push_back(fixtures::make_da(
        "x1", 0, "A", {"alpha/NN", "beta/NN"}, fixtures::C("NP", 0, 2, 1),
        {}, {}));
    m.das.push_back(fixtures::make_da(
        "x2", 1, "A", {"alpha/NN", "gamma/NN"}, fixtures::C("NP", 0, 2, 1),
        {}, {}));
    corpus.meetings.push_back(m);
    StopwordSet sw;  // none
    IdfTable idf(corpus, sw);
    CHECK(idf.idf("alpha") == doctest::Approx(0.0));
    CHECK(idf.idf("beta") == doctest::Approx(std::log(2.0)));
    CHECK(idf.idf("unseen") == 0.0);

    auto v1 = idf.vectorize(corpus.meetings[0].das[0], sw);
    auto v2 = idf.vectorize(corpus.meetings[0].das[1], sw);
    // alpha has zero weight, so the vectors share nothing
    CHECK(cosine(v1, v2) == doctest::Approx(0.0));
    CHECK(cosine(v1, v1) == doctest::Approx(1.0));
}

TEST_CASE("longest baseline picks the DA with most tokens") {
    auto corpus = fixtures::figure_corpus();
    auto docs = build_decision_documents(corpus);
    auto s = longest_da(docs[1]);  // d2: da_4 has 8 tokens
    CHECK(s.method == "longest");
    REQUIRE(s.texts.size() == 1);
    CHECK(s.texts[0] == "you are gonna have rubber cases and buttons");
    // d3: da_9 (8 tokens) beats da_10 (6)
    CHECK(longest_da(docs[2]).texts[0] ==
          "You could have your company badge and logo");
}

TEST_CASE("prototype baseline returns the most central DA") {
    auto corpus = fixtures::figure_corpus();
    auto docs = build_decision_documents(corpus);
    auto sw = default_stopwords();
    IdfTable idf(corpus, sw);
    auto s = prototype_da(docs[1], idf, sw);
    CHECK(s.method == "prototype");
    REQUIRE(s.texts.size() == 1);
    // deterministic across calls
    CHECK(prototype_da(docs[1], idf, sw).texts == s.texts);
    // stays within the cluster
    bool member = false;
    for (const auto& da : docs[1].das)
        if (da_text(da) == s.texts[0]) member = true;
    CHECK(member);
}

TEST_CASE("prototype falls back to longest on all-stopword clusters") {
    Corpus corpus;
    Meeting m;
    m.id = "m";
    m.decisions = {{"d", "abstract"}};
    m.das.push_back(fixtures::make_da("y1", 0, "A", {"the/DT", "of/IN"},
                                      fixtures::C("X", 0, 2, -1), {}, {"d"}));
    m.das.push_back(fixtures::make_da("y2", 1, "A", {"a/DT"},
                                      fixtures::C("X", 0, 1, -1), {}, {"d"}));
    corpus.meetings.push_back(m);
    auto docs = build_decision_documents(corpus);
    auto sw = default_stopwords();
    IdfTable idf(corpus, sw);
    std::vector<std::string> warnings;
    auto s = prototype_da(docs[0], idf, sw, &warnings);
    CHECK(s.method == "prototype");
    CHECK(s.texts[0] == "the of");  // the longest DA
    CHECK(warnings.size() == 1);
}

TEST_CASE("agglomerative clustering merges similar DAs") {
    auto corpus = fixtures::figure_corpus();
    auto sw = default_stopwords();
    ClusterConfig config;
    config.threshold = 0.3;
    auto clusters = cluster_drdas(corpus.meetings[0], corpus, sw, config);
    // every decision-related DA is assigned
    CHECK(clusters.size() == corpus.meetings[0].das.size());
    for (const auto& [da, c] : clusters)
        CHECK(c.rfind("m1_c", 0) == 0);
    // "Shall we go for single curve" and "We'll go for single curve yeah"
    // share almost all content words
    CHECK(clusters.at("da_6") == clusters.at("da_7"));
    // unrelated DAs stay apart
    CHECK(clusters.at("da_1") != clusters.at("da_6"));
    // deterministic
    CHECK(cluster_drdas(corpus.meetings[0], corpus, sw, config) == clusters);
}

TEST_CASE("threshold 1.0 keeps everything separate") {
    auto corpus = fixtures::figure_corpus();
    auto sw = default_stopwords();
    ClusterConfig config;
    config.threshold = 1.01;
    auto clusters = cluster_drdas(corpus.meetings[0], corpus, sw, config);
    std::set<std::string> ids;
    for (const auto& [da, c] : clusters) ids.insert(c);
    CHECK(ids.size() == clusters.size());
}
