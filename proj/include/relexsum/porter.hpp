#pragma once

// Porter stemming algorithm (Porter, 1980). Operates on lowercase ASCII
// words; non-alphabetic input is returned unchanged.

#include <string>
#include <string_view>

namespace relexsum::porter {

namespace detail {

inline bool is_vowel_at(const std::string& w, size_t i) {
    switch (w[i]) {
        case 'a': case 'e': case 'i': case 'o': case 'u':
            return true;
        case 'y':
            // y is a vowel when preceded by a consonant
            return i > 0 && !is_vowel_at(w, i - 1);
        default:
            return false;
    }
}

// Measure m of the prefix w[0..len): number of VC sequences.
inline int measure(const std::string& w, size_t len) {
    int m = 0;
    size_t i = 0;
    while (i < len && !is_vowel_at(w, i)) ++i;  // leading consonants
    while (i < len) {
        while (i < len && is_vowel_at(w, i)) ++i;
        if (i >= len) break;
        ++m;
        while (i < len && !is_vowel_at(w, i)) ++i;
    }
    return m;
}

inline bool has_vowel(const std::string& w, size_t len) {
    for (size_t i = 0; i < len; ++i)
        if (is_vowel_at(w, i)) return true;
    return false;
}

inline bool ends_with(const std::string& w, std::string_view suf) {
    return w.size() >= suf.size() &&
           std::string_view(w).substr(w.size() - suf.size()) == suf;
}

inline bool double_consonant(const std::string& w) {
    size_t n = w.size();
    if (n < 2 || w[n - 1] != w[n - 2]) return false;
    return !is_vowel_at(w, n - 1);
}

// *o: stem ends cvc where the final c is not w, x or y.
inline bool cvc(const std::string& w, size_t len) {
    if (len < 3) return false;
    if (is_vowel_at(w, len - 1) || !is_vowel_at(w, len - 2) ||
        is_vowel_at(w, len - 3))
        return false;
    char c = w[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
}

// Replace suffix `suf` with `rep` if measure of the remaining stem > m_gt.
inline bool replace_if(std::string& w, std::string_view suf,
                       std::string_view rep, int m_gt) {
    if (!ends_with(w, suf)) return false;
    size_t stem_len = w.size() - suf.size();
    if (measure(w, stem_len) > m_gt) {
        w.resize(stem_len);
        w.append(rep);
        return true;
    }
    return false;
}

}  // namespace detail

inline std::string stem(std::string w) {
    using namespace detail;
    for (char c : w)
        if (c < 'a' || c > 'z') return w;
    if (w.size() <= 2) return w;

    // Step 1a
    if (ends_with(w, "sses")) w.resize(w.size() - 2);
    else if (ends_with(w, "ies")) w.resize(w.size() - 2);
    else if (ends_with(w, "ss")) {}
    else if (ends_with(w, "s")) w.resize(w.size() - 1);

    // Step 1b
    bool did_1b_fixup = false;
    if (ends_with(w, "eed")) {
        if (measure(w, w.size() - 3) > 0) w.resize(w.size() - 1);
    } else if (ends_with(w, "ed") && has_vowel(w, w.size() - 2)) {
        w.resize(w.size() - 2);
        did_1b_fixup = true;
    } else if (ends_with(w, "ing") && has_vowel(w, w.size() - 3)) {
        w.resize(w.size() - 3);
        did_1b_fixup = true;
    }
    if (did_1b_fixup) {
        if (ends_with(w, "at") || ends_with(w, "bl") || ends_with(w, "iz")) {
            w.push_back('e');
        } else if (double_consonant(w) && !ends_with(w, "l") &&
                   !ends_with(w, "s") && !ends_with(w, "z")) {
            w.resize(w.size() - 1);
        } else if (measure(w, w.size()) == 1 && cvc(w, w.size())) {
            w.push_back('e');
        }
    }

    // Step 1c
    if (ends_with(w, "y") && has_vowel(w, w.size() - 1)) w.back() = 'i';

    // Step 2
    static constexpr std::pair<std::string_view, std::string_view> step2[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},
        {"anci", "ance"},   {"izer", "ize"},    {"abli", "able"},
        {"alli", "al"},     {"entli", "ent"},   {"eli", "e"},
        {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
        {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},
        {"iviti", "ive"},   {"biliti", "ble"}};
    for (auto [suf, rep] : step2)
        if (ends_with(w, suf)) { replace_if(w, suf, rep, 0); break; }

    // Step 3
    static constexpr std::pair<std::string_view, std::string_view> step3[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""}};
    for (auto [suf, rep] : step3)
        if (ends_with(w, suf)) { replace_if(w, suf, rep, 0); break; }

    // Step 4
    static constexpr std::string_view step4[] = {
        "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement",
        "ment", "ent", "ou", "ism", "ate", "iti", "ous", "ive", "ize"};
    for (auto suf : step4) {
        if (!ends_with(w, suf)) continue;
        size_t stem_len = w.size() - suf.size();
        if (measure(w, stem_len) > 1) w.resize(stem_len);
        break;
    }
    // "ion" only after s or t
    if (ends_with(w, "ion") && w.size() >= 4) {
        char c = w[w.size() - 4];
        if ((c == 's' || c == 't') && measure(w, w.size() - 3) > 1)
            w.resize(w.size() - 3);
    }

    // Step 5a
    if (ends_with(w, "e")) {
        size_t stem_len = w.size() - 1;
        int m = measure(w, stem_len);
        if (m > 1 || (m == 1 && !cvc(w, stem_len))) w.resize(stem_len);
    }
    // Step 5b
    if (double_consonant(w) && ends_with(w, "l") && measure(w, w.size()) > 1)
        w.resize(w.size() - 1);

    return w;
}

}  // namespace relexsum::porter
