#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace relexsum {

using StopwordSet = std::unordered_set<std::string>;

// Shipped default list; overridable via --stopwords.
inline const StopwordSet& default_stopwords() {
    static const StopwordSet set = {
        "a", "about", "above", "after", "again", "all", "am", "an", "and",
        "any", "are", "as", "at", "be", "because", "been", "before", "being",
        "below", "between", "both", "but", "by", "can", "could", "did", "do",
        "does", "doing", "down", "during", "each", "few", "for", "from",
        "further", "gonna", "got", "had", "has", "have", "having", "he",
        "her", "here", "hers", "herself", "him", "himself", "his", "how",
        "i", "if", "in", "into", "is", "it", "its", "itself", "just", "like",
        "me", "mean", "more", "most", "my", "myself", "no", "nor", "not",
        "now", "of", "off", "okay", "on", "once", "only", "or", "other",
        "our", "ours", "ourselves", "out", "over", "own", "really", "same",
        "shall", "she", "should", "so", "some", "such", "than", "that",
        "the", "their", "theirs", "them", "themselves", "then", "there",
        "these", "they", "this", "those", "through", "to", "too", "uh",
        "um", "under", "until", "up", "very", "was", "we", "well", "were",
        "what", "when", "where", "which", "while", "who", "whom", "why",
        "will", "with", "would", "yeah", "you", "your", "yours", "yourself",
        "yourselves"};
    return set;
}

inline StopwordSet load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open stopword file: " + path);
    StopwordSet set;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
            line.pop_back();
        if (!line.empty()) set.insert(line);
    }
    return set;
}

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace relexsum
