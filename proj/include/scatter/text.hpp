#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <vector>

namespace scatter::text {

// Tokenization rule shared by the coupling and similarity scores:
// lowercase, split on runs of non-alphanumeric bytes, no stemming.
inline std::vector<std::string> tokenize(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline std::set<std::string> token_set(const std::string& s) {
    auto toks = tokenize(s);
    return {toks.begin(), toks.end()};
}

inline std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline bool contains_whitespace(const std::string& s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

// Lowercase slug: [a-z0-9] plus interior '-' / '_'.
inline bool is_slug(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s) {
        if (!(std::islower(c) || std::isdigit(c) || c == '-' || c == '_')) return false;
    }
    return std::isalnum(static_cast<unsigned char>(s.front())) != 0;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

// First non-empty line, for condensing free-form replies into one-line summaries.
inline std::string first_line(const std::string& s) {
    std::size_t start = 0;
    while (start < s.size()) {
        std::size_t end = s.find('\n', start);
        if (end == std::string::npos) end = s.size();
        std::string line = trim(s.substr(start, end - start));
        if (!line.empty()) return line;
        start = end + 1;
    }
    return "";
}

} // namespace scatter::text
