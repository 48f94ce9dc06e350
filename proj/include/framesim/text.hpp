#pragma once
// Small UTF-8 text helpers: case folding and word splitting.
//
// Case folding covers ASCII and the Latin-1 supplement (enough for English and
// Portuguese captions). Other code points pass through untouched.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace framesim::text {

inline std::string fold_case(std::string_view in) {
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const auto c = static_cast<unsigned char>(in[i]);
        if (c >= 'A' && c <= 'Z') {
            out.push_back(static_cast<char>(c + ('a' - 'A')));
        } else if (c == 0xC3 && i + 1 < in.size()) {
            // U+00C0..U+00DE map to U+00E0..U+00FE, except U+00D7 (multiplication sign).
            auto next = static_cast<unsigned char>(in[i + 1]);
            if (next >= 0x80 && next <= 0x9E && next != 0x97) next += 0x20;
            out.push_back(static_cast<char>(c));
            out.push_back(static_cast<char>(next));
            ++i;
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    return out;
}

// Bytes >= 0x80 count as word characters so accented letters stay inside words.
inline bool is_word_byte(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '\'' || c == '-' || c == '_' || c >= 0x80;
}

struct Word {
    std::string_view surface;
    std::size_t offset = 0;  // byte offset into the source text
};

// Splits on whitespace and punctuation. Leading/trailing hyphens and
// apostrophes are trimmed from each word.
inline std::vector<Word> split_words(std::string_view s) {
    std::vector<Word> words;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && !is_word_byte(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t j = i;
        while (j < s.size() && is_word_byte(static_cast<unsigned char>(s[j]))) ++j;
        std::size_t b = i, e = j;
        while (b < e && (s[b] == '\'' || s[b] == '-')) ++b;
        while (e > b && (s[e - 1] == '\'' || s[e - 1] == '-')) --e;
        if (b < e) words.push_back({s.substr(b, e - b), b});
        i = j;
    }
    return words;
}

// Folds case, trims, and collapses runs of whitespace to one space.
inline std::string normalize_lemma(std::string_view in) {
    std::string folded = fold_case(in);
    std::string out;
    out.reserve(folded.size());
    bool pending_space = false;
    for (char c : folded) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

}  // namespace framesim::text
