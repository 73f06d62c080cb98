#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "clir/model.hpp"

namespace clir {

/// Text analysis shared by indexing and querying.
///
/// Text is NFKC-normalized and (optionally) lowercased, then split on
/// whitespace, punctuation, control characters and U+200C (ZWNJ). For `zh`
/// every run of Han characters becomes overlapping character bigrams, or a
/// single unigram when the run has length one; non-Han spans inside a zh
/// text are treated like any other language. No stemming, no stopwords.
struct Analyzer {
    LangTag lang = LangTag::en;
    bool lowercase = true;

    [[nodiscard]] std::vector<std::string> tokenize(std::string_view text) const;
};

/// Convenience wrapper, identical to analyzer.tokenize(text).
[[nodiscard]] inline std::vector<std::string> tokenize(const Analyzer& analyzer, std::string_view text) {
    return analyzer.tokenize(text);
}

}  // namespace clir
