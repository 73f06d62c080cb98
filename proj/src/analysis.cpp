#include "clir/analysis.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/unistr.h>

namespace clir {

namespace {

constexpr UChar32 kZeroWidthNonJoiner = 0x200C;

const icu::Normalizer2& nfkc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* instance = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || instance == nullptr) {
        throw DataError(std::string("ICU NFKC normalizer unavailable: ") + u_errorName(status));
    }
    return *instance;
}

icu::UnicodeString normalize(const icu::Normalizer2& norm, const icu::UnicodeString& text) {
    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString out = norm.normalize(text, status);
    if (U_FAILURE(status)) throw DataError(std::string("unicode normalization failed: ") + u_errorName(status));
    return out;
}

bool is_separator(UChar32 c) {
    if (c == kZeroWidthNonJoiner) return true;
    if (u_isUWhiteSpace(c)) return true;
    if (u_ispunct(c)) return true;
    return u_charType(c) == U_CONTROL_CHAR;
}

bool is_han(UChar32 c) {
    UErrorCode status = U_ZERO_ERROR;
    return uscript_getScript(c, &status) == USCRIPT_HAN && U_SUCCESS(status);
}

std::string to_utf8(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

void emit_han_run(const icu::UnicodeString& run, std::vector<std::string>& tokens) {
    const int32_t chars = run.countChar32();
    if (chars == 1) {
        tokens.push_back(to_utf8(run));
        return;
    }
    int32_t start = 0;
    for (int32_t i = 0; i + 1 < chars; ++i) {
        const int32_t second = run.moveIndex32(start, 1);
        const int32_t end = run.moveIndex32(second, 1);
        tokens.push_back(to_utf8(icu::UnicodeString(run, start, end - start)));
        start = second;
    }
}

// Splits one separator-free span; zh spans are further divided into Han and
// non-Han runs.
void emit_span(const icu::UnicodeString& span, bool cjk_bigrams, std::vector<std::string>& tokens) {
    if (span.isEmpty()) return;
    if (!cjk_bigrams) {
        tokens.push_back(to_utf8(span));
        return;
    }
    int32_t run_start = 0;
    bool run_is_han = is_han(span.char32At(0));
    int32_t i = 0;
    auto flush = [&](int32_t end) {
        icu::UnicodeString run(span, run_start, end - run_start);
        if (run_is_han) {
            emit_han_run(run, tokens);
        } else {
            tokens.push_back(to_utf8(run));
        }
    };
    while (i < span.length()) {
        const UChar32 c = span.char32At(i);
        const bool han = is_han(c);
        if (han != run_is_han) {
            flush(i);
            run_start = i;
            run_is_han = han;
        }
        i = span.moveIndex32(i, 1);
    }
    flush(span.length());
}

}  // namespace

std::vector<std::string> Analyzer::tokenize(std::string_view text) const {
    std::vector<std::string> tokens;
    if (text.empty()) return tokens;

    const icu::Normalizer2& norm = nfkc();
    icu::UnicodeString s = normalize(
        norm, icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size()))));
    if (lowercase) {
        s.toLower(icu::Locale::getRoot());
        // Lowercasing can leave compatibility forms behind; renormalize so
        // tokenize(join(tokenize(t))) == tokenize(t).
        s = normalize(norm, s);
    }

    const bool cjk_bigrams = lang == LangTag::zh;
    int32_t span_start = 0;
    int32_t i = 0;
    while (i < s.length()) {
        const UChar32 c = s.char32At(i);
        const int32_t next = s.moveIndex32(i, 1);
        if (is_separator(c)) {
            emit_span(icu::UnicodeString(s, span_start, i - span_start), cjk_bigrams, tokens);
            span_start = next;
        }
        i = next;
    }
    emit_span(icu::UnicodeString(s, span_start, s.length() - span_start), cjk_bigrams, tokens);
    return tokens;
}

}  // namespace clir
