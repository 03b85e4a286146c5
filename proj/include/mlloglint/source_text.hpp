#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlloglint/errors.hpp"

namespace mlloglint {

/// Immutable view over one file's bytes with a line-offset table.
///
/// The stored text is exactly what was read from disk (minus an optional
/// UTF-8 BOM), so slicing by line reproduces source bytes verbatim.
/// Lines are 1-based throughout. Recognizes \n, \r\n and lone \r endings.
class SourceText {
public:
    SourceText() = default;

    explicit SourceText(std::string bytes) : text_(std::move(bytes)) {
        if (text_.find('\0') != std::string::npos)
            throw EncodingError("source contains NUL byte");
        if (text_.size() >= 3 && static_cast<unsigned char>(text_[0]) == 0xEF &&
            static_cast<unsigned char>(text_[1]) == 0xBB &&
            static_cast<unsigned char>(text_[2]) == 0xBF) {
            had_bom_ = true;
            text_.erase(0, 3);
        }
        utf8_ = looks_like_utf8(text_);
        build_index();
    }

    const std::string& text() const { return text_; }
    bool had_bom() const { return had_bom_; }
    /// False means the bytes are not valid UTF-8; callers treat them as
    /// latin-1 and should surface a warning.
    bool is_utf8() const { return utf8_; }

    int line_count() const { return static_cast<int>(line_starts_.size()); }

    /// Raw content of a 1-based line, excluding the line terminator.
    std::string_view line(int lineno) const {
        if (lineno < 1 || lineno > line_count())
            throw OutOfRange("line " + std::to_string(lineno) + " out of range [1," +
                             std::to_string(line_count()) + "]");
        std::size_t begin = line_starts_[static_cast<std::size_t>(lineno - 1)];
        std::size_t end = line_ends_[static_cast<std::size_t>(lineno - 1)];
        return std::string_view(text_).substr(begin, end - begin);
    }

    /// Lines [first, last] joined with '\n', terminators normalized away.
    std::string slice_lines(int first, int last) const {
        std::string out;
        for (int i = first; i <= last; ++i) {
            if (i > first) out.push_back('\n');
            out += std::string(line(i));
        }
        return out;
    }

    /// Raw text of the lines adjacent to `lineno`; absent at file edges.
    std::pair<std::optional<std::string>, std::optional<std::string>>
    neighbor_lines(int lineno) const {
        if (lineno < 1 || lineno > line_count())
            throw OutOfRange("line " + std::to_string(lineno) + " out of range");
        std::optional<std::string> before, after;
        if (lineno > 1) before = std::string(line(lineno - 1));
        if (lineno < line_count()) after = std::string(line(lineno + 1));
        return {before, after};
    }

private:
    void build_index() {
        line_starts_.clear();
        line_ends_.clear();
        if (text_.empty()) {
            line_starts_.push_back(0);
            line_ends_.push_back(0);
            return;
        }
        std::size_t start = 0;
        for (std::size_t i = 0; i < text_.size(); ++i) {
            char c = text_[i];
            if (c == '\n' || c == '\r') {
                line_starts_.push_back(start);
                line_ends_.push_back(i);
                if (c == '\r' && i + 1 < text_.size() && text_[i + 1] == '\n') ++i;
                start = i + 1;
            }
        }
        if (start <= text_.size()) {
            line_starts_.push_back(start);
            line_ends_.push_back(text_.size());
        }
    }

    static bool looks_like_utf8(std::string_view s) {
        std::size_t i = 0;
        while (i < s.size()) {
            unsigned char c = static_cast<unsigned char>(s[i]);
            int extra = 0;
            if (c < 0x80) { ++i; continue; }
            else if ((c >> 5) == 0x6) extra = 1;
            else if ((c >> 4) == 0xE) extra = 2;
            else if ((c >> 3) == 0x1E) extra = 3;
            else return false;
            if (i + static_cast<std::size_t>(extra) >= s.size()) return false;
            for (int k = 1; k <= extra; ++k)
                if ((static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]) >> 6) != 0x2)
                    return false;
            i += static_cast<std::size_t>(extra) + 1;
        }
        return true;
    }

    std::string text_;
    std::vector<std::size_t> line_starts_;
    std::vector<std::size_t> line_ends_;
    bool had_bom_ = false;
    bool utf8_ = true;
};

}  // namespace mlloglint
