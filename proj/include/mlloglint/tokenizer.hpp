#pragma once

#include <algorithm>
#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "mlloglint/errors.hpp"
#include "mlloglint/source_text.hpp"

namespace mlloglint {

/// One fragment of a (possibly formatted) string literal: either literal
/// text or the source text of an interpolation placeholder.
struct StrPiece {
    bool placeholder = false;
    std::string text;
};

struct Token {
    enum class Kind { Name, Number, String, Op, Newline, Indent, Dedent, End };

    Kind kind = Kind::End;
    std::string text;
    int line = 1;
    int col = 0;

    // String literal extras.
    bool fstring = false;
    bool bytes = false;
    bool raw = false;
    std::vector<StrPiece> pieces;

    bool is_op(std::string_view s) const { return kind == Kind::Op && text == s; }
    bool is_name(std::string_view s) const { return kind == Kind::Name && text == s; }
};

/// Indentation-aware tokenizer for Python 3 source. Operates on raw bytes:
/// bytes >= 0x80 are accepted as identifier or string content, so the
/// original file text never needs transcoding.
class Tokenizer {
public:
    Tokenizer(std::string_view src, std::string path)
        : src_(src), path_(std::move(path)) {}

    std::vector<Token> tokenize() {
        indents_.assign(1, 0);
        while (pos_ < src_.size() || !at_line_start_) {
            if (at_line_start_ && paren_depth_ == 0) {
                if (!handle_line_start()) break;
                continue;
            }
            if (pos_ >= src_.size()) break;
            scan_token();
        }
        if (emitted_on_line_) emit(Token::Kind::Newline, "");
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(Token::Kind::Dedent, "");
        }
        emit(Token::Kind::End, "");
        return std::move(tokens_);
    }

private:
    // --- low-level cursor helpers -----------------------------------------

    char peek(std::size_t ahead = 0) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    char advance() {
        char c = src_[pos_++];
        ++col_;
        return c;
    }

    bool at_eof() const { return pos_ >= src_.size(); }

    void consume_newline() {
        if (peek() == '\r') {
            ++pos_;
            if (peek() == '\n') ++pos_;
        } else if (peek() == '\n') {
            ++pos_;
        }
        ++line_;
        col_ = 0;
    }

    bool at_newline() const { return peek() == '\n' || peek() == '\r'; }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(path_, line_, msg); }

    void emit(Token::Kind kind, std::string text) {
        Token t;
        t.kind = kind;
        t.text = std::move(text);
        t.line = line_;
        t.col = col_;
        tokens_.push_back(std::move(t));
    }

    // --- line structure ----------------------------------------------------

    /// Measures indentation and emits Indent/Dedent; returns false at EOF.
    bool handle_line_start() {
        while (true) {
            if (at_eof()) return false;
            int width = 0;
            std::size_t scan = pos_;
            while (scan < src_.size()) {
                char c = src_[scan];
                if (c == ' ') { ++width; ++scan; }
                else if (c == '\t') { width += 8 - width % 8; ++scan; }
                else if (c == '\f') { ++scan; }
                else break;
            }
            // Blank and comment-only lines produce no tokens at all.
            if (scan >= src_.size()) { pos_ = scan; return false; }
            char c = src_[scan];
            if (c == '\n' || c == '\r') {
                pos_ = scan;
                consume_newline();
                continue;
            }
            if (c == '#') {
                pos_ = scan;
                skip_to_eol();
                consume_newline();
                continue;
            }
            pos_ = scan;
            col_ = width;
            if (width > indents_.back()) {
                indents_.push_back(width);
                emit(Token::Kind::Indent, "");
            } else {
                while (width < indents_.back()) {
                    indents_.pop_back();
                    emit(Token::Kind::Dedent, "");
                }
                if (width != indents_.back()) fail("unindent does not match any outer indentation level");
            }
            at_line_start_ = false;
            emitted_on_line_ = false;
            return true;
        }
    }

    void skip_to_eol() {
        while (!at_eof() && !at_newline()) ++pos_;
    }

    void end_logical_line() {
        consume_newline();
        if (paren_depth_ == 0) {
            if (emitted_on_line_) emit(Token::Kind::Newline, "");
            at_line_start_ = true;
        }
    }

    // --- token scanning ----------------------------------------------------

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
               static_cast<unsigned char>(c) >= 0x80;
    }
    static bool ident_cont(char c) {
        return ident_start(c) || std::isdigit(static_cast<unsigned char>(c));
    }

    void scan_token() {
        char c = peek();
        if (c == ' ' || c == '\t' || c == '\f') { advance(); return; }
        if (c == '#') { skip_to_eol(); return; }
        if (c == '\\' ) {
            std::size_t scan = pos_ + 1;
            if (scan >= src_.size() || src_[scan] == '\n' || src_[scan] == '\r') {
                ++pos_;
                consume_newline();
                if (at_eof() && paren_depth_ == 0) at_line_start_ = true;
                return;
            }
            fail("unexpected character after line continuation");
        }
        if (at_newline()) { end_logical_line(); return; }
        if (ident_start(c)) { scan_name_or_string(); return; }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            scan_number();
            return;
        }
        if (c == '\'' || c == '"') { scan_string(false, false, false); return; }
        scan_operator();
    }

    void scan_name_or_string() {
        int start_col = col_;
        std::size_t start = pos_;
        while (!at_eof() && ident_cont(peek())) advance();
        std::string word(src_.substr(start, pos_ - start));
        // String prefix? (r, b, u, f and two-letter combinations)
        if (word.size() <= 2 && (peek() == '\'' || peek() == '"')) {
            bool raw = false, byte = false, fstr = false, valid = true;
            for (char pc : word) {
                switch (std::tolower(static_cast<unsigned char>(pc))) {
                    case 'r': raw = true; break;
                    case 'b': byte = true; break;
                    case 'f': fstr = true; break;
                    case 'u': break;
                    default: valid = false;
                }
            }
            if (valid && !(byte && fstr)) {
                scan_string(raw, byte, fstr);
                return;
            }
        }
        Token t;
        t.kind = Token::Kind::Name;
        t.text = std::move(word);
        t.line = line_;
        t.col = start_col;
        tokens_.push_back(std::move(t));
        emitted_on_line_ = true;
    }

    void scan_number() {
        int start_col = col_;
        std::size_t start = pos_;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' ||
                              peek(1) == 'O' || peek(1) == 'b' || peek(1) == 'B')) {
            advance();
            advance();
            while (!at_eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                advance();
        } else {
            while (!at_eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_'))
                advance();
            if (peek() == '.') {
                advance();
                while (!at_eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_'))
                    advance();
            }
            if (peek() == 'e' || peek() == 'E') {
                std::size_t save = pos_;
                int save_col = col_;
                advance();
                if (peek() == '+' || peek() == '-') advance();
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    while (!at_eof() && std::isdigit(static_cast<unsigned char>(peek()))) advance();
                } else {
                    pos_ = save;
                    col_ = save_col;
                }
            }
            if (peek() == 'j' || peek() == 'J') advance();
        }
        Token t;
        t.kind = Token::Kind::Number;
        t.text = std::string(src_.substr(start, pos_ - start));
        t.line = line_;
        t.col = start_col;
        tokens_.push_back(std::move(t));
        emitted_on_line_ = true;
    }

    void scan_string(bool raw, bool byte, bool fstr) {
        int start_line = line_;
        int start_col = col_;
        char quote = advance();
        bool triple = false;
        if (peek() == quote && peek(1) == quote) {
            advance();
            advance();
            triple = true;
        }
        std::string body;
        while (true) {
            if (at_eof()) fail("unterminated string literal");
            char c = peek();
            if (c == '\\') {
                // Even in raw strings a backslash escapes the closing quote
                // for termination purposes.
                advance();
                if (at_eof()) fail("unterminated string literal");
                if (at_newline()) {
                    body.push_back('\\');
                    body.push_back('\n');
                    consume_newline();
                } else {
                    body.push_back('\\');
                    body.push_back(advance());
                }
                continue;
            }
            if (at_newline()) {
                if (!triple) fail("EOL while scanning string literal");
                body.push_back('\n');
                consume_newline();
                continue;
            }
            if (c == quote) {
                if (!triple) { advance(); break; }
                if (peek(1) == quote && peek(2) == quote) {
                    advance();
                    advance();
                    advance();
                    break;
                }
                body.push_back(advance());
                continue;
            }
            body.push_back(advance());
        }
        Token t;
        t.kind = Token::Kind::String;
        t.line = start_line;
        t.col = start_col;
        t.raw = raw;
        t.bytes = byte;
        t.fstring = fstr;
        if (fstr) {
            t.pieces = split_fstring(body, raw, start_line);
        } else {
            StrPiece p;
            p.text = raw ? body : decode_escapes(body);
            t.pieces.push_back(std::move(p));
        }
        t.text = body;
        tokens_.push_back(std::move(t));
        emitted_on_line_ = true;
    }

    void scan_operator() {
        static const char* three[] = {"**=", "//=", "<<=", ">>=", "..."};
        static const char* two[] = {"**", "//", "<<", ">>", "<=", ">=", "==", "!=", "->",
                                    ":=", "+=", "-=", "*=", "/=", "%=", "@=", "&=", "|=", "^="};
        int start_col = col_;
        std::string op;
        for (const char* cand : three) {
            if (src_.compare(pos_, 3, cand) == 0) { op = cand; break; }
        }
        if (op.empty()) {
            for (const char* cand : two) {
                if (src_.compare(pos_, 2, cand) == 0) { op = cand; break; }
            }
        }
        if (op.empty()) {
            char c = peek();
            static const std::string singles = "+-*/%@&|^~<>()[]{},:.;=";
            if (singles.find(c) == std::string::npos)
                fail(std::string("invalid character '") + c + "' in source");
            op = std::string(1, c);
        }
        pos_ += op.size();
        col_ += static_cast<int>(op.size());
        if (op == "(" || op == "[" || op == "{") ++paren_depth_;
        if (op == ")" || op == "]" || op == "}") {
            if (paren_depth_ == 0) fail("unmatched '" + op + "'");
            --paren_depth_;
        }
        Token t;
        t.kind = Token::Kind::Op;
        t.text = std::move(op);
        t.line = line_;
        t.col = start_col;
        tokens_.push_back(std::move(t));
        emitted_on_line_ = true;
    }

    // --- string helpers ----------------------------------------------------

    static int hexval(char c) {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    }

    static void append_codepoint(std::string& out, unsigned long cp) {
        if (cp < 0x80) out.push_back(static_cast<char>(cp));
        else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }

    static std::string decode_escapes(std::string_view body) {
        std::string out;
        out.reserve(body.size());
        std::size_t i = 0;
        while (i < body.size()) {
            char c = body[i];
            if (c != '\\') { out.push_back(c); ++i; continue; }
            if (i + 1 >= body.size()) { out.push_back('\\'); break; }
            char e = body[i + 1];
            i += 2;
            switch (e) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case 'r': out.push_back('\r'); break;
                case 'a': out.push_back('\a'); break;
                case 'b': out.push_back('\b'); break;
                case 'f': out.push_back('\f'); break;
                case 'v': out.push_back('\v'); break;
                case '\\': out.push_back('\\'); break;
                case '\'': out.push_back('\''); break;
                case '"': out.push_back('"'); break;
                case '\n': break;  // escaped newline joins lines
                case 'x': {
                    if (i + 1 < body.size() && hexval(body[i]) >= 0 && hexval(body[i + 1]) >= 0) {
                        out.push_back(static_cast<char>(hexval(body[i]) * 16 + hexval(body[i + 1])));
                        i += 2;
                    } else {
                        out += "\\x";
                    }
                    break;
                }
                case 'u':
                case 'U': {
                    int n = e == 'u' ? 4 : 8;
                    unsigned long cp = 0;
                    bool ok = i + static_cast<std::size_t>(n) <= body.size();
                    for (int k = 0; ok && k < n; ++k) {
                        int h = hexval(body[i + static_cast<std::size_t>(k)]);
                        if (h < 0) ok = false;
                        else cp = cp * 16 + static_cast<unsigned long>(h);
                    }
                    if (ok) {
                        append_codepoint(out, cp);
                        i += static_cast<std::size_t>(n);
                    } else {
                        out.push_back('\\');
                        out.push_back(e);
                    }
                    break;
                }
                default:
                    if (e >= '0' && e <= '7') {
                        int v = e - '0';
                        int cnt = 1;
                        while (cnt < 3 && i < body.size() && body[i] >= '0' && body[i] <= '7') {
                            v = v * 8 + (body[i] - '0');
                            ++i;
                            ++cnt;
                        }
                        out.push_back(static_cast<char>(v));
                    } else {
                        out.push_back('\\');
                        out.push_back(e);
                    }
            }
        }
        return out;
    }

    /// Splits an f-string body into literal fragments and placeholder
    /// expressions. Placeholder text excludes !conversion and :format-spec.
    std::vector<StrPiece> split_fstring(std::string_view body, bool raw, int line) const {
        std::vector<StrPiece> pieces;
        std::string lit;
        auto flush = [&]() {
            if (!lit.empty()) {
                StrPiece p;
                p.text = raw ? lit : decode_escapes(lit);
                pieces.push_back(std::move(p));
                lit.clear();
            }
        };
        std::size_t i = 0;
        while (i < body.size()) {
            char c = body[i];
            if (c == '{') {
                if (i + 1 < body.size() && body[i + 1] == '{') {
                    lit.push_back('{');
                    i += 2;
                    continue;
                }
                flush();
                std::size_t j = i + 1;
                int depth = 0;
                std::size_t expr_end = std::string::npos;
                char instr = '\0';
                while (j < body.size()) {
                    char d = body[j];
                    if (instr != '\0') {
                        if (d == '\\') { j += 2; continue; }
                        if (d == instr) instr = '\0';
                        ++j;
                        continue;
                    }
                    if (d == '\'' || d == '"') { instr = d; ++j; continue; }
                    if (d == '(' || d == '[' || d == '{') { ++depth; ++j; continue; }
                    if (d == ')' || d == ']') { --depth; ++j; continue; }
                    if (d == '}') {
                        if (depth == 0) break;
                        --depth;
                        ++j;
                        continue;
                    }
                    if (depth == 0 && d == ':') { if (expr_end == std::string::npos) expr_end = j; ++j; continue; }
                    if (depth == 0 && d == '!' && j + 1 < body.size() && body[j + 1] != '=') {
                        if (expr_end == std::string::npos) expr_end = j;
                        ++j;
                        continue;
                    }
                    ++j;
                }
                if (j >= body.size())
                    throw ParseError(path_, line, "unterminated expression in f-string");
                std::size_t end = expr_end == std::string::npos ? j : expr_end;
                std::string expr(body.substr(i + 1, end - i - 1));
                // Trim whitespace.
                auto b = expr.find_first_not_of(" \t\n");
                auto e2 = expr.find_last_not_of(" \t\n");
                expr = b == std::string::npos ? std::string() : expr.substr(b, e2 - b + 1);
                // Self-documenting form {x=}: the literal keeps "x=".
                if (!expr.empty() && expr.back() == '=' &&
                    (expr.size() < 2 || std::string("=!<>+-*/%&|^@:").find(expr[expr.size() - 2]) ==
                                            std::string::npos)) {
                    expr.pop_back();
                    lit += expr + "=";
                    flush();
                }
                if (!expr.empty()) {
                    StrPiece p;
                    p.placeholder = true;
                    p.text = expr;
                    pieces.push_back(std::move(p));
                }
                i = j + 1;
                continue;
            }
            if (c == '}') {
                if (i + 1 < body.size() && body[i + 1] == '}') {
                    lit.push_back('}');
                    i += 2;
                    continue;
                }
                lit.push_back('}');
                ++i;
                continue;
            }
            if (c == '\\' && !raw && i + 1 < body.size()) {
                lit.push_back('\\');
                lit.push_back(body[i + 1]);
                i += 2;
                continue;
            }
            lit.push_back(c);
            ++i;
        }
        flush();
        return pieces;
    }

    std::string_view src_;
    std::string path_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 0;
    int paren_depth_ = 0;
    bool at_line_start_ = true;
    bool emitted_on_line_ = false;
    std::vector<int> indents_;
};

inline std::vector<Token> tokenize(std::string_view src, const std::string& path) {
    return Tokenizer(src, path).tokenize();
}

}  // namespace mlloglint
