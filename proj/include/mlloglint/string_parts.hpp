#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <vector>

#include "mlloglint/ast.hpp"

namespace mlloglint {

/// Statically recovered message content of an expression: literal text
/// fragments interleaved with placeholder slots, in source order.
/// `dynamic` marks expressions whose text cannot be recovered at all
/// (bare variables, call results, ...); such expressions still contribute
/// a single placeholder fragment naming the expression.
struct StringParts {
    std::vector<StrPiece> fragments;
    bool dynamic = false;

    bool has_literal() const {
        for (const auto& f : fragments)
            if (!f.placeholder && !f.text.empty()) return true;
        return false;
    }

    std::string literal_text() const {
        std::string out;
        for (const auto& f : fragments)
            if (!f.placeholder) out += f.text;
        return out;
    }

    /// Literal text with "{}" standing in for every placeholder, e.g. the
    /// metric-key pattern of "train_{}".format(m). Empty when dynamic.
    std::optional<std::string> pattern() const {
        if (dynamic && !has_literal()) return std::nullopt;
        std::string out;
        for (const auto& f : fragments) out += f.placeholder ? "{}" : f.text;
        return out;
    }
};

/// Lowercased alphabetic runs of the literal fragments.
inline std::vector<std::string> literal_words(const StringParts& parts) {
    std::vector<std::string> words;
    for (const auto& f : parts.fragments) {
        if (f.placeholder) continue;
        std::string cur;
        for (char c : f.text) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
                cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            } else if (!cur.empty()) {
                words.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) words.push_back(cur);
    }
    return words;
}

namespace detail {

/// Splits printf-style directives out of literal fragments; the n-th
/// directive is paired with the n-th right-hand argument when available.
inline std::vector<StrPiece> split_percent(const std::vector<StrPiece>& in,
                                           const std::vector<ExprPtr>& args) {
    std::vector<StrPiece> out;
    std::size_t arg_idx = 0;
    for (const auto& piece : in) {
        if (piece.placeholder) {
            out.push_back(piece);
            continue;
        }
        const std::string& s = piece.text;
        std::string lit;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] != '%') {
                lit.push_back(s[i]);
                continue;
            }
            if (i + 1 < s.size() && s[i + 1] == '%') {
                lit.push_back('%');
                ++i;
                continue;
            }
            std::size_t j = i + 1;
            if (j < s.size() && s[j] == '(') {
                while (j < s.size() && s[j] != ')') ++j;
                if (j < s.size()) ++j;
            }
            while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) ||
                                    std::string("-+ #0.*hlL").find(s[j]) != std::string::npos))
                ++j;
            if (j < s.size() && std::string("diouxXeEfFgGcrsab").find(s[j]) != std::string::npos) {
                if (!lit.empty()) {
                    out.push_back({false, lit});
                    lit.clear();
                }
                StrPiece p;
                p.placeholder = true;
                p.text = arg_idx < args.size() ? to_text(args[arg_idx]) : s.substr(i, j - i + 1);
                ++arg_idx;
                out.push_back(std::move(p));
                i = j;
            } else {
                lit.push_back('%');
            }
        }
        if (!lit.empty()) out.push_back({false, lit});
    }
    return out;
}

/// Splits "{...}" replacement fields out of literal fragments for
/// str.format, pairing them with positional/keyword arguments.
inline std::vector<StrPiece> split_format(const std::vector<StrPiece>& in,
                                          const std::vector<ExprPtr>& args,
                                          const std::vector<Kwarg>& kwargs) {
    std::vector<StrPiece> out;
    std::size_t auto_idx = 0;
    auto resolve = [&](const std::string& field) -> std::string {
        std::string name = field;
        for (std::size_t k = 0; k < name.size(); ++k) {
            if (name[k] == '.' || name[k] == '[' || name[k] == '!' || name[k] == ':') {
                name = name.substr(0, k);
                break;
            }
        }
        if (name.empty()) {
            if (auto_idx < args.size()) return to_text(args[auto_idx++]);
            ++auto_idx;
            return field;
        }
        bool numeric = !name.empty();
        for (char c : name)
            if (!std::isdigit(static_cast<unsigned char>(c))) { numeric = false; break; }
        if (numeric) {
            std::size_t idx = static_cast<std::size_t>(std::stoul(name));
            if (idx < args.size()) return to_text(args[idx]);
            return field;
        }
        for (const auto& kw : kwargs)
            if (kw.name == name) return to_text(kw.value);
        return name;
    };
    for (const auto& piece : in) {
        if (piece.placeholder) {
            out.push_back(piece);
            continue;
        }
        const std::string& s = piece.text;
        std::string lit;
        for (std::size_t i = 0; i < s.size(); ++i) {
            char c = s[i];
            if (c == '{' && i + 1 < s.size() && s[i + 1] == '{') {
                lit.push_back('{');
                ++i;
                continue;
            }
            if (c == '}' && i + 1 < s.size() && s[i + 1] == '}') {
                lit.push_back('}');
                ++i;
                continue;
            }
            if (c == '{') {
                std::size_t j = i + 1;
                int depth = 1;
                while (j < s.size() && depth > 0) {
                    if (s[j] == '{') ++depth;
                    if (s[j] == '}') --depth;
                    ++j;
                }
                if (depth != 0) {
                    lit.push_back('{');
                    continue;
                }
                if (!lit.empty()) {
                    out.push_back({false, lit});
                    lit.clear();
                }
                StrPiece p;
                p.placeholder = true;
                p.text = resolve(s.substr(i + 1, j - i - 2));
                out.push_back(std::move(p));
                i = j - 1;
                continue;
            }
            lit.push_back(c);
        }
        if (!lit.empty()) out.push_back({false, lit});
    }
    return out;
}

}  // namespace detail

/// Recovers literal fragments and placeholder slots from a message
/// expression. Handles string literals, f-strings, %-formatting and
/// .format on literals, and + concatenation; anything else is dynamic.
inline StringParts recover_string_parts(const ExprPtr& e) {
    StringParts parts;
    if (!e) {
        parts.dynamic = true;
        return parts;
    }
    switch (e->kind) {
        case ExprKind::StringLit:
            parts.fragments = e->pieces;
            return parts;
        case ExprKind::Number:
        case ExprKind::BoolConst:
            parts.fragments.push_back({false, e->text});
            return parts;
        case ExprKind::NoneConst:
            parts.fragments.push_back({false, "None"});
            return parts;
        case ExprKind::BinOp: {
            if (e->text == "%") {
                StringParts left = recover_string_parts(e->operands[0]);
                if (left.dynamic || !left.has_literal()) break;
                std::vector<ExprPtr> args;
                const ExprPtr& rhs = e->operands[1];
                if (rhs->kind == ExprKind::Tuple) args = rhs->operands;
                else args.push_back(rhs);
                parts.fragments = detail::split_percent(left.fragments, args);
                return parts;
            }
            if (e->text == "+") {
                StringParts left = recover_string_parts(e->operands[0]);
                StringParts right = recover_string_parts(e->operands[1]);
                if (left.dynamic && right.dynamic) break;
                parts.fragments = left.fragments;
                parts.fragments.insert(parts.fragments.end(), right.fragments.begin(),
                                       right.fragments.end());
                return parts;
            }
            break;
        }
        case ExprKind::Call: {
            const ExprPtr& callee = e->operands[0];
            if (callee->kind == ExprKind::Attribute && callee->text == "format") {
                StringParts recv = recover_string_parts(callee->operands[0]);
                if (!recv.dynamic && recv.has_literal()) {
                    std::vector<ExprPtr> args(e->operands.begin() + 1, e->operands.end());
                    parts.fragments = detail::split_format(recv.fragments, args, e->kwargs);
                    return parts;
                }
            }
            break;
        }
        default:
            break;
    }
    parts.dynamic = true;
    parts.fragments.push_back({true, to_text(e)});
    return parts;
}

}  // namespace mlloglint
