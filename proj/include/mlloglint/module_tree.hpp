#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mlloglint/ast.hpp"
#include "mlloglint/parser.hpp"
#include "mlloglint/source_text.hpp"
#include "mlloglint/string_parts.hpp"

namespace mlloglint {

/// Dotted rendering of a call target as written: receiver.attr.attr, with
/// "()" / "[]" marking call and subscript links in the chain.
inline std::string callee_path_of(const ExprPtr& e) {
    if (!e) return "<expr>";
    switch (e->kind) {
        case ExprKind::Name: return e->text;
        case ExprKind::Attribute: return callee_path_of(e->operands[0]) + "." + e->text;
        case ExprKind::Call: return callee_path_of(e->operands[0]) + "()";
        case ExprKind::Subscript: return callee_path_of(e->operands[0]) + "[]";
        default: return "<expr>";
    }
}

/// Name segments of the callee chain with call/subscript markers dropped.
inline std::vector<std::string> callee_segments_of(const ExprPtr& e) {
    std::vector<std::string> segs;
    std::function<void(const ExprPtr&)> walk = [&](const ExprPtr& x) {
        if (!x) return;
        switch (x->kind) {
            case ExprKind::Name: segs.push_back(x->text); break;
            case ExprKind::Attribute:
                walk(x->operands[0]);
                segs.push_back(x->text);
                break;
            case ExprKind::Call:
            case ExprKind::Subscript:
                walk(x->operands[0]);
                break;
            default: segs.push_back("<expr>");
        }
    };
    walk(e);
    return segs;
}

struct CallSite {
    std::string callee_path;
    std::vector<std::string> callee_segments;
    ExprPtr call;                        // the Call expression (args, kwargs)
    int line = 0;
    int end_line = 0;
    int guard_depth = 0;
    bool in_exception_handler = false;
    bool in_loop = false;
    std::vector<StringParts> arg_parts;  // per positional argument

    std::size_t arg_count() const { return call->operands.size() - 1; }
    ExprPtr arg(std::size_t i) const { return call->operands[i + 1]; }
    const std::vector<Kwarg>& kwargs() const { return call->kwargs; }
};

/// One statement of a function body, flattened in source order with its
/// block nesting depth and conditional-guard depth.
struct BodyStmt {
    const Stmt* stmt = nullptr;
    int depth = 0;
    int guard_depth = 0;
    bool in_handler = false;
    bool in_loop = false;
};

struct SourceFunction {
    std::string name;
    std::string qualified_name;
    std::optional<std::string> class_name;
    std::vector<std::string> params;
    std::vector<std::string> decorators;
    bool is_async = false;
    int line_start = 0;
    int line_end = 0;
    std::vector<StmtPtr> body;        // statement tree
    std::vector<BodyStmt> statements; // flattened view
    std::vector<CallSite> calls;      // source order
};

struct ClassRecord {
    std::string name;
    int line_start = 0;
    int line_end = 0;
    std::vector<std::string> methods;
};

struct ModuleTree {
    std::string path;
    std::string raw_bytes;  // exactly as read from disk
    SourceText text;        // BOM-stripped, line-indexed
    std::string encoding;   // "utf-8" or "latin-1"
    std::vector<ImportBinding> imports;
    std::vector<std::string> star_imports;
    std::vector<SourceFunction> functions;
    std::vector<ClassRecord> classes;
    std::vector<CallSite> module_calls;  // call sites outside any function
    std::vector<StmtPtr> body;

    const std::string& raw_text() const { return raw_bytes; }
};

// --- expression walking utilities -----------------------------------------

inline void walk_expr(const ExprPtr& e, const std::function<void(const ExprPtr&)>& fn) {
    if (!e) return;
    fn(e);
    for (const auto& op : e->operands) walk_expr(op, fn);
    for (const auto& kw : e->kwargs) walk_expr(kw.value, fn);
    for (const auto& c : e->comps) {
        walk_expr(c.target, fn);
        walk_expr(c.iter, fn);
        for (const auto& cond : c.conditions) walk_expr(cond, fn);
    }
}

/// Identifier-ish tokens lexed out of f-string placeholder text.
inline void identifiers_in_snippet(const std::string& text, std::vector<std::string>& out) {
    std::string cur;
    bool in_str = false;
    char quote = '\0';
    for (char c : text) {
        if (in_str) {
            if (c == quote) in_str = false;
            continue;
        }
        if (c == '\'' || c == '"') {
            in_str = true;
            quote = c;
            continue;
        }
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            cur.push_back(c);
        } else {
            if (!cur.empty() && !std::isdigit(static_cast<unsigned char>(cur[0]))) out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty() && !std::isdigit(static_cast<unsigned char>(cur[0]))) out.push_back(cur);
}

/// All identifiers appearing in an expression: names, attribute segments,
/// keyword-argument names and identifiers inside f-string placeholders.
inline std::vector<std::string> collect_identifiers(const ExprPtr& e) {
    std::vector<std::string> out;
    walk_expr(e, [&](const ExprPtr& x) {
        if (x->kind == ExprKind::Name) out.push_back(x->text);
        if (x->kind == ExprKind::Attribute) out.push_back(x->text);
        if (x->kind == ExprKind::Call)
            for (const auto& kw : x->kwargs)
                if (!kw.name.empty()) out.push_back(kw.name);
        if (x->kind == ExprKind::StringLit)
            for (const auto& p : x->pieces)
                if (p.placeholder) identifiers_in_snippet(p.text, out);
    });
    return out;
}

/// String keys of dict literals nested anywhere in the expression.
inline std::vector<std::string> collect_dict_keys(const ExprPtr& e) {
    std::vector<std::string> out;
    walk_expr(e, [&](const ExprPtr& x) {
        if (x->kind != ExprKind::Dict) return;
        for (std::size_t i = 0; i + 1 < x->operands.size(); i += 2) {
            const ExprPtr& key = x->operands[i];
            if (key && key->kind == ExprKind::StringLit) {
                StringParts p;
                p.fragments = key->pieces;
                out.push_back(p.literal_text());
            }
        }
    });
    return out;
}

/// Final callee-name segment of every call nested in the expression.
inline std::vector<std::string> collect_called_names(const ExprPtr& e) {
    std::vector<std::string> out;
    walk_expr(e, [&](const ExprPtr& x) {
        if (x->kind != ExprKind::Call) return;
        auto segs = callee_segments_of(x->operands[0]);
        if (!segs.empty()) out.push_back(segs.back());
    });
    return out;
}

// --- module construction ----------------------------------------------------

namespace detail {

struct WalkState {
    int depth = 0;
    int guard = 0;
    bool handler = false;
    bool loop = false;
};

class TreeBuilder {
public:
    explicit TreeBuilder(ModuleTree& tree) : tree_(tree) {}

    void run() { walk_block(tree_.body, WalkState{}, nullptr, {}, false); }

private:
    static void collect_calls(const ExprPtr& e, const WalkState& st, std::vector<CallSite>& out) {
        walk_expr(e, [&](const ExprPtr& x) {
            if (x->kind != ExprKind::Call) return;
            CallSite c;
            c.callee_path = callee_path_of(x->operands[0]);
            c.callee_segments = callee_segments_of(x->operands[0]);
            c.call = x;
            c.line = x->line;
            c.end_line = std::max(x->end_line, x->line);
            c.guard_depth = st.guard;
            c.in_exception_handler = st.handler;
            c.in_loop = st.loop;
            for (std::size_t i = 1; i < x->operands.size(); ++i)
                c.arg_parts.push_back(recover_string_parts(x->operands[i]));
            out.push_back(std::move(c));
        });
    }

    /// Walks one block. `fn` is the enclosing function being collected
    /// into, or null at module level. `enclosing` is the qualified-name
    /// prefix; `in_class` says whether its last component is a class.
    void walk_block(const std::vector<StmtPtr>& block, WalkState st, SourceFunction* fn,
                    const std::vector<std::string>& enclosing, bool in_class) {
        for (const auto& sp : block) walk_stmt(sp, st, fn, enclosing, in_class);
    }

    void walk_stmt(const StmtPtr& sp, WalkState st, SourceFunction* fn,
                   const std::vector<std::string>& enclosing, bool in_class) {
        const Stmt& s = *sp;
        if (fn) {
            BodyStmt b;
            b.stmt = &s;
            b.depth = st.depth;
            b.guard_depth = st.guard;
            b.in_handler = st.handler;
            b.in_loop = st.loop;
            fn->statements.push_back(b);
        }
        auto sink = [&]() -> std::vector<CallSite>& {
            return fn ? fn->calls : tree_.module_calls;
        };
        switch (s.kind) {
            case StmtKind::FuncDef: {
                for (const auto& d : s.decorators) collect_calls(d, st, sink());
                build_function(sp, enclosing, in_class);
                break;
            }
            case StmtKind::ClassDef: {
                for (const auto& d : s.decorators) collect_calls(d, st, sink());
                for (const auto& b : s.exprs) collect_calls(b, st, sink());
                ClassRecord rec;
                rec.name = s.name;
                rec.line_start = s.line;
                rec.line_end = s.end_line;
                for (const auto& child : s.body)
                    if (child->kind == StmtKind::FuncDef) rec.methods.push_back(child->name);
                tree_.classes.push_back(rec);
                auto inner = enclosing;
                inner.push_back(s.name);
                WalkState cst = st;
                ++cst.depth;
                walk_block(s.body, cst, fn, inner, true);
                break;
            }
            case StmtKind::Import:
            case StmtKind::ImportFrom:
                for (const auto& b : s.bindings) {
                    if (b.bound_name == "*") tree_.star_imports.push_back(b.module_path);
                    else tree_.imports.push_back(b);
                }
                break;
            case StmtKind::If: {
                collect_calls(s.exprs[0], st, sink());
                WalkState inner = st;
                ++inner.depth;
                ++inner.guard;
                walk_block(s.body, inner, fn, enclosing, in_class);
                walk_block(s.orelse, inner, fn, enclosing, in_class);
                break;
            }
            case StmtKind::While:
            case StmtKind::For: {
                for (const auto& e : s.exprs) collect_calls(e, st, sink());
                WalkState inner = st;
                ++inner.depth;
                ++inner.guard;
                inner.loop = true;
                walk_block(s.body, inner, fn, enclosing, in_class);
                walk_block(s.orelse, inner, fn, enclosing, in_class);
                break;
            }
            case StmtKind::Try: {
                WalkState body_st = st;
                ++body_st.depth;
                walk_block(s.body, body_st, fn, enclosing, in_class);
                for (const auto& h : s.handlers) {
                    collect_calls(h.type, st, sink());
                    WalkState hst = st;
                    ++hst.depth;
                    ++hst.guard;
                    hst.handler = true;
                    walk_block(h.body, hst, fn, enclosing, in_class);
                }
                WalkState est = st;
                ++est.depth;
                ++est.guard;
                walk_block(s.orelse, est, fn, enclosing, in_class);
                WalkState fst = st;
                ++fst.depth;
                walk_block(s.final_body, fst, fn, enclosing, in_class);
                break;
            }
            case StmtKind::With: {
                for (const auto& e : s.exprs) collect_calls(e, st, sink());
                WalkState inner = st;
                ++inner.depth;
                walk_block(s.body, inner, fn, enclosing, in_class);
                break;
            }
            case StmtKind::Match: {
                collect_calls(s.exprs[0], st, sink());
                for (const auto& mc : s.cases) {
                    collect_calls(mc.guard, st, sink());
                    WalkState inner = st;
                    ++inner.depth;
                    ++inner.guard;
                    walk_block(mc.body, inner, fn, enclosing, in_class);
                }
                break;
            }
            default:
                for (const auto& e : s.exprs) collect_calls(e, st, sink());
                break;
        }
    }

    void build_function(const StmtPtr& sp, const std::vector<std::string>& enclosing,
                        bool in_class) {
        const Stmt& s = *sp;
        SourceFunction header;
        header.name = s.name;
        std::string qn;
        for (const auto& part : enclosing) qn += part + ".";
        header.qualified_name = qn + s.name;
        if (in_class && !enclosing.empty()) header.class_name = enclosing.back();
        header.params = s.param_names;
        for (const auto& d : s.decorators) header.decorators.push_back(to_text(d));
        header.is_async = s.is_async;
        header.line_start = s.line;
        header.line_end = s.end_line;
        header.body = s.body;

        std::size_t index = tree_.functions.size();
        tree_.functions.push_back(std::move(header));

        // Collect into a detached object first: nested defs may grow
        // tree_.functions and invalidate references into it.
        SourceFunction collected;
        auto inner = enclosing;
        inner.push_back(s.name);
        walk_block(s.body, WalkState{}, &collected, inner, false);
        tree_.functions[index].statements = std::move(collected.statements);
        tree_.functions[index].calls = std::move(collected.calls);
    }

    ModuleTree& tree_;
};

}  // namespace detail

/// Parses Python source into a ModuleTree. Raises ParseError on invalid
/// syntax (never a partial tree) and EncodingError on NUL bytes.
inline ModuleTree parse_module(std::string source_bytes, const std::string& path) {
    ModuleTree tree;
    tree.path = path;
    tree.raw_bytes = source_bytes;
    tree.text = SourceText(std::move(source_bytes));
    tree.encoding = tree.text.is_utf8() ? "utf-8" : "latin-1";
    tree.body = parse_python(tree.text.text(), path);
    detail::TreeBuilder(tree).run();
    std::stable_sort(tree.functions.begin(), tree.functions.end(),
                     [](const SourceFunction& a, const SourceFunction& b) {
                         return a.line_start < b.line_start;
                     });
    return tree;
}

/// All functions in deterministic source order (module-level, methods,
/// nested functions).
inline const std::vector<SourceFunction>& extract_functions(const ModuleTree& tree) {
    return tree.functions;
}

/// Raw text of the lines adjacent to `line`; absent at file boundaries.
inline std::pair<std::optional<std::string>, std::optional<std::string>>
neighbor_lines(const ModuleTree& tree, int line) {
    return tree.text.neighbor_lines(line);
}

}  // namespace mlloglint
