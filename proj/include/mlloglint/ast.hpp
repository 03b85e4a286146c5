#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mlloglint/tokenizer.hpp"

namespace mlloglint {

struct Expr;
struct Stmt;
using ExprPtr = std::shared_ptr<Expr>;
using StmtPtr = std::shared_ptr<Stmt>;

enum class ExprKind {
    Name,
    Attribute,    // operands[0] = receiver, text = attribute name
    Call,         // operands[0] = callee, operands[1..] = positional args
    Subscript,    // operands[0] = receiver, operands[1] = index
    Slice,        // operands = lower?, upper?, step? (may be null)
    StringLit,    // pieces = fragments; merged across adjacent literals
    Number,
    BoolConst,    // text = "True"/"False"
    NoneConst,
    EllipsisLit,
    Tuple,
    List,
    Set,
    Dict,         // operands = k0,v0,k1,v1,... ; "**expr" spread has null key
    BinOp,        // text = operator
    UnaryOp,
    BoolOp,       // text = "and"/"or", operands = terms
    Compare,      // operands[0] = left, then comparators; ops_ carries operators
    IfExp,        // operands = body, test, orelse
    Lambda,       // operands[0] = body expression; params in param_names
    Starred,
    DoubleStarred,
    Await,
    Yield,        // operand optional
    YieldFrom,
    NamedExpr,    // walrus: operands = target, value
    ListComp,     // operands[0] = element; generators in comps
    SetComp,
    DictComp,     // operands[0] = key, operands[1] = value
    GeneratorExp,
};

struct Kwarg {
    std::string name;  // empty for **expr expansion
    ExprPtr value;
};

struct Comprehension {
    ExprPtr target;
    ExprPtr iter;
    std::vector<ExprPtr> conditions;
    bool is_async = false;
};

struct Expr {
    ExprKind kind = ExprKind::Name;
    std::string text;
    std::vector<ExprPtr> operands;
    std::vector<Kwarg> kwargs;        // Call only
    std::vector<std::string> ops;     // Compare operators
    std::vector<StrPiece> pieces;     // StringLit fragments
    std::vector<Comprehension> comps; // comprehension generators
    std::vector<std::string> param_names;  // Lambda
    bool str_is_fstring = false;
    bool str_is_bytes = false;
    int line = 0;
    int col = 0;
    int end_line = 0;
};

enum class StmtKind {
    Expr,        // exprs[0] = value
    Assign,      // exprs = targets..., value last
    AugAssign,   // exprs = target, value; aug_op set
    AnnAssign,   // exprs = target, annotation, value?
    Return,      // exprs[0] optional
    Raise,       // exprs = exc?, cause?
    Pass,
    Break,
    Continue,
    Import,      // bindings set
    ImportFrom,  // bindings set
    Global,
    Nonlocal,
    Del,
    Assert,      // exprs = test, msg?
    If,          // exprs[0] = test; body / orelse (elif chains nest in orelse)
    While,       // exprs[0] = test
    For,         // exprs = target, iter
    Try,
    With,        // exprs = context managers (as-targets in with_targets)
    FuncDef,
    ClassDef,    // exprs = base classes
    Match,       // exprs[0] = subject; cases
    TypeAlias,
};

/// Import statement binding: which local name refers to which module path.
struct ImportBinding {
    std::string module_path;  // dotted path of the imported object
    std::string bound_name;   // local alias visible in scope
    enum class Kind { Plain, From } kind = Kind::Plain;
    int line = 0;
};

struct ExceptHandler {
    ExprPtr type;        // may be null (bare except)
    std::string name;    // "as" binding, may be empty
    std::vector<StmtPtr> body;
    int line = 0;
};

struct MatchCase {
    ExprPtr pattern;
    ExprPtr guard;  // may be null
    std::vector<StmtPtr> body;
};

struct Stmt {
    StmtKind kind = StmtKind::Pass;
    int line = 0;
    int end_line = 0;

    std::vector<ExprPtr> exprs;
    std::vector<StmtPtr> body;
    std::vector<StmtPtr> orelse;
    std::vector<StmtPtr> final_body;       // try/finally
    std::vector<ExceptHandler> handlers;   // try/except
    std::vector<MatchCase> cases;          // match
    std::vector<ExprPtr> with_targets;     // aligned with exprs for With

    // FuncDef / ClassDef
    std::string name;
    std::vector<std::string> param_names;
    std::vector<ExprPtr> decorators;
    bool is_async = false;

    std::vector<ImportBinding> bindings;   // Import / ImportFrom
    std::string aug_op;                    // AugAssign
    std::vector<std::string> names;        // Global / Nonlocal
};

/// Compact single-line rendering of an expression, used for evidence text
/// and placeholder bookkeeping. Not a faithful pretty-printer.
inline std::string to_text(const Expr& e);

inline std::string to_text(const ExprPtr& e) { return e ? to_text(*e) : std::string(); }

inline std::string to_text(const Expr& e) {
    switch (e.kind) {
        case ExprKind::Name: return e.text;
        case ExprKind::Attribute: return to_text(e.operands[0]) + "." + e.text;
        case ExprKind::Call: {
            std::string s = to_text(e.operands[0]) + "(";
            bool first = true;
            for (std::size_t i = 1; i < e.operands.size(); ++i) {
                if (!first) s += ", ";
                first = false;
                s += to_text(e.operands[i]);
            }
            for (const auto& kw : e.kwargs) {
                if (!first) s += ", ";
                first = false;
                s += kw.name.empty() ? "**" + to_text(kw.value) : kw.name + "=" + to_text(kw.value);
            }
            return s + ")";
        }
        case ExprKind::Subscript: return to_text(e.operands[0]) + "[" + to_text(e.operands[1]) + "]";
        case ExprKind::Slice: {
            std::string s;
            s += e.operands[0] ? to_text(e.operands[0]) : "";
            s += ":";
            s += e.operands.size() > 1 && e.operands[1] ? to_text(e.operands[1]) : "";
            if (e.operands.size() > 2 && e.operands[2]) s += ":" + to_text(e.operands[2]);
            return s;
        }
        case ExprKind::StringLit: {
            std::string s = e.str_is_fstring ? "f\"" : "\"";
            for (const auto& p : e.pieces) s += p.placeholder ? "{" + p.text + "}" : p.text;
            return s + "\"";
        }
        case ExprKind::Number: return e.text;
        case ExprKind::BoolConst: return e.text;
        case ExprKind::NoneConst: return "None";
        case ExprKind::EllipsisLit: return "...";
        case ExprKind::Tuple:
        case ExprKind::List:
        case ExprKind::Set: {
            const char* open = e.kind == ExprKind::List ? "[" : e.kind == ExprKind::Set ? "{" : "(";
            const char* close = e.kind == ExprKind::List ? "]" : e.kind == ExprKind::Set ? "}" : ")";
            std::string s = open;
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) s += ", ";
                s += to_text(e.operands[i]);
            }
            return s + close;
        }
        case ExprKind::Dict: {
            std::string s = "{";
            for (std::size_t i = 0; i + 1 < e.operands.size(); i += 2) {
                if (i) s += ", ";
                if (e.operands[i]) s += to_text(e.operands[i]) + ": " + to_text(e.operands[i + 1]);
                else s += "**" + to_text(e.operands[i + 1]);
            }
            return s + "}";
        }
        case ExprKind::BinOp:
            return to_text(e.operands[0]) + " " + e.text + " " + to_text(e.operands[1]);
        case ExprKind::UnaryOp: return e.text + to_text(e.operands[0]);
        case ExprKind::BoolOp: {
            std::string s;
            for (std::size_t i = 0; i < e.operands.size(); ++i) {
                if (i) s += " " + e.text + " ";
                s += to_text(e.operands[i]);
            }
            return s;
        }
        case ExprKind::Compare: {
            std::string s = to_text(e.operands[0]);
            for (std::size_t i = 1; i < e.operands.size(); ++i)
                s += " " + e.ops[i - 1] + " " + to_text(e.operands[i]);
            return s;
        }
        case ExprKind::IfExp:
            return to_text(e.operands[0]) + " if " + to_text(e.operands[1]) + " else " +
                   to_text(e.operands[2]);
        case ExprKind::Lambda: return "lambda: " + to_text(e.operands[0]);
        case ExprKind::Starred: return "*" + to_text(e.operands[0]);
        case ExprKind::DoubleStarred: return "**" + to_text(e.operands[0]);
        case ExprKind::Await: return "await " + to_text(e.operands[0]);
        case ExprKind::Yield: return e.operands.empty() ? "yield" : "yield " + to_text(e.operands[0]);
        case ExprKind::YieldFrom: return "yield from " + to_text(e.operands[0]);
        case ExprKind::NamedExpr:
            return to_text(e.operands[0]) + " := " + to_text(e.operands[1]);
        case ExprKind::ListComp: return "[" + to_text(e.operands[0]) + " for ...]";
        case ExprKind::SetComp: return "{" + to_text(e.operands[0]) + " for ...}";
        case ExprKind::DictComp:
            return "{" + to_text(e.operands[0]) + ": " + to_text(e.operands[1]) + " for ...}";
        case ExprKind::GeneratorExp: return "(" + to_text(e.operands[0]) + " for ...)";
    }
    return "";
}

}  // namespace mlloglint
