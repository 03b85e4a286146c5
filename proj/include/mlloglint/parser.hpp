#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "mlloglint/ast.hpp"
#include "mlloglint/errors.hpp"
#include "mlloglint/tokenizer.hpp"

namespace mlloglint {

/// Recursive-descent parser for Python 3 (3.8-3.12 surface syntax).
/// Produces the analysis AST in ast.hpp. Deliberately tolerant in a few
/// corners (match patterns, PEP 695 type parameters) but rejects anything
/// it cannot shape into statements, so invalid files raise ParseError
/// rather than yielding partial trees.
class Parser {
public:
    Parser(std::vector<Token> tokens, std::string path)
        : toks_(std::move(tokens)), path_(std::move(path)) {}

    std::vector<StmtPtr> parse_module() {
        std::vector<StmtPtr> body;
        while (!at(Token::Kind::End)) {
            if (at(Token::Kind::Newline)) { next(); continue; }
            if (at(Token::Kind::Indent)) fail("unexpected indent");
            parse_statement_into(body);
        }
        return body;
    }

private:
    // --- token plumbing ------------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(std::size_t ahead = 1) const {
        std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    int prev_line() const { return pos_ > 0 ? toks_[pos_ - 1].line : 1; }
    void next() { if (pos_ + 1 < toks_.size()) ++pos_; }

    bool at(Token::Kind k) const { return cur().kind == k; }
    bool at_op(std::string_view s) const { return cur().is_op(s); }
    bool at_name(std::string_view s) const { return cur().is_name(s); }

    bool accept_op(std::string_view s) {
        if (at_op(s)) { next(); return true; }
        return false;
    }
    bool accept_name(std::string_view s) {
        if (at_name(s)) { next(); return true; }
        return false;
    }
    void expect_op(std::string_view s) {
        if (!accept_op(s)) fail("expected '" + std::string(s) + "'");
    }
    std::string expect_name() {
        if (!at(Token::Kind::Name)) fail("expected identifier");
        std::string n = cur().text;
        next();
        return n;
    }
    void expect_newline() {
        if (at(Token::Kind::Newline)) { next(); return; }
        if (at(Token::Kind::End)) return;
        fail("expected end of line, got '" + cur().text + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(path_, cur().line, msg);
    }

    static bool is_reserved(const std::string& n) {
        static const std::unordered_set<std::string> kw = {
            "and", "as", "assert", "async", "await", "break", "class", "continue", "def",
            "del", "elif", "else", "except", "finally", "for", "from", "global", "if",
            "import", "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise",
            "return", "try", "while", "with", "yield"};
        return kw.count(n) > 0;
    }

    static ExprPtr make(ExprKind k, const Token& t) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = t.line;
        e->col = t.col;
        e->end_line = t.line;
        return e;
    }

    StmtPtr make_stmt(StmtKind k) {
        auto s = std::make_shared<Stmt>();
        s->kind = k;
        s->line = cur().line;
        s->end_line = cur().line;
        return s;
    }

    static int end_of(const std::vector<StmtPtr>& body, int fallback) {
        return body.empty() ? fallback : body.back()->end_line;
    }

    // --- statements ----------------------------------------------------------

    void parse_statement_into(std::vector<StmtPtr>& out) {
        if (at(Token::Kind::Name)) {
            const std::string& t = cur().text;
            if (t == "if") { out.push_back(parse_if()); return; }
            if (t == "while") { out.push_back(parse_while()); return; }
            if (t == "for") { out.push_back(parse_for(false)); return; }
            if (t == "try") { out.push_back(parse_try()); return; }
            if (t == "with") { out.push_back(parse_with(false)); return; }
            if (t == "def") { out.push_back(parse_funcdef(false, {})); return; }
            if (t == "class") { out.push_back(parse_classdef({})); return; }
            if (t == "async") {
                next();
                if (at_name("def")) { out.push_back(parse_funcdef(true, {})); return; }
                if (at_name("for")) { out.push_back(parse_for(true)); return; }
                if (at_name("with")) { out.push_back(parse_with(true)); return; }
                fail("expected def, for or with after async");
            }
            if (t == "match") {
                StmtPtr m = try_parse_match();
                if (m) { out.push_back(m); return; }
            }
        }
        if (at_op("@")) { out.push_back(parse_decorated()); return; }
        parse_simple_line(out);
    }

    void parse_simple_line(std::vector<StmtPtr>& out) {
        while (true) {
            out.push_back(parse_small_stmt());
            if (accept_op(";")) {
                if (at(Token::Kind::Newline) || at(Token::Kind::End)) break;
                continue;
            }
            break;
        }
        expect_newline();
    }

    StmtPtr parse_small_stmt() {
        if (at(Token::Kind::Name)) {
            const std::string& t = cur().text;
            if (t == "pass") { auto s = make_stmt(StmtKind::Pass); next(); return s; }
            if (t == "break") { auto s = make_stmt(StmtKind::Break); next(); return s; }
            if (t == "continue") { auto s = make_stmt(StmtKind::Continue); next(); return s; }
            if (t == "return") {
                auto s = make_stmt(StmtKind::Return);
                next();
                if (!at(Token::Kind::Newline) && !at(Token::Kind::End) && !at_op(";"))
                    s->exprs.push_back(parse_testlist_star());
                s->end_line = prev_line();
                return s;
            }
            if (t == "raise") {
                auto s = make_stmt(StmtKind::Raise);
                next();
                if (!at(Token::Kind::Newline) && !at(Token::Kind::End) && !at_op(";")) {
                    s->exprs.push_back(parse_test());
                    if (accept_name("from")) s->exprs.push_back(parse_test());
                }
                s->end_line = prev_line();
                return s;
            }
            if (t == "import") return parse_import();
            if (t == "from") return parse_import_from();
            if (t == "global" || t == "nonlocal") {
                auto s = make_stmt(t == "global" ? StmtKind::Global : StmtKind::Nonlocal);
                next();
                s->names.push_back(expect_name());
                while (accept_op(",")) s->names.push_back(expect_name());
                return s;
            }
            if (t == "del") {
                auto s = make_stmt(StmtKind::Del);
                next();
                s->exprs.push_back(parse_target_list());
                s->end_line = prev_line();
                return s;
            }
            if (t == "assert") {
                auto s = make_stmt(StmtKind::Assert);
                next();
                s->exprs.push_back(parse_test());
                if (accept_op(",")) s->exprs.push_back(parse_test());
                s->end_line = prev_line();
                return s;
            }
            if (t == "type" && peek().kind == Token::Kind::Name && peek(2).is_op("=")) {
                // PEP 695 type alias; 'type' is a soft keyword.
                auto s = make_stmt(StmtKind::TypeAlias);
                next();
                s->name = expect_name();
                expect_op("=");
                s->exprs.push_back(parse_test());
                s->end_line = prev_line();
                return s;
            }
        }
        return parse_expr_stmt();
    }

    StmtPtr parse_expr_stmt() {
        auto s = make_stmt(StmtKind::Expr);
        ExprPtr first = parse_testlist_star();
        if (at_op(":")) {
            next();
            s->kind = StmtKind::AnnAssign;
            s->exprs.push_back(first);
            s->exprs.push_back(parse_test());
            if (accept_op("=")) s->exprs.push_back(parse_rhs());
            s->end_line = prev_line();
            return s;
        }
        static const char* augops[] = {"+=", "-=", "*=", "/=", "//=", "%=", "@=",
                                       "&=", "|=", "^=", "<<=", ">>=", "**="};
        for (const char* op : augops) {
            if (at_op(op)) {
                next();
                s->kind = StmtKind::AugAssign;
                s->aug_op = op;
                s->exprs.push_back(first);
                s->exprs.push_back(parse_rhs());
                s->end_line = prev_line();
                return s;
            }
        }
        if (at_op("=")) {
            s->kind = StmtKind::Assign;
            s->exprs.push_back(first);
            while (accept_op("=")) s->exprs.push_back(parse_rhs());
            s->end_line = prev_line();
            return s;
        }
        s->exprs.push_back(first);
        s->end_line = prev_line();
        return s;
    }

    /// Right-hand side of an assignment: yield expression or testlist.
    ExprPtr parse_rhs() {
        if (at_name("yield")) return parse_yield();
        return parse_testlist_star();
    }

    StmtPtr parse_import() {
        auto s = make_stmt(StmtKind::Import);
        next();
        while (true) {
            int line = cur().line;
            std::string dotted = expect_name();
            std::string root = dotted;
            while (accept_op(".")) dotted += "." + expect_name();
            ImportBinding b;
            b.kind = ImportBinding::Kind::Plain;
            b.module_path = dotted;
            b.line = line;
            if (accept_name("as")) b.bound_name = expect_name();
            else b.bound_name = root;
            s->bindings.push_back(std::move(b));
            if (!accept_op(",")) break;
        }
        return s;
    }

    StmtPtr parse_import_from() {
        auto s = make_stmt(StmtKind::ImportFrom);
        next();
        std::string module;
        while (at_op(".") || at_op("...")) {
            module += cur().text;
            next();
        }
        if (at(Token::Kind::Name) && !at_name("import")) {
            module += expect_name();
            while (accept_op(".")) module += "." + expect_name();
        }
        if (!accept_name("import")) fail("expected 'import'");
        auto add = [&](const std::string& name, const std::string& alias, int line) {
            ImportBinding b;
            b.kind = ImportBinding::Kind::From;
            b.module_path = module.empty() ? name : module + "." + name;
            b.bound_name = alias.empty() ? name : alias;
            b.line = line;
            s->bindings.push_back(std::move(b));
        };
        if (accept_op("*")) {
            ImportBinding b;
            b.kind = ImportBinding::Kind::From;
            b.module_path = module;
            b.bound_name = "*";
            b.line = prev_line();
            s->bindings.push_back(std::move(b));
            return s;
        }
        bool parens = accept_op("(");
        while (true) {
            if (parens && at_op(")")) break;
            int line = cur().line;
            std::string name = expect_name();
            std::string alias;
            if (accept_name("as")) alias = expect_name();
            add(name, alias, line);
            if (!accept_op(",")) break;
        }
        if (parens) expect_op(")");
        return s;
    }

    StmtPtr parse_if() {
        auto s = make_stmt(StmtKind::If);
        next();
        s->exprs.push_back(parse_namedexpr());
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        if (at_name("elif")) {
            StmtPtr chained = parse_if_as_elif();
            s->orelse.push_back(chained);
            s->end_line = chained->end_line;
        } else if (accept_name("else")) {
            expect_op(":");
            s->orelse = parse_suite();
            s->end_line = end_of(s->orelse, s->end_line);
        }
        return s;
    }

    StmtPtr parse_if_as_elif() {
        auto s = make_stmt(StmtKind::If);
        next();  // elif
        s->exprs.push_back(parse_namedexpr());
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        if (at_name("elif")) {
            StmtPtr chained = parse_if_as_elif();
            s->orelse.push_back(chained);
            s->end_line = chained->end_line;
        } else if (accept_name("else")) {
            expect_op(":");
            s->orelse = parse_suite();
            s->end_line = end_of(s->orelse, s->end_line);
        }
        return s;
    }

    StmtPtr parse_while() {
        auto s = make_stmt(StmtKind::While);
        next();
        s->exprs.push_back(parse_namedexpr());
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        if (accept_name("else")) {
            expect_op(":");
            s->orelse = parse_suite();
            s->end_line = end_of(s->orelse, s->end_line);
        }
        return s;
    }

    StmtPtr parse_for(bool is_async) {
        auto s = make_stmt(StmtKind::For);
        s->is_async = is_async;
        next();
        s->exprs.push_back(parse_target_list());
        if (!accept_name("in")) fail("expected 'in'");
        s->exprs.push_back(parse_testlist_star());
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        if (accept_name("else")) {
            expect_op(":");
            s->orelse = parse_suite();
            s->end_line = end_of(s->orelse, s->end_line);
        }
        return s;
    }

    StmtPtr parse_try() {
        auto s = make_stmt(StmtKind::Try);
        next();
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        bool saw_clause = false;
        while (at_name("except")) {
            saw_clause = true;
            ExceptHandler h;
            h.line = cur().line;
            next();
            accept_op("*");  // except* groups
            if (!at_op(":")) {
                h.type = parse_test();
                if (accept_name("as")) h.name = expect_name();
            }
            expect_op(":");
            h.body = parse_suite();
            s->end_line = end_of(h.body, s->end_line);
            s->handlers.push_back(std::move(h));
        }
        if (accept_name("else")) {
            expect_op(":");
            s->orelse = parse_suite();
            s->end_line = end_of(s->orelse, s->end_line);
        }
        if (accept_name("finally")) {
            saw_clause = true;
            expect_op(":");
            s->final_body = parse_suite();
            s->end_line = end_of(s->final_body, s->end_line);
        }
        if (!saw_clause) fail("expected 'except' or 'finally'");
        return s;
    }

    StmtPtr parse_with(bool is_async) {
        auto s = make_stmt(StmtKind::With);
        s->is_async = is_async;
        next();
        if (at_op("(")) {
            // Parenthesized with-items (3.9+). Try that shape first; fall back
            // to a plain parenthesized expression on failure.
            std::size_t save = pos_;
            try {
                next();
                parse_with_items(s, true);
                expect_op(")");
                if (!at_op(":")) fail("not a with-item group");
            } catch (const ParseError&) {
                pos_ = save;
                s->exprs.clear();
                s->with_targets.clear();
                parse_with_items(s, false);
            }
        } else {
            parse_with_items(s, false);
        }
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        return s;
    }

    void parse_with_items(StmtPtr& s, bool inside_parens) {
        while (true) {
            s->exprs.push_back(parse_test());
            if (accept_name("as")) s->with_targets.push_back(parse_target());
            else s->with_targets.push_back(nullptr);
            if (!accept_op(",")) break;
            if (inside_parens && at_op(")")) break;  // trailing comma
        }
    }

    StmtPtr parse_decorated() {
        std::vector<ExprPtr> decorators;
        while (accept_op("@")) {
            decorators.push_back(parse_namedexpr());
            expect_newline();
            while (at(Token::Kind::Newline)) next();
        }
        if (at_name("def")) return parse_funcdef(false, std::move(decorators));
        if (at_name("class")) return parse_classdef(std::move(decorators));
        if (at_name("async")) {
            next();
            if (at_name("def")) return parse_funcdef(true, std::move(decorators));
            fail("expected def after async");
        }
        fail("expected def or class after decorator");
    }

    void skip_type_params() {
        if (!at_op("[")) return;
        int depth = 0;
        do {
            if (at_op("[") || at_op("(") || at_op("{")) ++depth;
            if (at_op("]") || at_op(")") || at_op("}")) --depth;
            next();
        } while (depth > 0 && !at(Token::Kind::End));
    }

    StmtPtr parse_funcdef(bool is_async, std::vector<ExprPtr> decorators) {
        auto s = make_stmt(StmtKind::FuncDef);
        s->is_async = is_async;
        s->decorators = std::move(decorators);
        next();  // def
        s->name = expect_name();
        skip_type_params();
        expect_op("(");
        parse_params(s->param_names);
        expect_op(")");
        if (accept_op("->")) parse_test();
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        return s;
    }

    void parse_params(std::vector<std::string>& names) {
        while (!at_op(")")) {
            if (accept_op("/")) {
            } else if (accept_op("*")) {
                if (at(Token::Kind::Name)) {
                    names.push_back(expect_name());
                    if (accept_op(":")) parse_test();
                }
            } else if (accept_op("**")) {
                names.push_back(expect_name());
                if (accept_op(":")) parse_test();
            } else {
                names.push_back(expect_name());
                if (accept_op(":")) parse_test();
                if (accept_op("=")) parse_test();
            }
            if (!accept_op(",")) break;
        }
    }

    StmtPtr parse_classdef(std::vector<ExprPtr> decorators) {
        auto s = make_stmt(StmtKind::ClassDef);
        s->decorators = std::move(decorators);
        next();  // class
        s->name = expect_name();
        skip_type_params();
        if (accept_op("(")) {
            while (!at_op(")")) {
                if (at(Token::Kind::Name) && peek().is_op("=")) {
                    next();
                    next();
                    parse_test();  // metaclass=..., keyword base args
                } else if (accept_op("**")) {
                    parse_test();
                } else if (accept_op("*")) {
                    s->exprs.push_back(parse_test());
                } else {
                    s->exprs.push_back(parse_test());
                }
                if (!accept_op(",")) break;
            }
            expect_op(")");
        }
        expect_op(":");
        s->body = parse_suite();
        s->end_line = end_of(s->body, s->line);
        return s;
    }

    /// 'match' is a soft keyword: attempt a match-statement parse and back
    /// off to an expression statement when the shape does not fit.
    StmtPtr try_parse_match() {
        std::size_t save = pos_;
        try {
            auto s = make_stmt(StmtKind::Match);
            next();  // match
            s->exprs.push_back(parse_testlist_star());
            expect_op(":");
            if (!at(Token::Kind::Newline)) fail("match body must be a block");
            next();
            if (!at(Token::Kind::Indent)) fail("expected indented block");
            next();
            while (at_name("case")) {
                MatchCase mc;
                next();
                mc.pattern = parse_match_pattern();
                if (accept_name("if")) mc.guard = parse_namedexpr();
                expect_op(":");
                mc.body = parse_suite();
                s->end_line = end_of(mc.body, s->end_line);
                s->cases.push_back(std::move(mc));
                while (at(Token::Kind::Newline)) next();
            }
            if (s->cases.empty()) fail("expected 'case'");
            if (!at(Token::Kind::Dedent)) fail("expected dedent after match block");
            next();
            return s;
        } catch (const ParseError&) {
            pos_ = save;
            return nullptr;
        }
    }

    /// Case patterns parse below ternary level so a trailing 'if' is left
    /// for the guard. '|' alternatives ride on the ordinary bit-or chain;
    /// nested "as" captures are honored via pattern mode.
    ExprPtr parse_match_pattern() {
        struct PatternScope {
            bool* flag;
            bool saved;
            explicit PatternScope(bool* f) : flag(f), saved(*f) { *f = true; }
            ~PatternScope() { *flag = saved; }
        } scope(&in_pattern_);
        auto parse_one = [&]() -> ExprPtr {
            ExprPtr p;
            if (at_op("*")) {
                p = make(ExprKind::Starred, cur());
                next();
                p->operands.push_back(parse_bitor());
            } else {
                p = parse_bitor();
            }
            if (accept_name("as")) {
                auto as = make(ExprKind::NamedExpr, cur());
                as->operands.push_back(p);
                auto nm = make(ExprKind::Name, cur());
                nm->text = expect_name();
                as->operands.push_back(nm);
                return as;
            }
            return p;
        };
        ExprPtr first = parse_one();
        if (!at_op(",")) return first;
        auto tup = make(ExprKind::Tuple, cur());
        tup->line = first->line;
        tup->operands.push_back(first);
        while (accept_op(",")) {
            if (at_op(":") || at_name("if")) break;
            tup->operands.push_back(parse_one());
        }
        tup->end_line = prev_line();
        return tup;
    }

    std::vector<StmtPtr> parse_suite() {
        std::vector<StmtPtr> body;
        if (at(Token::Kind::Newline)) {
            next();
            while (at(Token::Kind::Newline)) next();
            if (!at(Token::Kind::Indent)) fail("expected an indented block");
            next();
            while (!at(Token::Kind::Dedent) && !at(Token::Kind::End)) {
                if (at(Token::Kind::Newline)) { next(); continue; }
                parse_statement_into(body);
            }
            if (at(Token::Kind::Dedent)) next();
            if (body.empty()) fail("expected an indented block");
            return body;
        }
        parse_simple_line(body);
        return body;
    }

    // --- expressions ---------------------------------------------------------

    ExprPtr parse_testlist_star() {
        ExprPtr first = parse_star_or_named();
        if (!at_op(",")) return first;
        auto tup = make(ExprKind::Tuple, toks_[pos_]);
        tup->line = first->line;
        tup->col = first->col;
        tup->operands.push_back(first);
        while (accept_op(",")) {
            if (ends_expr()) break;  // trailing comma
            tup->operands.push_back(parse_star_or_named());
        }
        tup->end_line = prev_line();
        return tup;
    }

    bool ends_expr() const {
        return at(Token::Kind::Newline) || at(Token::Kind::End) || at_op(")") || at_op("]") ||
               at_op("}") || at_op(":") || at_op(";") || at_op("=") || at(Token::Kind::Dedent);
    }

    ExprPtr parse_star_or_named() {
        if (at_op("*")) {
            auto e = make(ExprKind::Starred, cur());
            next();
            e->operands.push_back(parse_or());
            e->end_line = prev_line();
            return maybe_as(e);
        }
        return maybe_as(parse_namedexpr());
    }

    /// Inside match patterns, sub-patterns may carry "as" captures
    /// (e.g. ast.Constant(value=str() as doc)).
    ExprPtr maybe_as(ExprPtr e) {
        if (!in_pattern_ || !at_name("as")) return e;
        auto as = make(ExprKind::NamedExpr, cur());
        next();
        as->operands.push_back(e);
        auto nm = make(ExprKind::Name, cur());
        nm->text = expect_name();
        as->operands.push_back(nm);
        return as;
    }

    ExprPtr parse_namedexpr() {
        ExprPtr e = parse_test();
        if (at_op(":=")) {
            auto w = make(ExprKind::NamedExpr, cur());
            next();
            w->line = e->line;
            w->operands.push_back(e);
            w->operands.push_back(parse_test());
            w->end_line = prev_line();
            return w;
        }
        return e;
    }

    ExprPtr parse_test() {
        if (at_name("lambda")) return parse_lambda();
        if (at_name("yield")) return parse_yield();
        ExprPtr e = parse_or();
        if (at_name("if")) {
            // Conditional expression; 'if' inside comprehensions is handled
            // by the comprehension parser before reaching here.
            auto c = make(ExprKind::IfExp, cur());
            next();
            c->line = e->line;
            c->operands.push_back(e);
            c->operands.push_back(parse_or());
            if (!accept_name("else")) fail("expected 'else' in conditional expression");
            c->operands.push_back(parse_test());
            c->end_line = prev_line();
            return c;
        }
        return e;
    }

    ExprPtr parse_lambda() {
        auto e = make(ExprKind::Lambda, cur());
        next();
        while (!at_op(":")) {
            if (accept_op("*") ) {
                if (at(Token::Kind::Name)) e->param_names.push_back(expect_name());
            } else if (accept_op("**")) {
                e->param_names.push_back(expect_name());
            } else if (accept_op("/")) {
            } else {
                e->param_names.push_back(expect_name());
                if (accept_op("=")) parse_test();
            }
            if (!accept_op(",")) break;
        }
        expect_op(":");
        e->operands.push_back(parse_test());
        e->end_line = prev_line();
        return e;
    }

    ExprPtr parse_yield() {
        auto e = make(ExprKind::Yield, cur());
        next();
        if (accept_name("from")) {
            e->kind = ExprKind::YieldFrom;
            e->operands.push_back(parse_test());
        } else if (!ends_expr() && !at_op(",")) {
            e->operands.push_back(parse_testlist_star());
        }
        e->end_line = prev_line();
        return e;
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        if (!at_name("or")) return e;
        auto b = make(ExprKind::BoolOp, cur());
        b->line = e->line;
        b->text = "or";
        b->operands.push_back(e);
        while (accept_name("or")) b->operands.push_back(parse_and());
        b->end_line = prev_line();
        return b;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_not();
        if (!at_name("and")) return e;
        auto b = make(ExprKind::BoolOp, cur());
        b->line = e->line;
        b->text = "and";
        b->operands.push_back(e);
        while (accept_name("and")) b->operands.push_back(parse_not());
        b->end_line = prev_line();
        return b;
    }

    ExprPtr parse_not() {
        if (at_name("not")) {
            auto e = make(ExprKind::UnaryOp, cur());
            e->text = "not ";
            next();
            e->operands.push_back(parse_not());
            e->end_line = prev_line();
            return e;
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr e = parse_bitor();
        ExprPtr cmp;
        while (true) {
            std::string op;
            if (at_op("<") || at_op(">") || at_op("==") || at_op("!=") || at_op("<=") || at_op(">=")) {
                op = cur().text;
                next();
            } else if (at_name("in")) {
                op = "in";
                next();
            } else if (at_name("not") && peek().is_name("in")) {
                op = "not in";
                next();
                next();
            } else if (at_name("is")) {
                next();
                op = accept_name("not") ? "is not" : "is";
            } else {
                break;
            }
            if (!cmp) {
                cmp = make(ExprKind::Compare, toks_[pos_ > 0 ? pos_ - 1 : 0]);
                cmp->line = e->line;
                cmp->col = e->col;
                cmp->operands.push_back(e);
            }
            cmp->ops.push_back(op);
            cmp->operands.push_back(parse_bitor());
        }
        if (cmp) {
            cmp->end_line = prev_line();
            return cmp;
        }
        return e;
    }

    ExprPtr binop_chain(ExprPtr (Parser::*sub)(), std::initializer_list<std::string_view> ops) {
        ExprPtr e = (this->*sub)();
        while (true) {
            bool matched = false;
            for (auto op : ops) {
                if (at_op(op)) {
                    auto b = make(ExprKind::BinOp, cur());
                    b->line = e->line;
                    b->col = e->col;
                    b->text = std::string(op);
                    next();
                    b->operands.push_back(e);
                    b->operands.push_back((this->*sub)());
                    b->end_line = prev_line();
                    e = b;
                    matched = true;
                    break;
                }
            }
            if (!matched) return e;
        }
    }

    ExprPtr parse_bitor() { return binop_chain(&Parser::parse_bitxor, {"|"}); }
    ExprPtr parse_bitxor() { return binop_chain(&Parser::parse_bitand, {"^"}); }
    ExprPtr parse_bitand() { return binop_chain(&Parser::parse_shift, {"&"}); }
    ExprPtr parse_shift() { return binop_chain(&Parser::parse_arith, {"<<", ">>"}); }
    ExprPtr parse_arith() { return binop_chain(&Parser::parse_term, {"+", "-"}); }
    ExprPtr parse_term() {
        return binop_chain(&Parser::parse_factor, {"*", "@", "/", "//", "%"});
    }

    ExprPtr parse_factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            auto e = make(ExprKind::UnaryOp, cur());
            e->text = cur().text;
            next();
            e->operands.push_back(parse_factor());
            e->end_line = prev_line();
            return e;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr e = parse_await_primary();
        if (at_op("**")) {
            auto b = make(ExprKind::BinOp, cur());
            b->line = e->line;
            b->text = "**";
            next();
            b->operands.push_back(e);
            b->operands.push_back(parse_factor());
            b->end_line = prev_line();
            return b;
        }
        return e;
    }

    ExprPtr parse_await_primary() {
        if (at_name("await")) {
            auto e = make(ExprKind::Await, cur());
            next();
            e->operands.push_back(parse_await_primary());
            e->end_line = prev_line();
            return e;
        }
        return parse_trailers(parse_atom());
    }

    ExprPtr parse_trailers(ExprPtr base) {
        while (true) {
            if (at_op("(")) {
                auto call = make(ExprKind::Call, cur());
                call->line = base->line;
                call->col = base->col;
                call->operands.push_back(base);
                next();
                parse_call_args(call);
                expect_op(")");
                call->end_line = prev_line();
                base = call;
            } else if (at_op("[")) {
                auto sub = make(ExprKind::Subscript, cur());
                sub->line = base->line;
                sub->col = base->col;
                sub->operands.push_back(base);
                next();
                sub->operands.push_back(parse_subscript_index());
                expect_op("]");
                sub->end_line = prev_line();
                base = sub;
            } else if (at_op(".")) {
                auto attr = make(ExprKind::Attribute, cur());
                attr->line = base->line;
                attr->col = base->col;
                next();
                attr->text = expect_name();
                attr->operands.push_back(base);
                attr->end_line = prev_line();
                base = attr;
            } else {
                return base;
            }
        }
    }

    void parse_call_args(ExprPtr& call) {
        while (!at_op(")")) {
            if (at_op("*")) {
                auto e = make(ExprKind::Starred, cur());
                next();
                e->operands.push_back(parse_test());
                e->end_line = prev_line();
                call->operands.push_back(e);
            } else if (at_op("**")) {
                next();
                Kwarg kw;
                kw.value = parse_test();
                call->kwargs.push_back(std::move(kw));
            } else if (at(Token::Kind::Name) && peek().is_op("=") && !is_reserved(cur().text)) {
                Kwarg kw;
                kw.name = cur().text;
                next();
                next();
                kw.value = maybe_as(parse_test());
                call->kwargs.push_back(std::move(kw));
            } else {
                ExprPtr arg = parse_namedexpr();
                if (at_name("for") || (at_name("async") && peek().is_name("for"))) {
                    auto gen = make(ExprKind::GeneratorExp, cur());
                    gen->line = arg->line;
                    gen->operands.push_back(arg);
                    parse_comp_clauses(gen);
                    gen->end_line = prev_line();
                    arg = gen;
                }
                call->operands.push_back(arg);
            }
            if (!accept_op(",")) break;
        }
    }

    ExprPtr parse_subscript_index() {
        auto parse_one = [&]() -> ExprPtr {
            ExprPtr lower, upper, step;
            bool is_slice = false;
            if (!at_op(":")) lower = parse_namedexpr();
            if (at_op(":")) {
                is_slice = true;
                next();
                if (!at_op(":") && !at_op("]") && !at_op(",")) upper = parse_test();
                if (accept_op(":")) {
                    if (!at_op("]") && !at_op(",")) step = parse_test();
                }
            }
            if (!is_slice) return lower;
            auto s = make(ExprKind::Slice, cur());
            if (lower) s->line = lower->line;
            s->operands.push_back(lower);
            s->operands.push_back(upper);
            s->operands.push_back(step);
            s->end_line = prev_line();
            return s;
        };
        ExprPtr first = at_op("*") ? parse_star_or_named() : parse_one();
        if (!at_op(",")) return first;
        auto tup = make(ExprKind::Tuple, cur());
        tup->line = first->line;
        tup->operands.push_back(first);
        while (accept_op(",")) {
            if (at_op("]")) break;
            tup->operands.push_back(at_op("*") ? parse_star_or_named() : parse_one());
        }
        tup->end_line = prev_line();
        return tup;
    }

    void parse_comp_clauses(ExprPtr& comp) {
        while (true) {
            Comprehension c;
            if (at_name("async") && peek().is_name("for")) {
                c.is_async = true;
                next();
            }
            if (!accept_name("for")) break;
            c.target = parse_target_list();
            if (!accept_name("in")) fail("expected 'in' in comprehension");
            c.iter = parse_or();
            while (at_name("if")) {
                next();
                c.conditions.push_back(parse_or_nocond());
            }
            comp->comps.push_back(std::move(c));
            if (!(at_name("for") || (at_name("async") && peek().is_name("for")))) break;
        }
    }

    /// Comprehension conditions: ternary requires parentheses here.
    ExprPtr parse_or_nocond() {
        if (at_name("lambda")) return parse_lambda();
        return parse_or();
    }

    /// Assignment / loop targets. Parsed at bit-or precedence so a
    /// following 'in' or '=' is never consumed.
    ExprPtr parse_target() {
        if (at_op("*")) {
            auto e = make(ExprKind::Starred, cur());
            next();
            e->operands.push_back(parse_target());
            return e;
        }
        return parse_bitor();
    }

    ExprPtr parse_target_list() {
        ExprPtr first = parse_target();
        if (!at_op(",")) return first;
        auto tup = make(ExprKind::Tuple, cur());
        tup->line = first->line;
        tup->operands.push_back(first);
        while (accept_op(",")) {
            if (at_name("in") || ends_expr()) break;
            tup->operands.push_back(parse_target());
        }
        tup->end_line = prev_line();
        return tup;
    }

    ExprPtr parse_atom() {
        const Token& t = cur();
        switch (t.kind) {
            case Token::Kind::Number: {
                auto e = make(ExprKind::Number, t);
                e->text = t.text;
                next();
                return e;
            }
            case Token::Kind::String:
                return parse_string_group();
            case Token::Kind::Name: {
                if (t.text == "None") { auto e = make(ExprKind::NoneConst, t); next(); return e; }
                if (t.text == "True" || t.text == "False") {
                    auto e = make(ExprKind::BoolConst, t);
                    e->text = t.text;
                    next();
                    return e;
                }
                if (is_reserved(t.text)) fail("unexpected keyword '" + t.text + "'");
                auto e = make(ExprKind::Name, t);
                e->text = t.text;
                next();
                return e;
            }
            case Token::Kind::Op:
                if (t.text == "(") return parse_paren_atom();
                if (t.text == "[") return parse_list_atom();
                if (t.text == "{") return parse_dict_set_atom();
                if (t.text == "...") { auto e = make(ExprKind::EllipsisLit, t); next(); return e; }
                fail("unexpected token '" + t.text + "'");
            default:
                fail("unexpected token in expression");
        }
    }

    ExprPtr parse_string_group() {
        auto e = make(ExprKind::StringLit, cur());
        while (at(Token::Kind::String)) {
            const Token& t = cur();
            e->str_is_fstring = e->str_is_fstring || t.fstring;
            e->str_is_bytes = e->str_is_bytes || t.bytes;
            for (const auto& p : t.pieces) {
                if (!p.placeholder && !e->pieces.empty() && !e->pieces.back().placeholder)
                    e->pieces.back().text += p.text;
                else
                    e->pieces.push_back(p);
            }
            next();
        }
        e->end_line = prev_line();
        return e;
    }

    ExprPtr parse_paren_atom() {
        const Token& open = cur();
        next();
        if (at_op(")")) {
            auto e = make(ExprKind::Tuple, open);
            next();
            return e;
        }
        if (at_name("yield")) {
            ExprPtr y = parse_yield();
            expect_op(")");
            return y;
        }
        ExprPtr first = parse_star_or_named();
        if (at_name("for") || (at_name("async") && peek().is_name("for"))) {
            auto gen = make(ExprKind::GeneratorExp, open);
            gen->operands.push_back(first);
            parse_comp_clauses(gen);
            expect_op(")");
            gen->end_line = prev_line();
            return gen;
        }
        if (at_op(",")) {
            auto tup = make(ExprKind::Tuple, open);
            tup->operands.push_back(first);
            while (accept_op(",")) {
                if (at_op(")")) break;
                tup->operands.push_back(parse_star_or_named());
            }
            expect_op(")");
            tup->end_line = prev_line();
            return tup;
        }
        expect_op(")");
        return first;
    }

    ExprPtr parse_list_atom() {
        const Token& open = cur();
        next();
        if (at_op("]")) {
            auto e = make(ExprKind::List, open);
            next();
            return e;
        }
        ExprPtr first = parse_star_or_named();
        if (at_name("for") || (at_name("async") && peek().is_name("for"))) {
            auto comp = make(ExprKind::ListComp, open);
            comp->operands.push_back(first);
            parse_comp_clauses(comp);
            expect_op("]");
            comp->end_line = prev_line();
            return comp;
        }
        auto lst = make(ExprKind::List, open);
        lst->operands.push_back(first);
        while (accept_op(",")) {
            if (at_op("]")) break;
            lst->operands.push_back(parse_star_or_named());
        }
        expect_op("]");
        lst->end_line = prev_line();
        return lst;
    }

    ExprPtr parse_dict_set_atom() {
        const Token& open = cur();
        next();
        if (at_op("}")) {
            auto e = make(ExprKind::Dict, open);
            next();
            return e;
        }
        if (at_op("**")) {
            auto d = make(ExprKind::Dict, open);
            parse_dict_entries(d, nullptr);
            expect_op("}");
            d->end_line = prev_line();
            return d;
        }
        ExprPtr first = parse_star_or_named();
        if (at_op(":")) {
            next();
            ExprPtr value = parse_test();
            if (at_name("for") || (at_name("async") && peek().is_name("for"))) {
                auto comp = make(ExprKind::DictComp, open);
                comp->operands.push_back(first);
                comp->operands.push_back(value);
                parse_comp_clauses(comp);
                expect_op("}");
                comp->end_line = prev_line();
                return comp;
            }
            auto d = make(ExprKind::Dict, open);
            d->operands.push_back(first);
            d->operands.push_back(value);
            if (accept_op(",")) parse_dict_entries(d, nullptr);
            expect_op("}");
            d->end_line = prev_line();
            return d;
        }
        if (at_name("for") || (at_name("async") && peek().is_name("for"))) {
            auto comp = make(ExprKind::SetComp, open);
            comp->operands.push_back(first);
            parse_comp_clauses(comp);
            expect_op("}");
            comp->end_line = prev_line();
            return comp;
        }
        auto set = make(ExprKind::Set, open);
        set->operands.push_back(first);
        while (accept_op(",")) {
            if (at_op("}")) break;
            set->operands.push_back(parse_star_or_named());
        }
        expect_op("}");
        set->end_line = prev_line();
        return set;
    }

    void parse_dict_entries(ExprPtr& d, ExprPtr pending_key) {
        (void)pending_key;
        while (!at_op("}")) {
            if (accept_op("**")) {
                d->operands.push_back(nullptr);
                d->operands.push_back(parse_or());
            } else {
                d->operands.push_back(parse_test());
                expect_op(":");
                d->operands.push_back(parse_test());
            }
            if (!accept_op(",")) break;
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::string path_;
    bool in_pattern_ = false;
};

inline std::vector<StmtPtr> parse_python(std::string_view src, const std::string& path) {
    return Parser(tokenize(src, path), path).parse_module();
}

}  // namespace mlloglint
