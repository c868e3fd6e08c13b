#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "nonarch/field.hpp"

namespace nonarch {

class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, size_t pos)
        : Error(what + " (at position " + std::to_string(pos) + ")"), position(pos) {}
    size_t position;
};

class SortError : public Error {
public:
    explicit SortError(const std::string& what) : Error(what) {}
};

enum class Sort { VF, RF, Z };

inline const char* sort_name(Sort s) {
    switch (s) {
        case Sort::VF: return "VF";
        case Sort::RF: return "RF";
        case Sort::Z: return "Z";
    }
    return "?";
}

/// Three-valued truth: unknown propagates, never guesses.
enum class TriBool { False, Unknown, True };

inline TriBool tri_not(TriBool a) {
    if (a == TriBool::Unknown) return a;
    return a == TriBool::True ? TriBool::False : TriBool::True;
}
inline TriBool tri_and(TriBool a, TriBool b) {
    if (a == TriBool::False || b == TriBool::False) return TriBool::False;
    if (a == TriBool::Unknown || b == TriBool::Unknown) return TriBool::Unknown;
    return TriBool::True;
}
inline TriBool tri_or(TriBool a, TriBool b) {
    if (a == TriBool::True || b == TriBool::True) return TriBool::True;
    if (a == TriBool::Unknown || b == TriBool::Unknown) return TriBool::Unknown;
    return TriBool::False;
}

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Terms of the three-sorted language: +,* in VF and RF, + in Z,
/// ord: VF -> Z, ac: VF -> RF, integer literals, INF in the Z sort.
struct Term {
    enum class Op { variable, literal, inf, add, mul, ord, ac };
    Op op;
    Sort sort;
    std::string name;   // variable
    long value = 0;     // literal
    std::vector<TermPtr> args;

    static TermPtr var(std::string n, Sort s) {
        auto t = std::make_shared<Term>();
        t->op = Op::variable;
        t->sort = s;
        t->name = std::move(n);
        return t;
    }
    static TermPtr lit(long v, Sort s) {
        auto t = std::make_shared<Term>();
        t->op = Op::literal;
        t->sort = s;
        t->value = v;
        return t;
    }
    static TermPtr infinity() {
        auto t = std::make_shared<Term>();
        t->op = Op::inf;
        t->sort = Sort::Z;
        return t;
    }
    static TermPtr binary(Op o, TermPtr a, TermPtr b) {
        if (a->sort != b->sort) throw SortError("operands of different sorts");
        if (o == Op::mul && a->sort == Sort::Z) throw SortError("no multiplication in the Z sort");
        auto t = std::make_shared<Term>();
        t->op = o;
        t->sort = a->sort;
        t->args = {std::move(a), std::move(b)};
        return t;
    }
    static TermPtr apply_ord(TermPtr a) {
        if (a->sort != Sort::VF) throw SortError("ord expects a VF term");
        auto t = std::make_shared<Term>();
        t->op = Op::ord;
        t->sort = Sort::Z;
        t->args = {std::move(a)};
        return t;
    }
    static TermPtr apply_ac(TermPtr a) {
        if (a->sort != Sort::VF) throw SortError("ac expects a VF term");
        auto t = std::make_shared<Term>();
        t->op = Op::ac;
        t->sort = Sort::RF;
        t->args = {std::move(a)};
        return t;
    }

    bool equals(const Term& o) const {
        if (op != o.op || sort != o.sort || name != o.name || value != o.value ||
            args.size() != o.args.size())
            return false;
        for (size_t i = 0; i < args.size(); ++i)
            if (!args[i]->equals(*o.args[i])) return false;
        return true;
    }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    enum class Kind { eq, ge, congruence, conj, disj, negation, exists, forall };
    Kind kind;
    TermPtr lhs, rhs;      // atoms
    long modulus = 0;      // congruence
    std::vector<FormulaPtr> children;
    std::string var;       // quantifiers
    Sort var_sort = Sort::VF;

    static FormulaPtr atom_eq(TermPtr a, TermPtr b) {
        if (a->sort != b->sort) throw SortError("equality across sorts");
        auto f = std::make_shared<Formula>();
        f->kind = Kind::eq;
        f->lhs = std::move(a);
        f->rhs = std::move(b);
        return f;
    }
    static FormulaPtr atom_ge(TermPtr a, TermPtr b) {
        if (a->sort != Sort::Z || b->sort != Sort::Z) throw SortError(">= lives in the Z sort");
        auto f = std::make_shared<Formula>();
        f->kind = Kind::ge;
        f->lhs = std::move(a);
        f->rhs = std::move(b);
        return f;
    }
    static FormulaPtr atom_congruence(TermPtr a, TermPtr b, long n) {
        if (a->sort != Sort::Z || b->sort != Sort::Z) throw SortError("congruence lives in the Z sort");
        if (n < 1) throw SortError("congruence modulus must be positive");
        auto f = std::make_shared<Formula>();
        f->kind = Kind::congruence;
        f->lhs = std::move(a);
        f->rhs = std::move(b);
        f->modulus = n;
        return f;
    }
    static FormulaPtr connective(Kind k, std::vector<FormulaPtr> cs) {
        auto f = std::make_shared<Formula>();
        f->kind = k;
        f->children = std::move(cs);
        return f;
    }
    static FormulaPtr quantifier(Kind k, std::string v, Sort s, FormulaPtr body) {
        auto f = std::make_shared<Formula>();
        f->kind = k;
        f->var = std::move(v);
        f->var_sort = s;
        f->children = {std::move(body)};
        return f;
    }

    bool equals(const Formula& o) const {
        if (kind != o.kind || modulus != o.modulus || var != o.var || var_sort != o.var_sort ||
            children.size() != o.children.size())
            return false;
        if ((lhs == nullptr) != (o.lhs == nullptr)) return false;
        if (lhs && (!lhs->equals(*o.lhs) || !rhs->equals(*o.rhs))) return false;
        for (size_t i = 0; i < children.size(); ++i)
            if (!children[i]->equals(*o.children[i])) return false;
        return true;
    }
};

// ---------------------------------------------------------------------------
// printing

namespace dpdetail {

inline void print_term(const Term& t, std::string& out) {
    switch (t.op) {
        case Term::Op::variable: out += t.name; break;
        case Term::Op::literal: out += std::to_string(t.value); break;
        case Term::Op::inf: out += "INF"; break;
        case Term::Op::add:
        case Term::Op::mul:
            out += '(';
            print_term(*t.args[0], out);
            out += t.op == Term::Op::add ? " + " : " * ";
            print_term(*t.args[1], out);
            out += ')';
            break;
        case Term::Op::ord:
            out += "ord(";
            print_term(*t.args[0], out);
            out += ')';
            break;
        case Term::Op::ac:
            out += "ac(";
            print_term(*t.args[0], out);
            out += ')';
            break;
    }
}

inline void print_formula(const Formula& f, std::string& out) {
    switch (f.kind) {
        case Formula::Kind::eq:
            print_term(*f.lhs, out);
            out += " = ";
            print_term(*f.rhs, out);
            break;
        case Formula::Kind::ge:
            print_term(*f.lhs, out);
            out += " >= ";
            print_term(*f.rhs, out);
            break;
        case Formula::Kind::congruence:
            print_term(*f.lhs, out);
            out += " =_" + std::to_string(f.modulus) + "= ";
            print_term(*f.rhs, out);
            break;
        case Formula::Kind::conj:
        case Formula::Kind::disj: {
            auto child = [&](const Formula& ch) {
                bool quant = ch.kind == Formula::Kind::exists || ch.kind == Formula::Kind::forall;
                if (quant) out += '(';
                print_formula(ch, out);
                if (quant) out += ')';
            };
            out += '(';
            child(*f.children[0]);
            out += f.kind == Formula::Kind::conj ? " /\\ " : " \\/ ";
            child(*f.children[1]);
            out += ')';
            break;
        }
        case Formula::Kind::negation:
            out += "~(";
            print_formula(*f.children[0], out);
            out += ')';
            break;
        case Formula::Kind::exists:
        case Formula::Kind::forall:
            out += f.kind == Formula::Kind::exists ? "EX " : "ALL ";
            out += f.var;
            out += ':';
            out += sort_name(f.var_sort);
            out += ". ";
            print_formula(*f.children[0], out);
            break;
    }
}

}  // namespace dpdetail

inline std::string print(const FormulaPtr& f) {
    std::string out;
    dpdetail::print_formula(*f, out);
    return out;
}

// ---------------------------------------------------------------------------
// parsing

namespace dpdetail {

struct Token {
    enum class Kind { ident, number, sym, eof } kind;
    std::string text;
    size_t pos;
};

inline std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    size_t i = 0;
    auto sym = [&](const std::string& t) { out.push_back({Token::Kind::sym, t, i}); };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() &&
                   (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Token::Kind::ident, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            out.push_back({Token::Kind::number, s.substr(i, j - i), i});
            i = j;
            continue;
        }
        if (s.compare(i, 2, "/\\") == 0) { sym("/\\"); i += 2; continue; }
        if (s.compare(i, 2, "\\/") == 0) { sym("\\/"); i += 2; continue; }
        if (s.compare(i, 2, ">=") == 0) { sym(">="); i += 2; continue; }
        if (s.compare(i, 2, "=_") == 0) {
            size_t j = i + 2;
            size_t k = j;
            while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
            if (k == j || k >= s.size() || s[k] != '=')
                throw SyntaxError("malformed congruence symbol", i);
            out.push_back({Token::Kind::sym, s.substr(i, k + 1 - i), i});
            i = k + 1;
            continue;
        }
        if (std::string("()=~+*.:-").find(c) != std::string::npos) {
            sym(std::string(1, c));
            ++i;
            continue;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", i);
    }
    out.push_back({Token::Kind::eof, "", s.size()});
    return out;
}

struct Parser {
    std::vector<Token> toks;
    size_t at = 0;
    std::map<std::string, Sort> scope;

    const Token& peek() const { return toks[at]; }
    Token take() { return toks[at++]; }
    bool accept_sym(const std::string& t) {
        if (peek().kind == Token::Kind::sym && peek().text == t) {
            ++at;
            return true;
        }
        return false;
    }
    void expect_sym(const std::string& t) {
        if (!accept_sym(t)) throw SyntaxError("expected '" + t + "'", peek().pos);
    }

    Sort parse_sort() {
        const Token& t = peek();
        if (t.kind == Token::Kind::ident) {
            if (t.text == "VF") { ++at; return Sort::VF; }
            if (t.text == "RF") { ++at; return Sort::RF; }
            if (t.text == "Z") { ++at; return Sort::Z; }
        }
        throw SyntaxError("expected a sort (VF, RF or Z)", t.pos);
    }

    FormulaPtr parse_formula() {
        if (peek().kind == Token::Kind::ident &&
            (peek().text == "EX" || peek().text == "ALL")) {
            bool ex = take().text == "EX";
            if (peek().kind != Token::Kind::ident)
                throw SyntaxError("expected a variable name", peek().pos);
            std::string name = take().text;
            expect_sym(":");
            Sort s = parse_sort();
            expect_sym(".");
            auto saved = scope.find(name) != scope.end()
                             ? std::optional<Sort>(scope[name])
                             : std::nullopt;
            scope[name] = s;
            FormulaPtr body = parse_formula();
            if (saved)
                scope[name] = *saved;
            else
                scope.erase(name);
            return Formula::quantifier(ex ? Formula::Kind::exists : Formula::Kind::forall, name,
                                       s, body);
        }
        return parse_disj();
    }

    FormulaPtr parse_disj() {
        FormulaPtr f = parse_conj();
        while (accept_sym("\\/")) f = Formula::connective(Formula::Kind::disj, {f, parse_conj()});
        return f;
    }

    FormulaPtr parse_conj() {
        FormulaPtr f = parse_neg();
        while (accept_sym("/\\")) f = Formula::connective(Formula::Kind::conj, {f, parse_neg()});
        return f;
    }

    FormulaPtr parse_neg() {
        if (accept_sym("~")) {
            expect_sym("(");
            FormulaPtr f = parse_formula();
            expect_sym(")");
            return Formula::connective(Formula::Kind::negation, {f});
        }
        if (peek().kind == Token::Kind::sym && peek().text == "(") {
            // could be a parenthesized formula or a parenthesized term in an
            // atom; try the formula reading first
            size_t save = at;
            try {
                expect_sym("(");
                FormulaPtr f = parse_formula();
                expect_sym(")");
                if (peek().kind == Token::Kind::sym &&
                    (peek().text == "=" || peek().text == ">=" || peek().text[0] == '='))
                    throw SyntaxError("atom", peek().pos);  // backtrack: it was a term
                return f;
            } catch (const Error&) {
                at = save;
            }
        }
        return parse_atom();
    }

    FormulaPtr parse_atom() {
        TermPtr a = parse_term(std::nullopt);
        const Token& t = peek();
        if (t.kind != Token::Kind::sym) throw SyntaxError("expected a relation", t.pos);
        if (accept_sym("=")) {
            TermPtr b = parse_term(literal_only(*a) ? std::nullopt
                                                    : std::optional<Sort>(a->sort));
            if (literal_only(*a) && !literal_only(*b))
                a = coerce(a, b->sort);
            else if (literal_only(*b) && b->sort != a->sort)
                b = coerce(b, a->sort);
            return Formula::atom_eq(a, b);
        }
        if (accept_sym(">=")) {
            TermPtr b = parse_term(Sort::Z);
            return Formula::atom_ge(coerce(a, Sort::Z), coerce(b, Sort::Z));
        }
        if (t.text.size() > 2 && t.text.substr(0, 2) == "=_") {
            std::string sym = take().text;
            long n = std::stol(sym.substr(2, sym.size() - 3));
            TermPtr b = parse_term(Sort::Z);
            return Formula::atom_congruence(coerce(a, Sort::Z), coerce(b, Sort::Z), n);
        }
        throw SyntaxError("expected '=', '>=' or '=_n='", t.pos);
    }

    /// Literals carry no sort in the concrete syntax; whole literal-only
    /// subtrees are re-sorted from context.
    static bool literal_only(const Term& t) {
        switch (t.op) {
            case Term::Op::literal: return true;
            case Term::Op::add:
            case Term::Op::mul:
                return literal_only(*t.args[0]) && literal_only(*t.args[1]);
            default: return false;
        }
    }

    static TermPtr coerce(const TermPtr& t, Sort want) {
        if (t->sort == want) return t;
        if (t->op == Term::Op::literal) return Term::lit(t->value, want);
        if ((t->op == Term::Op::add || t->op == Term::Op::mul) && literal_only(*t))
            return Term::binary(t->op, coerce(t->args[0], want), coerce(t->args[1], want));
        throw SortError(std::string("term of sort ") + sort_name(t->sort) + " used as " +
                        sort_name(want));
    }

    TermPtr parse_term(std::optional<Sort> want) {
        TermPtr t = parse_sum(want);
        if (want) t = coerce(t, *want);
        return t;
    }

    TermPtr combine(Term::Op op, TermPtr t, TermPtr u) {
        bool lt = literal_only(*t), lu = literal_only(*u);
        Sort s;
        if (lt && lu)
            s = op == Term::Op::mul ? Sort::RF : Sort::Z;  // placeholder; atoms re-sort
        else
            s = lt ? u->sort : t->sort;
        return Term::binary(op, coerce(t, s), coerce(u, s));
    }

    TermPtr parse_sum(std::optional<Sort> want) {
        TermPtr t = parse_product(want);
        while (accept_sym("+")) t = combine(Term::Op::add, t, parse_product(want));
        return t;
    }

    TermPtr parse_product(std::optional<Sort> want) {
        TermPtr t = parse_unary(want);
        while (accept_sym("*")) t = combine(Term::Op::mul, t, parse_unary(want));
        return t;
    }

    TermPtr parse_unary(std::optional<Sort> want) {
        const Token& t = peek();
        if (t.kind == Token::Kind::sym && t.text == "(") {
            expect_sym("(");
            TermPtr inner = parse_sum(want);
            expect_sym(")");
            return inner;
        }
        if (t.kind == Token::Kind::sym && t.text == "-") {
            throw SyntaxError("negative literals are not part of the language", t.pos);
        }
        if (t.kind == Token::Kind::number) {
            long v = std::stol(take().text);
            return Term::lit(v, want.value_or(Sort::Z));
        }
        if (t.kind == Token::Kind::ident) {
            if (t.text == "INF") {
                ++at;
                return Term::infinity();
            }
            if (t.text == "ord") {
                ++at;
                expect_sym("(");
                TermPtr arg = parse_sum(Sort::VF);
                expect_sym(")");
                return Term::apply_ord(coerce(arg, Sort::VF));
            }
            if (t.text == "ac") {
                ++at;
                expect_sym("(");
                TermPtr arg = parse_sum(Sort::VF);
                expect_sym(")");
                return Term::apply_ac(coerce(arg, Sort::VF));
            }
            std::string name = take().text;
            auto it = scope.find(name);
            if (it == scope.end())
                throw SortError("variable '" + name + "' has no declared sort");
            return Term::var(name, it->second);
        }
        throw SyntaxError("expected a term", t.pos);
    }
};

}  // namespace dpdetail

/// Parse a formula; free variables must be declared with their sorts.
inline FormulaPtr parse(const std::string& text,
                        const std::map<std::string, Sort>& free_vars = {}) {
    dpdetail::Parser p;
    p.toks = dpdetail::tokenize(text);
    p.scope = free_vars;
    FormulaPtr f = p.parse_formula();
    if (p.peek().kind != dpdetail::Token::Kind::eof)
        throw SyntaxError("trailing input", p.peek().pos);
    return f;
}

// ---------------------------------------------------------------------------
// evaluation over a boxed model

/// Finite enumeration windows for the three sorts plus the variable
/// assignment: the specialization of a formula to one field, evaluated over
/// representatives instead of the full (infinite) field.
struct EvalContext {
    FieldSpec field;
    std::map<std::string, Element> vf;
    std::map<std::string, long> rf;
    std::map<std::string, long> z;  // kInfiniteOrd encodes INF

    long vf_val_lo = -2, vf_val_hi = 2;
    int vf_depth = 2;
    long z_lo = -8, z_hi = 8;

    EvalContext widened() const {
        EvalContext w = *this;
        w.vf_val_lo -= 1;
        w.vf_val_hi += 1;
        w.vf_depth += 1;
        w.z_lo -= 1;
        w.z_hi += 1;
        return w;
    }
};

namespace dpdetail {

struct ZVal {
    long v;
    bool inf;
};

inline Element eval_vf(const Term& t, const EvalContext& ctx);

inline ZVal eval_z(const Term& t, const EvalContext& ctx) {
    switch (t.op) {
        case Term::Op::variable: {
            auto it = ctx.z.find(t.name);
            if (it == ctx.z.end()) throw Error("unassigned Z variable " + t.name);
            return {it->second, it->second == kInfiniteOrd};
        }
        case Term::Op::literal: return {t.value, false};
        case Term::Op::inf: return {0, true};
        case Term::Op::add: {
            ZVal a = eval_z(*t.args[0], ctx), b = eval_z(*t.args[1], ctx);
            if (a.inf || b.inf) return {0, true};
            return {a.v + b.v, false};
        }
        case Term::Op::ord: {
            Element e = eval_vf(*t.args[0], ctx);
            long v = e.ord();
            return {v, v == kInfiniteOrd};
        }
        default: throw SortError("not a Z term");
    }
}

inline long eval_rf(const Term& t, const EvalContext& ctx) {
    const long p = ctx.field.p;
    switch (t.op) {
        case Term::Op::variable: {
            auto it = ctx.rf.find(t.name);
            if (it == ctx.rf.end()) throw Error("unassigned RF variable " + t.name);
            return ((it->second % p) + p) % p;
        }
        case Term::Op::literal: return ((t.value % p) + p) % p;
        case Term::Op::add: return (eval_rf(*t.args[0], ctx) + eval_rf(*t.args[1], ctx)) % p;
        case Term::Op::mul: return (eval_rf(*t.args[0], ctx) * eval_rf(*t.args[1], ctx)) % p;
        case Term::Op::ac: return eval_vf(*t.args[0], ctx).ac();
        default: throw SortError("not an RF term");
    }
}

inline Element eval_vf(const Term& t, const EvalContext& ctx) {
    switch (t.op) {
        case Term::Op::variable: {
            auto it = ctx.vf.find(t.name);
            if (it == ctx.vf.end()) throw Error("unassigned VF variable " + t.name);
            return it->second;
        }
        case Term::Op::literal: return Element::from_integer(ctx.field, t.value);
        case Term::Op::add: return eval_vf(*t.args[0], ctx) + eval_vf(*t.args[1], ctx);
        case Term::Op::mul: return eval_vf(*t.args[0], ctx) * eval_vf(*t.args[1], ctx);
        default: throw SortError("not a VF term");
    }
}

inline TriBool eval_formula(const Formula& f, EvalContext& ctx);

inline TriBool eval_atom(const Formula& f, const EvalContext& ctx) {
    try {
        switch (f.kind) {
            case Formula::Kind::eq:
                switch (f.lhs->sort) {
                    case Sort::VF: {
                        auto r = certified_equal(eval_vf(*f.lhs, ctx), eval_vf(*f.rhs, ctx));
                        if (!r.has_value()) return TriBool::Unknown;
                        return *r ? TriBool::True : TriBool::False;
                    }
                    case Sort::RF:
                        return eval_rf(*f.lhs, ctx) == eval_rf(*f.rhs, ctx) ? TriBool::True
                                                                            : TriBool::False;
                    case Sort::Z: {
                        ZVal a = eval_z(*f.lhs, ctx), b = eval_z(*f.rhs, ctx);
                        if (a.inf || b.inf)
                            return a.inf == b.inf ? TriBool::True : TriBool::False;
                        return a.v == b.v ? TriBool::True : TriBool::False;
                    }
                }
                return TriBool::Unknown;
            case Formula::Kind::ge: {
                ZVal a = eval_z(*f.lhs, ctx), b = eval_z(*f.rhs, ctx);
                if (a.inf) return TriBool::True;       // INF >= z
                if (b.inf) return TriBool::False;      // finite >= INF fails
                return a.v >= b.v ? TriBool::True : TriBool::False;
            }
            case Formula::Kind::congruence: {
                ZVal a = eval_z(*f.lhs, ctx), b = eval_z(*f.rhs, ctx);
                if (a.inf || b.inf)
                    return a.inf && b.inf ? TriBool::True : TriBool::False;
                long d = (a.v - b.v) % f.modulus;
                return d == 0 ? TriBool::True : TriBool::False;
            }
            default: throw Error("not an atom");
        }
    } catch (const InsufficientPrecisionError&) {
        return TriBool::Unknown;
    }
}

/// Quantifier ranges: RF enumerates the residue field; Z enumerates the
/// window; VF enumerates the exact zero plus all depth-m digit windows
/// pi^v (d_0 + ... + d_{m-1} pi^{m-1}), d_0 != 0, over the valuation window.
template <typename Fn>
inline TriBool quantify(Sort s, const std::string& var, EvalContext& ctx, bool existential,
                        Fn&& body) {
    TriBool acc = existential ? TriBool::False : TriBool::True;
    auto feed = [&](auto&& assign, auto&& restore) {
        assign();
        TriBool v = body();
        restore();
        acc = existential ? tri_or(acc, v) : tri_and(acc, v);
        return (existential && acc == TriBool::True) ||
               (!existential && acc == TriBool::False);
    };
    switch (s) {
        case Sort::RF: {
            auto saved = ctx.rf.find(var) != ctx.rf.end() ? std::optional<long>(ctx.rf[var])
                                                          : std::nullopt;
            for (long d = 0; d < ctx.field.p; ++d)
                if (feed([&] { ctx.rf[var] = d; }, [] {})) break;
            if (saved)
                ctx.rf[var] = *saved;
            else
                ctx.rf.erase(var);
            break;
        }
        case Sort::Z: {
            auto saved = ctx.z.find(var) != ctx.z.end() ? std::optional<long>(ctx.z[var])
                                                        : std::nullopt;
            for (long v = ctx.z_lo; v <= ctx.z_hi; ++v)
                if (feed([&] { ctx.z[var] = v; }, [] {})) break;
            if (saved)
                ctx.z[var] = *saved;
            else
                ctx.z.erase(var);
            break;
        }
        case Sort::VF: {
            auto saved = ctx.vf.find(var) != ctx.vf.end() ? std::optional<Element>(ctx.vf.at(var))
                                                          : std::nullopt;
            bool stop = feed([&] { ctx.vf.insert_or_assign(var, Element::zero(ctx.field)); }, [] {});
            const long p = ctx.field.p;
            long count = 1;
            for (int i = 1; i < ctx.vf_depth; ++i) count *= p;
            for (long v = ctx.vf_val_lo; v <= ctx.vf_val_hi && !stop; ++v)
                for (long lead = 1; lead < p && !stop; ++lead)
                    for (long rest = 0; rest < count && !stop; ++rest) {
                        std::vector<long> ds{lead};
                        long r = rest;
                        for (int i = 1; i < ctx.vf_depth; ++i) {
                            ds.push_back(r % p);
                            r /= p;
                        }
                        stop = feed(
                            [&] {
                                ctx.vf.insert_or_assign(var,
                                                        Element::from_digits(ctx.field, v, ds));
                            },
                            [] {});
                    }
            if (saved)
                ctx.vf.insert_or_assign(var, *saved);
            else
                ctx.vf.erase(var);
            break;
        }
    }
    return acc;
}

inline TriBool eval_formula(const Formula& f, EvalContext& ctx) {
    switch (f.kind) {
        case Formula::Kind::eq:
        case Formula::Kind::ge:
        case Formula::Kind::congruence:
            return eval_atom(f, ctx);
        case Formula::Kind::conj:
            return tri_and(eval_formula(*f.children[0], ctx), eval_formula(*f.children[1], ctx));
        case Formula::Kind::disj:
            return tri_or(eval_formula(*f.children[0], ctx), eval_formula(*f.children[1], ctx));
        case Formula::Kind::negation:
            return tri_not(eval_formula(*f.children[0], ctx));
        case Formula::Kind::exists:
        case Formula::Kind::forall:
            return quantify(f.var_sort, f.var, ctx, f.kind == Formula::Kind::exists,
                            [&] { return eval_formula(*f.children[0], ctx); });
    }
    return TriBool::Unknown;
}

}  // namespace dpdetail

/// Truth value over the boxed model.
inline TriBool evaluate(const FormulaPtr& f, const EvalContext& ctx) {
    EvalContext work = ctx;
    return dpdetail::eval_formula(*f, work);
}

struct EvalCertificate {
    TriBool value;
    bool box_stable;  // widening every window by one step does not flip it
};

/// Evaluate and check box sensitivity by re-evaluating on the widened box.
inline EvalCertificate evaluate_with_certificate(const FormulaPtr& f, const EvalContext& ctx) {
    TriBool v = evaluate(f, ctx);
    TriBool w = evaluate(f, ctx.widened());
    return {v, v == w};
}

/// A formula with declared free variables, usable as a membership predicate.
struct DefinableSet {
    FormulaPtr formula;
    std::vector<std::pair<std::string, Sort>> free_vars;

    TriBool contains(const std::vector<Element>& point, const EvalContext& base) const {
        if (point.size() != free_vars.size())
            throw Error("DefinableSet: wrong arity");
        EvalContext ctx = base;
        for (size_t i = 0; i < free_vars.size(); ++i) {
            if (free_vars[i].second != Sort::VF)
                throw Error("DefinableSet: only VF points supported here");
            ctx.vf.insert_or_assign(free_vars[i].first, point[i]);
        }
        return evaluate(formula, ctx);
    }
};

inline DefinableSet definable_set(const std::string& text,
                                  std::vector<std::pair<std::string, Sort>> free_vars) {
    std::map<std::string, Sort> scope;
    for (const auto& [n, s] : free_vars) scope[n] = s;
    return DefinableSet{parse(text, scope), std::move(free_vars)};
}

}  // namespace nonarch
