#include "gbe/parse.hpp"

#include <cctype>

namespace gbe {

namespace {

enum class Tok { Num, Ident, Op, End };

struct Token {
    Tok type = Tok::End;
    std::string text;
    std::string suffix;
    char op = 0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t j = i;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && s[j] == '.') {
                ++j;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            }
            t.type = Tok::Num;
            t.text = s.substr(i, j - i);
            if (t.text == ".") throw ParseError("malformed number", i);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
            t.type = Tok::Ident;
            t.text = s.substr(i, j - i);
            if (j < s.size() && s[j] == '_') {
                std::size_t k = j + 1;
                while (k < s.size() && std::isalpha(static_cast<unsigned char>(s[k]))) ++k;
                if (k == j + 1) throw ParseError("empty derivative suffix", j);
                t.suffix = s.substr(j + 1, k - j - 1);
                j = k;
            }
            i = j;
        } else if (std::string("+-*/^(),").find(c) != std::string::npos) {
            t.type = Tok::Op;
            t.op = c;
            t.text = std::string(1, c);
            ++i;
        } else {
            throw ParseError(std::string("unexpected character '") + c + "'", i);
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.pos = s.size();
    out.push_back(end);
    return out;
}

Rational decimal(const std::string& text) {
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(mpz_class(text));
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    mpz_class num(whole.empty() ? "0" : whole);
    mpz_class scale = 1;
    for (char ch : frac) {
        num = num * 10 + (ch - '0');
        scale *= 10;
    }
    Rational q(num, scale);
    q.canonicalize();
    return q;
}

class Parser {
public:
    Parser(const std::string& text, const Context& ctx) : toks_(tokenize(text)), ctx_(ctx) {}

    Expr run() {
        Expr e = expr();
        if (peek().type != Tok::End) throw ParseError("unexpected '" + peek().text + "'", peek().pos);
        return e;
    }

private:
    const Token& peek() const { return toks_[idx_]; }
    bool is_op(char c) const { return peek().type == Tok::Op && peek().op == c; }
    void expect(char c) {
        if (!is_op(c)) {
            std::string got = peek().type == Tok::End ? "end of input" : "'" + peek().text + "'";
            throw ParseError(std::string("expected '") + c + "', got " + got, peek().pos);
        }
        ++idx_;
    }

    Expr expr() {
        Expr e = term();
        while (is_op('+') || is_op('-')) {
            char op = peek().op;
            ++idx_;
            Expr r = term();
            e = op == '+' ? s_.add({e, r}) : s_.add({e, s_.mul({Expr(-1), r})});
        }
        return e;
    }

    // Divisors are parsed already inverted so a denominator such as
    // (a + b)^2*(c + d) stays factored, matching the canonical form that
    // produced the text.
    Expr term(bool invert = false) {
        Expr e = unary(invert);
        while (is_op('*') || is_op('/')) {
            char op = peek().op;
            ++idx_;
            Expr r = unary(op == '*' ? invert : !invert);
            e = s_.mul({e, r});
        }
        return e;
    }

    Expr unary(bool invert = false) {
        if (is_op('-')) {
            ++idx_;
            return s_.mul({Expr(-1), unary(invert)});
        }
        if (is_op('+')) {
            ++idx_;
            return unary(invert);
        }
        return power(invert);
    }

    Expr power(bool invert = false) {
        Expr b = primary(invert);
        if (is_op('^')) {
            std::size_t pos = peek().pos;
            ++idx_;
            Expr q = unary();
            if (!q.is(Kind::Const)) throw ParseError("exponent must be a rational constant", pos);
            return s_.power(b, q.value());
        }
        return b;
    }

    Expr primary(bool invert) {
        if (!invert) return primary();
        if (is_op('(')) {
            // Try a factor-wise inverse of a parenthesised product first.
            std::size_t save = idx_;
            ++idx_;
            try {
                Expr e = term(true);
                if (is_op(')')) {
                    ++idx_;
                    return e;
                }
            } catch (const ParseError&) {
            }
            idx_ = save;
        }
        return s_.power(primary(), -1);
    }

    Expr primary() {
        const Token& t = peek();
        switch (t.type) {
        case Tok::Num:
            ++idx_;
            return Expr(decimal(t.text));
        case Tok::Op:
            if (t.op == '(') {
                ++idx_;
                Expr e = expr();
                expect(')');
                return e;
            }
            throw ParseError("unexpected '" + t.text + "'", t.pos);
        case Tok::End:
            throw ParseError("unexpected end of input", t.pos);
        case Tok::Ident:
            return identifier();
        }
        return Expr(0);
    }

    Expr builtin_arg() {
        expect('(');
        Expr e = expr();
        expect(')');
        return e;
    }

    Expr identifier() {
        Token t = peek();
        ++idx_;
        const std::string& name = t.text;
        static const std::map<std::string, Fn> calls = {{"exp", Fn::Exp}, {"ln", Fn::Ln},     {"log", Fn::Ln},
                                                         {"abs", Fn::Abs}, {"sign", Fn::Sign}, {"sin", Fn::Sin},
                                                         {"cos", Fn::Cos}};
        bool bound = false;
        for (const auto& l : locals_)
            if (l == name) bound = true;
        if (!bound) {
            auto it = calls.find(name);
            if (it != calls.end() || name == "sqrt" || name == "int") {
                if (!t.suffix.empty()) throw ParseError("derivative suffix on builtin " + name, t.pos);
                if (name == "sqrt") return s_.power(builtin_arg(), Rational(1, 2));
                if (name == "int") return integral(t.pos);
                return s_.apply(it->second, builtin_arg());
            }
        }
        if (bound || ctx_.is_variable(name)) {
            if (!t.suffix.empty()) throw ParseError("derivative suffix on variable " + name, t.pos);
            return var(name);
        }
        const auto* params = ctx_.function(name);
        if (!params) throw UndeclaredSymbol(name);
        std::vector<int> orders(params->size(), 0);
        for (std::size_t k = 0; k < t.suffix.size(); ++k) {
            std::string letter(1, t.suffix[k]);
            bool found = false;
            for (std::size_t i = 0; i < params->size(); ++i) {
                if ((*params)[i] == letter) {
                    ++orders[i];
                    found = true;
                }
            }
            if (!found)
                throw ParseError("'" + letter + "' is not an argument of " + name, t.pos + name.size() + 1 + k);
        }
        std::vector<Expr> args;
        if (is_op('(')) {
            std::size_t pos = peek().pos;
            ++idx_;
            args.push_back(expr());
            while (is_op(',')) {
                ++idx_;
                args.push_back(expr());
            }
            expect(')');
            if (args.size() != params->size())
                throw ParseError(name + " takes " + std::to_string(params->size()) + " arguments", pos);
        } else {
            for (const auto& p : *params) args.push_back(var(p));
        }
        return s_.function(name, *params, std::move(args), orders);
    }

    Expr integral(std::size_t pos) {
        expect('(');
        std::size_t start = idx_;
        int depth = 0;
        std::size_t j = idx_;
        for (; toks_[j].type != Tok::End; ++j) {
            const Token& k = toks_[j];
            if (k.type != Tok::Op) continue;
            if (k.op == '(') ++depth;
            if (k.op == ')') {
                if (depth == 0) break;
                --depth;
            }
            if (k.op == ',' && depth == 0) break;
        }
        if (toks_[j].type != Tok::Op || toks_[j].op != ',') throw ParseError("int expects (body, variable)", pos);
        const Token& v = toks_[j + 1];
        if (v.type != Tok::Ident || !v.suffix.empty())
            throw ParseError("integration variable must be a plain identifier", v.pos);
        std::string dummy = v.text;
        idx_ = start;
        locals_.push_back(dummy);
        Expr body = expr();
        locals_.pop_back();
        expect(',');
        ++idx_;
        Rational lower = 0;
        Expr upper = var(dummy);
        if (is_op(',')) {
            ++idx_;
            std::size_t lp = peek().pos;
            Expr l = expr();
            if (!l.is(Kind::Const)) throw ParseError("lower limit must be a rational constant", lp);
            lower = l.value();
            if (is_op(',')) {
                ++idx_;
                upper = expr();
            }
        }
        expect(')');
        return s_.integral(body, dummy, lower, upper);
    }

    std::vector<Token> toks_;
    std::size_t idx_ = 0;
    const Context& ctx_;
    Simplifier s_;
    std::vector<std::string> locals_;
};

}  // namespace

void Context::declare_variable(const std::string& name) { variables_.insert(name); }

void Context::declare_function(const std::string& name, std::vector<std::string> params) {
    functions_[name] = std::move(params);
}

const std::vector<std::string>* Context::function(const std::string& name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
}

void Context::assume(const std::string& text) {
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string::npos) end = text.size();
        std::string item = text.substr(start, end - start);
        start = end + 1;
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        SignFact fact;
        std::size_t op;
        std::size_t len = 1;
        if ((op = item.find("!=")) != std::string::npos) {
            fact = SignFact::Nonzero;
            len = 2;
        } else if ((op = item.find('>')) != std::string::npos) {
            fact = SignFact::Positive;
        } else if ((op = item.find('<')) != std::string::npos) {
            fact = SignFact::Negative;
        } else {
            throw ParseError("assumption must have the form name>0, name<0 or name!=0", 0);
        }
        Expr rhs = parse(item.substr(op + len), *this);
        if (!rhs.is_zero()) throw ParseError("assumptions compare against 0", op + len);
        assumptions_.add(parse(item.substr(0, op), *this), fact);
    }
}

Context Context::elements() {
    Context c;
    for (const char* v : {"t", "x", "u", "eps"}) c.declare_variable(v);
    for (const char* f : {"F", "H1", "H0"}) c.declare_function(f, {"t", "x", "u"});
    for (const char* f : {"a", "b", "c", "f", "X", "U1", "U0", "V1", "V0"}) c.declare_function(f, {"t", "x"});
    for (const char* f : {"T", "X0", "f0", "f1", "f2"}) c.declare_function(f, {"t"});
    return c;
}

Context Context::pde() {
    Context c = elements();
    c.variables_.erase("u");
    c.declare_function("u", {"t", "x"});
    c.declare_function("v", {"t", "x"});
    return c;
}

Expr parse(const std::string& text, const Context& context) { return Parser(text, context).run(); }

Rational parse_rational(const std::string& text) {
    Expr e = parse(text, Context{});
    if (!e.is(Kind::Const)) throw ParseError("expected a rational constant", 0);
    return e.value();
}

}  // namespace gbe
