#include "sct/types.hpp"

#include <deque>
#include <set>
#include <vector>

#include "sct/error.hpp"
#include "type_parser.hpp"

namespace sct {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Type make(decltype(TypeNode::node) n) { return std::make_shared<const TypeNode>(TypeNode{std::move(n)}); }
} // namespace

namespace mk {
Type basic(std::string name) { return make(ty::Basic{std::move(name)}); }
Type end() {
    static const Type e = make(ty::End{});
    return e;
}
Type var(std::size_t index) { return make(ty::Var{index}); }
Type mu(std::string hint, Type body) { return make(ty::Mu{std::move(hint), std::move(body)}); }
Type com(Qualifier q, Polarity p, Type payload, Type cont) {
    return make(ty::Com{q, p, std::move(payload), std::move(cont)});
}
Type recv(Type payload, Type cont, Qualifier q) { return com(q, Polarity::In, std::move(payload), std::move(cont)); }
Type send(Type payload, Type cont, Qualifier q) { return com(q, Polarity::Out, std::move(payload), std::move(cont)); }
Type choice(Qualifier q, Polarity p, std::map<std::string, Type> arms) {
    return make(ty::Choice{q, p, std::move(arms)});
}
} // namespace mk

bool type_equal(const Type& a, const Type& b) {
    if (a == b)
        return true;
    if (a->node.index() != b->node.index())
        return false;
    return std::visit(overloaded{
                          [&](const ty::Basic& x) { return x.name == std::get<ty::Basic>(b->node).name; },
                          [&](const ty::End&) { return true; },
                          [&](const ty::Var& x) { return x.index == std::get<ty::Var>(b->node).index; },
                          [&](const ty::Mu& x) { return type_equal(x.body, std::get<ty::Mu>(b->node).body); },
                          [&](const ty::Com& x) {
                              const auto& y = std::get<ty::Com>(b->node);
                              return x.qual == y.qual && x.pol == y.pol && type_equal(x.payload, y.payload) &&
                                     type_equal(x.cont, y.cont);
                          },
                          [&](const ty::Choice& x) {
                              const auto& y = std::get<ty::Choice>(b->node);
                              if (x.qual != y.qual || x.pol != y.pol || x.arms.size() != y.arms.size())
                                  return false;
                              for (auto i = x.arms.begin(), j = y.arms.begin(); i != x.arms.end(); ++i, ++j)
                                  if (i->first != j->first || !type_equal(i->second, j->second))
                                      return false;
                              return true;
                          },
                      },
                      a->node);
}

// Parsing -------------------------------------------------------------------

namespace detail {

namespace {

class TypeParser {
public:
    TypeParser(TokenStream& ts, const BasicTypePreorder& order) : ts_(ts), order_(order) {}

    Type type() {
        if (ts_.accept("(")) {
            Type t = type();
            ts_.expect(")");
            return t;
        }
        const Token& tok = ts_.peek();
        if (tok.kind == Token::Kind::Ident) {
            if (tok.text == "end") {
                ts_.next();
                return mk::end();
            }
            if (tok.text == "rec") {
                ts_.next();
                std::string name = ts_.expect_ident("a type variable after 'rec'");
                ts_.expect(".");
                scope_.push_back(name);
                Type body = type();
                scope_.pop_back();
                return mk::mu(std::move(name), std::move(body));
            }
            if (tok.text == "un" || tok.text == "lin") {
                Qualifier q = tok.text == "un" ? Qualifier::Un : Qualifier::Lin;
                ts_.next();
                if (!(ts_.at_punct("?") || ts_.at_punct("!") || ts_.at_punct("&") || ts_.at_punct("+")))
                    ts_.fail("a qualifier must be followed by ?, !, & or +, found " + describe(ts_.peek()));
                return pretype(q);
            }
            ts_.next();
            for (std::size_t i = scope_.size(); i-- > 0;)
                if (scope_[i] == tok.text)
                    return mk::var(scope_.size() - 1 - i);
            if (order_.contains(tok.text))
                return mk::basic(tok.text);
            ts_.fail_at(tok, ErrorKind::UnknownBasicType, "unknown basic type or unbound variable '" + tok.text + "'");
        }
        if (ts_.at_punct("?") || ts_.at_punct("!") || ts_.at_punct("&") || ts_.at_punct("+"))
            return pretype(Qualifier::Lin);
        ts_.fail("expected a session type but found " + describe(tok));
    }

private:
    Type pretype(Qualifier q) {
        const Token& tok = ts_.next();
        if (tok.text == "?" || tok.text == "!") {
            Polarity p = tok.text == "?" ? Polarity::In : Polarity::Out;
            Type payload = type();
            Type cont = ts_.accept(".") ? type() : mk::end();
            return mk::com(q, p, std::move(payload), std::move(cont));
        }
        Polarity p = tok.text == "&" ? Polarity::In : Polarity::Out;
        ts_.expect("{");
        std::map<std::string, Type> arms;
        do {
            const Token& lt = ts_.peek();
            std::string l = ts_.expect_ident("a choice label");
            ts_.expect(":");
            Type arm = type();
            if (!arms.emplace(l, std::move(arm)).second)
                ts_.fail_at(lt, ErrorKind::DuplicateBranchLabel, "label '" + l + "' appears twice");
        } while (ts_.accept(","));
        ts_.expect("}");
        return mk::choice(q, p, std::move(arms));
    }

    TokenStream& ts_;
    const BasicTypePreorder& order_;
    std::vector<std::string> scope_;
};

} // namespace

Type parse_type_from(TokenStream& ts, const BasicTypePreorder& order) {
    TypeParser parser(ts, order);
    Type t = parser.type();
    return validate_type(t);
}

} // namespace detail

Type parse_type(std::string_view text, const BasicTypePreorder& order) {
    detail::TokenStream ts(detail::tokenize(text));
    Type t = detail::parse_type_from(ts, order);
    if (!ts.at_end())
        ts.fail("unexpected " + detail::describe(ts.peek()) + " after type");
    return t;
}

// Validation ----------------------------------------------------------------

namespace {

// `depth` counts enclosing binders; `chain` those in the current run of consecutive binders.
void check(const Type& t, std::size_t depth, std::size_t chain) {
    std::visit(overloaded{
                   [](const ty::Basic&) {},
                   [](const ty::End&) {},
                   [&](const ty::Var& v) {
                       if (v.index >= depth)
                           throw Error(ErrorKind::FreeVariable, "type variable #" + std::to_string(v.index) + " is unbound");
                       if (v.index < chain)
                           throw Error(ErrorKind::NotContractive, "recursive binder is its own body: " + pretty_print(t));
                   },
                   [&](const ty::Mu& m) { check(m.body, depth + 1, chain + 1); },
                   [&](const ty::Com& c) {
                       check(c.payload, depth, 0);
                       check(c.cont, depth, 0);
                   },
                   [&](const ty::Choice& c) {
                       for (const auto& [_, arm] : c.arms)
                           check(arm, depth, 0);
                   },
               },
               t->node);
}

} // namespace

const Type& validate_type(const Type& t) {
    check(t, 0, 0);
    return t;
}

// Unfolding -----------------------------------------------------------------

Type substitute(const Type& t, std::size_t index, const Type& v) {
    return std::visit(overloaded{
                          [&](const ty::Basic&) { return t; },
                          [&](const ty::End&) { return t; },
                          [&](const ty::Var& x) {
                              if (x.index == index)
                                  return v;
                              if (x.index > index)
                                  return mk::var(x.index - 1);
                              return t;
                          },
                          [&](const ty::Mu& m) { return mk::mu(m.hint, substitute(m.body, index + 1, v)); },
                          [&](const ty::Com& c) {
                              return mk::com(c.qual, c.pol, substitute(c.payload, index, v),
                                             substitute(c.cont, index, v));
                          },
                          [&](const ty::Choice& c) {
                              std::map<std::string, Type> arms;
                              for (const auto& [l, arm] : c.arms)
                                  arms.emplace(l, substitute(arm, index, v));
                              return mk::choice(c.qual, c.pol, std::move(arms));
                          },
                      },
                      t->node);
}

Type unfold(const Type& t) {
    Type cur = t;
    while (auto* m = std::get_if<ty::Mu>(&cur->node))
        cur = substitute(m->body, 0, cur);
    return cur;
}

bool is_unrestricted_type(const Type& t) {
    Type u = unfold(t);
    if (auto* c = std::get_if<ty::Com>(&u->node))
        return c->qual == Qualifier::Un;
    if (auto* c = std::get_if<ty::Choice>(&u->node))
        return c->qual == Qualifier::Un;
    return true;
}

// Printing ------------------------------------------------------------------

namespace {

void basic_names(const Type& t, std::set<std::string>& out) {
    std::visit(overloaded{
                   [&](const ty::Basic& b) { out.insert(b.name); },
                   [](const ty::End&) {},
                   [](const ty::Var&) {},
                   [&](const ty::Mu& m) { basic_names(m.body, out); },
                   [&](const ty::Com& c) {
                       basic_names(c.payload, out);
                       basic_names(c.cont, out);
                   },
                   [&](const ty::Choice& c) {
                       for (const auto& [_, arm] : c.arms)
                           basic_names(arm, out);
                   },
               },
               t->node);
}

class Printer {
public:
    Printer(bool canonical, std::set<std::string> reserved) : canonical_(canonical), reserved_(std::move(reserved)) {}

    void print(const Type& t, std::string& out) {
        std::visit(overloaded{
                       [&](const ty::Basic& b) { out += b.name; },
                       [&](const ty::End&) { out += "end"; },
                       [&](const ty::Var& v) {
                           if (v.index < names_.size())
                               out += names_[names_.size() - 1 - v.index];
                           else
                               out += "#" + std::to_string(v.index - names_.size());
                       },
                       [&](const ty::Mu& m) {
                           std::string name = binder_name(m.hint);
                           out += "rec " + name + ".";
                           names_.push_back(std::move(name));
                           print(m.body, out);
                           names_.pop_back();
                       },
                       [&](const ty::Com& c) {
                           if (c.qual == Qualifier::Un)
                               out += "un ";
                           out += c.pol == Polarity::In ? "?" : "!";
                           bool atomic = std::holds_alternative<ty::Basic>(c.payload->node) ||
                                         std::holds_alternative<ty::End>(c.payload->node) ||
                                         std::holds_alternative<ty::Var>(c.payload->node);
                           if (!atomic)
                               out += "(";
                           print(c.payload, out);
                           if (!atomic)
                               out += ")";
                           if (!std::holds_alternative<ty::End>(c.cont->node)) {
                               out += ".";
                               print(c.cont, out);
                           }
                       },
                       [&](const ty::Choice& c) {
                           if (c.qual == Qualifier::Un)
                               out += "un ";
                           out += c.pol == Polarity::In ? "&{" : "+{";
                           bool first = true;
                           for (const auto& [l, arm] : c.arms) {
                               if (!first)
                                   out += ", ";
                               first = false;
                               out += l + ": ";
                               print(arm, out);
                           }
                           out += "}";
                       },
                   },
                   t->node);
    }

private:
    std::string binder_name(const std::string& hint) {
        if (canonical_)
            return "X" + std::to_string(names_.size() + 1);
        std::string base = is_identifier(hint) ? hint : "X";
        auto taken = [&](const std::string& n) {
            if (detail::is_keyword(n) || n == "true" || n == "false" || reserved_.contains(n))
                return true;
            for (const auto& b : names_)
                if (b == n)
                    return true;
            return false;
        };
        if (!taken(base))
            return base;
        for (int k = 1;; ++k)
            if (!taken(base + std::to_string(k)))
                return base + std::to_string(k);
    }

    bool canonical_;
    std::set<std::string> reserved_;
    std::vector<std::string> names_;
};

} // namespace

std::string pretty_print(const Type& t) {
    std::set<std::string> reserved;
    basic_names(t, reserved);
    Printer p(false, std::move(reserved));
    std::string out;
    p.print(t, out);
    return out;
}

std::string canonical_text(const Type& t) {
    Printer p(true, {});
    std::string out;
    p.print(t, out);
    return out;
}

// Coalgebra of types --------------------------------------------------------

namespace {

Type as_lin(const Type& t) {
    if (auto* c = std::get_if<ty::Com>(&t->node))
        return mk::com(Qualifier::Lin, c->pol, c->payload, c->cont);
    const auto& ch = std::get<ty::Choice>(t->node);
    return mk::choice(Qualifier::Lin, ch.pol, ch.arms);
}

std::map<StateId, State> build_states(const Type& t, StateId& root) {
    std::map<StateId, State> states;
    std::set<StateId> seen;
    std::deque<std::pair<StateId, Type>> pending;
    auto id_of = [&](const Type& x) {
        Type u = unfold(x);
        StateId id = canonical_text(u);
        if (seen.insert(id).second)
            pending.emplace_back(id, std::move(u));
        return id;
    };
    root = id_of(t);
    while (!pending.empty()) {
        auto [id, u] = std::move(pending.front());
        pending.pop_front();
        State st;
        std::visit(overloaded{
                       [&](const ty::Basic& b) { st.label = label::Bsc{b.name}; },
                       [&](const ty::End&) { st.label = label::End{}; },
                       [&](const ty::Var&) {
                           throw Error(ErrorKind::FreeVariable, "cannot build states for an open type");
                       },
                       [&](const ty::Mu&) {},
                       [&](const ty::Com& c) {
                           if (c.qual == Qualifier::Un) {
                               st.label = label::Par{};
                               st.transitions.emplace(TransitionKey::star(), id_of(as_lin(u)));
                               return;
                           }
                           st.label = label::Com{c.pol};
                           st.transitions.emplace(TransitionKey::data(), id_of(c.payload));
                           st.transitions.emplace(TransitionKey::star(), id_of(c.cont));
                       },
                       [&](const ty::Choice& c) {
                           if (c.qual == Qualifier::Un) {
                               st.label = label::Par{};
                               st.transitions.emplace(TransitionKey::star(), id_of(as_lin(u)));
                               return;
                           }
                           label::Branch b{c.pol, {}};
                           for (const auto& [l, arm] : c.arms) {
                               b.labels.insert(l);
                               st.transitions.emplace(TransitionKey::arm(l), id_of(arm));
                           }
                           st.label = std::move(b);
                       },
                   },
                   u->node);
        states.emplace(std::move(id), std::move(st));
    }
    return states;
}

} // namespace

TypeCoalgebra type_to_coalgebra(const Type& t, const BasicTypePreorder& order) {
    StateId root;
    auto states = build_states(t, root);
    return {validate_coalgebra(RawCoalgebra{std::move(states), order}), root};
}

TypeCoalgebra type_to_coalgebra(const Type& t, const SessionCoalgebra& base) {
    StateId root;
    auto states = build_states(t, root);
    bool fresh = false;
    for (const auto& [id, st] : states) {
        if (!base.contains(id)) {
            fresh = true;
        } else if (!(base.state(id) == st)) {
            throw Error(ErrorKind::DuplicateState, "state '" + id + "' already exists with different content");
        }
    }
    if (!fresh)
        return {base, root};
    auto extra = validate_coalgebra(RawCoalgebra{std::move(states), base.basic_order()});
    return {base.merged(extra), root};
}

} // namespace sct
