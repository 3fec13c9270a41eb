#include "sct/process.hpp"

#include <algorithm>
#include <cctype>
#include <random>

#include "lexer.hpp"
#include "type_parser.hpp"

namespace sct {

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Process make(decltype(ProcNode::node) n, SourcePos loc) {
    return std::make_shared<const ProcNode>(ProcNode{std::move(n), loc});
}
} // namespace

namespace mkp {
Process inact(SourcePos loc) { return make(proc::Inact{}, loc); }
Process output(std::string ch, Value v, Process cont, SourcePos loc) {
    return make(proc::Output{std::move(ch), std::move(v), std::move(cont)}, loc);
}
Process input(std::string ch, std::string var, Type ann, Process cont, SourcePos loc) {
    return make(proc::Input{std::move(ch), std::move(var), std::move(ann), std::move(cont)}, loc);
}
Process branch(std::string ch, std::map<std::string, Process> arms, SourcePos loc) {
    return make(proc::Branch{std::move(ch), std::move(arms)}, loc);
}
Process select(std::string ch, std::string label, Process cont, SourcePos loc) {
    return make(proc::Select{std::move(ch), std::move(label), std::move(cont)}, loc);
}
Process par(Process l, Process r, SourcePos loc) { return make(proc::Par{std::move(l), std::move(r)}, loc); }
Process repl(Process body, SourcePos loc) { return make(proc::Repl{std::move(body)}, loc); }
Process res(std::string x, std::string y, Type ann, Process body, SourcePos loc, bool annotates_second) {
    return make(proc::Res{std::move(x), std::move(y), std::move(ann), annotates_second, std::move(body)}, loc);
}
} // namespace mkp

// Names ---------------------------------------------------------------------

namespace {

void collect_free(const Process& p, std::set<std::string>& bound, std::multiset<std::string>& scope,
                  std::set<std::string>& out) {
    auto use = [&](const std::string& n) {
        if (!scope.contains(n))
            out.insert(n);
    };
    auto under = [&](std::initializer_list<std::string> names, const Process& body) {
        for (const auto& n : names)
            scope.insert(n);
        collect_free(body, bound, scope, out);
        for (const auto& n : names)
            scope.erase(scope.find(n));
    };
    std::visit(overloaded{
                   [](const proc::Inact&) {},
                   [&](const proc::Output& o) {
                       use(o.channel);
                       if (!o.payload.literal)
                           use(o.payload.name);
                       collect_free(o.cont, bound, scope, out);
                   },
                   [&](const proc::Input& i) {
                       use(i.channel);
                       bound.insert(i.var);
                       under({i.var}, i.cont);
                   },
                   [&](const proc::Branch& b) {
                       use(b.channel);
                       for (const auto& [_, arm] : b.arms)
                           collect_free(arm, bound, scope, out);
                   },
                   [&](const proc::Select& s) {
                       use(s.channel);
                       collect_free(s.cont, bound, scope, out);
                   },
                   [&](const proc::Par& q) {
                       collect_free(q.left, bound, scope, out);
                       collect_free(q.right, bound, scope, out);
                   },
                   [&](const proc::Repl& r) { collect_free(r.body, bound, scope, out); },
                   [&](const proc::Res& r) {
                       bound.insert(r.x);
                       bound.insert(r.y);
                       under({r.x, r.y}, r.body);
                   },
               },
               p->node);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string stem = base;
    if (auto u = stem.rfind('_'); u != std::string::npos && u + 1 < stem.size() &&
                                  std::all_of(stem.begin() + u + 1, stem.end(), [](unsigned char c) { return std::isdigit(c); }))
        stem.erase(u);
    if (!avoid.contains(stem))
        return stem;
    for (int k = 1;; ++k) {
        std::string cand = stem + "_" + std::to_string(k);
        if (!avoid.contains(cand))
            return cand;
    }
}

using Renaming = std::map<std::string, std::string>;

std::string lookup(const Renaming& env, const std::string& n) {
    auto it = env.find(n);
    return it == env.end() ? n : it->second;
}

/// Renames binders that occur in `avoid` (or all of them if `all`), extending `avoid` with every binder kept.
Process rename_binders(const Process& p, const Renaming& env, std::set<std::string>& avoid, bool all) {
    auto bind = [&](const std::string& b, Renaming& inner) {
        std::string nb = (all || avoid.contains(b)) ? fresh_name(b, avoid) : b;
        avoid.insert(nb);
        inner[b] = nb;
        return nb;
    };
    const SourcePos loc = p->loc;
    // unchanged subterms are shared
    return std::visit(overloaded{
                          [&](const proc::Inact&) { return p; },
                          [&](const proc::Output& o) {
                              Value v = o.payload;
                              if (!v.literal)
                                  v.name = lookup(env, v.name);
                              std::string ch = lookup(env, o.channel);
                              Process k = rename_binders(o.cont, env, avoid, all);
                              if (k == o.cont && ch == o.channel && v.name == o.payload.name)
                                  return p;
                              return mkp::output(std::move(ch), std::move(v), std::move(k), loc);
                          },
                          [&](const proc::Input& i) {
                              Renaming inner = env;
                              std::string nv = bind(i.var, inner);
                              std::string ch = lookup(env, i.channel);
                              Process k = rename_binders(i.cont, inner, avoid, all);
                              if (k == i.cont && ch == i.channel && nv == i.var)
                                  return p;
                              return mkp::input(std::move(ch), std::move(nv), i.annotation, std::move(k), loc);
                          },
                          [&](const proc::Branch& b) {
                              std::map<std::string, Process> arms;
                              bool same = true;
                              for (const auto& [l, arm] : b.arms) {
                                  Process k = rename_binders(arm, env, avoid, all);
                                  same = same && k == arm;
                                  arms.emplace(l, std::move(k));
                              }
                              std::string ch = lookup(env, b.channel);
                              if (same && ch == b.channel)
                                  return p;
                              return mkp::branch(std::move(ch), std::move(arms), loc);
                          },
                          [&](const proc::Select& s) {
                              std::string ch = lookup(env, s.channel);
                              Process k = rename_binders(s.cont, env, avoid, all);
                              if (k == s.cont && ch == s.channel)
                                  return p;
                              return mkp::select(std::move(ch), s.label, std::move(k), loc);
                          },
                          [&](const proc::Par& q) {
                              Process l = rename_binders(q.left, env, avoid, all);
                              Process r = rename_binders(q.right, env, avoid, all);
                              if (l == q.left && r == q.right)
                                  return p;
                              return mkp::par(std::move(l), std::move(r), loc);
                          },
                          [&](const proc::Repl& r) {
                              Process b = rename_binders(r.body, env, avoid, all);
                              return b == r.body ? p : mkp::repl(std::move(b), loc);
                          },
                          [&](const proc::Res& r) {
                              Renaming inner = env;
                              std::string nx = bind(r.x, inner);
                              std::string ny = bind(r.y, inner);
                              Process b = rename_binders(r.body, inner, avoid, all);
                              if (b == r.body && nx == r.x && ny == r.y)
                                  return p;
                              return mkp::res(std::move(nx), std::move(ny), r.annotation, std::move(b), loc,
                                              r.annotates_second);
                          },
                      },
                      p->node);
}

} // namespace

std::set<std::string> free_names(const Process& p) {
    std::set<std::string> bound, out;
    std::multiset<std::string> scope;
    collect_free(p, bound, scope, out);
    return out;
}

std::set<std::string> bound_names(const Process& p) {
    std::set<std::string> bound, out;
    std::multiset<std::string> scope;
    collect_free(p, bound, scope, out);
    return bound;
}

Process rename_apart(const Process& p, std::set<std::string> avoid) {
    auto fn = free_names(p);
    avoid.insert(fn.begin(), fn.end());
    return rename_binders(p, {}, avoid, false);
}

Process freshen(const Process& p, std::set<std::string>& avoid) { return rename_binders(p, {}, avoid, true); }

Process substitute(const Process& p, const std::string& x, const Value& v) {
    const SourcePos loc = p->loc;
    auto name = [&](const std::string& n) { return n == x ? v.name : n; };
    // a binder equal to the substituted name is renamed first
    auto clear_binder = [&](const std::string& b, const Process& body, std::string& nb) {
        nb = b;
        if (v.literal || b != v.name)
            return body;
        std::set<std::string> avoid = free_names(body);
        avoid.insert(v.name);
        avoid.insert(x);
        auto more = bound_names(body);
        avoid.insert(more.begin(), more.end());
        nb = fresh_name(b, avoid);
        return substitute(body, b, Value::var(nb));
    };
    return std::visit(overloaded{
                          [&](const proc::Inact&) { return p; },
                          [&](const proc::Output& o) {
                              Value pv = (!o.payload.literal && o.payload.name == x) ? v : o.payload;
                              return mkp::output(name(o.channel), std::move(pv), substitute(o.cont, x, v), loc);
                          },
                          [&](const proc::Input& i) {
                              if (i.var == x)
                                  return mkp::input(name(i.channel), i.var, i.annotation, i.cont, loc);
                              std::string nv;
                              Process body = clear_binder(i.var, i.cont, nv);
                              return mkp::input(name(i.channel), nv, i.annotation, substitute(body, x, v), loc);
                          },
                          [&](const proc::Branch& b) {
                              std::map<std::string, Process> arms;
                              for (const auto& [l, arm] : b.arms)
                                  arms.emplace(l, substitute(arm, x, v));
                              return mkp::branch(name(b.channel), std::move(arms), loc);
                          },
                          [&](const proc::Select& s) {
                              return mkp::select(name(s.channel), s.label, substitute(s.cont, x, v), loc);
                          },
                          [&](const proc::Par& q) {
                              return mkp::par(substitute(q.left, x, v), substitute(q.right, x, v), loc);
                          },
                          [&](const proc::Repl& r) { return mkp::repl(substitute(r.body, x, v), loc); },
                          [&](const proc::Res& r) {
                              if (r.x == x || r.y == x)
                                  return p;
                              std::string nx, ny;
                              Process body = clear_binder(r.x, r.body, nx);
                              body = clear_binder(r.y, body, ny);
                              return mkp::res(nx, ny, r.annotation, substitute(body, x, v), loc, r.annotates_second);
                          },
                      },
                      p->node);
}

// Parsing -------------------------------------------------------------------

namespace {

using detail::Token;
using detail::TokenStream;

class ProcessParser {
public:
    ProcessParser(TokenStream& ts, const BasicTypePreorder& order) : ts_(ts), order_(order) {}

    Process parallel() {
        SourcePos loc = ts_.peek().pos;
        Process p = prefix();
        while (ts_.accept("|"))
            p = mkp::par(p, prefix(), loc);
        return p;
    }

private:
    std::string var(std::string_view what) {
        const Token& t = ts_.peek();
        std::string n = ts_.expect_ident(what);
        if (n == "true" || n == "false")
            ts_.fail_at(t, ErrorKind::SyntaxError, "'" + n + "' is a value, not a variable");
        return n;
    }

    Type annotation() {
        if (!ts_.accept(":"))
            return nullptr;
        return detail::parse_type_from(ts_, order_);
    }

    Process prefix() {
        const Token& tok = ts_.peek();
        SourcePos loc = tok.pos;
        if (tok.kind == Token::Kind::Zero) {
            ts_.next();
            return mkp::inact(loc);
        }
        if (ts_.accept("(")) {
            Process p = parallel();
            ts_.expect(")");
            return p;
        }
        if (ts_.accept("*"))
            return mkp::repl(prefix(), loc);
        if (ts_.at_ident("new")) {
            ts_.next();
            ts_.expect("(");
            std::string x = var("a channel name");
            ts_.expect(",");
            std::string y = var("a channel name");
            Type t = annotation();
            ts_.expect(")");
            return mkp::res(std::move(x), std::move(y), std::move(t), prefix(), loc);
        }
        if (tok.kind != Token::Kind::Ident)
            ts_.fail("expected a process but found " + detail::describe(tok));
        std::string ch = var("a channel name");
        if (ts_.accept("!")) {
            ts_.expect("(");
            const Token& vt = ts_.peek();
            Value v;
            if (vt.kind == Token::Kind::Ident && (vt.text == "true" || vt.text == "false")) {
                v = Value::boolean(vt.text == "true");
                ts_.next();
            } else {
                v = Value::var(var("a value"));
            }
            ts_.expect(")");
            ts_.expect(".");
            return mkp::output(std::move(ch), std::move(v), prefix(), loc);
        }
        if (ts_.accept("?")) {
            ts_.expect("(");
            std::string y = var("a variable");
            Type t = annotation();
            ts_.expect(")");
            ts_.expect(".");
            return mkp::input(std::move(ch), std::move(y), std::move(t), prefix(), loc);
        }
        if (ts_.accept(">>")) {
            ts_.expect("{");
            std::map<std::string, Process> arms;
            do {
                const Token& lt = ts_.peek();
                std::string l = ts_.expect_ident("a label");
                ts_.expect(":");
                Process arm = parallel();
                if (!arms.emplace(l, std::move(arm)).second)
                    ts_.fail_at(lt, ErrorKind::DuplicateBranchLabel, "label '" + l + "' appears twice");
            } while (ts_.accept(","));
            ts_.expect("}");
            return mkp::branch(std::move(ch), std::move(arms), loc);
        }
        if (ts_.accept("<<")) {
            std::string l = ts_.expect_ident("a label");
            ts_.expect(".");
            return mkp::select(std::move(ch), std::move(l), prefix(), loc);
        }
        ts_.fail("expected '!', '?', '>>' or '<<' after channel '" + ch + "'");
    }

    TokenStream& ts_;
    const BasicTypePreorder& order_;
};

} // namespace

Process parse_process(std::string_view text, const BasicTypePreorder& order) {
    TokenStream ts(detail::tokenize(text));
    ProcessParser parser(ts, order);
    Process p = parser.parallel();
    if (!ts.at_end())
        ts.fail("unexpected " + detail::describe(ts.peek()) + " after process");
    std::set<std::string> avoid = free_names(p);
    avoid.insert("true");
    avoid.insert("false");
    return rename_binders(p, {}, avoid, false);
}

// Printing and equality -----------------------------------------------------

namespace {

void print_to(const Process& p, std::string& out);

void print_prefix_cont(const Process& cont, std::string& out) {
    bool wrap = std::holds_alternative<proc::Par>(cont->node);
    if (wrap)
        out += "(";
    print_to(cont, out);
    if (wrap)
        out += ")";
}

void print_to(const Process& p, std::string& out) {
    std::visit(overloaded{
                   [&](const proc::Inact&) { out += "0"; },
                   [&](const proc::Output& o) {
                       out += o.channel + "!(" + o.payload.name + ").";
                       print_prefix_cont(o.cont, out);
                   },
                   [&](const proc::Input& i) {
                       out += i.channel + "?(" + i.var;
                       if (i.annotation)
                           out += ":" + pretty_print(i.annotation);
                       out += ").";
                       print_prefix_cont(i.cont, out);
                   },
                   [&](const proc::Branch& b) {
                       out += b.channel + ">>{";
                       bool first = true;
                       for (const auto& [l, arm] : b.arms) {
                           if (!first)
                               out += ", ";
                           first = false;
                           out += l + ": ";
                           print_to(arm, out);
                       }
                       out += "}";
                   },
                   [&](const proc::Select& s) {
                       out += s.channel + "<<" + s.label + ".";
                       print_prefix_cont(s.cont, out);
                   },
                   [&](const proc::Par& q) {
                       print_to(q.left, out);
                       out += " | ";
                       print_prefix_cont(q.right, out);
                   },
                   [&](const proc::Repl& r) {
                       out += "*";
                       print_prefix_cont(r.body, out);
                   },
                   [&](const proc::Res& r) {
                       if (r.annotation) {
                           const auto& first = r.annotates_second ? r.y : r.x;
                           const auto& second = r.annotates_second ? r.x : r.y;
                           out += "new(" + first + "," + second + ":" + pretty_print(r.annotation) + ") ";
                       } else {
                           out += "new(" + r.x + "," + r.y + ") ";
                       }
                       print_prefix_cont(r.body, out);
                   },
               },
               p->node);
}

bool ann_equal(const Type& a, const Type& b) {
    if (!a || !b)
        return !a && !b;
    return type_equal(a, b);
}

} // namespace

std::string print(const Process& p) {
    std::string out;
    print_to(p, out);
    return out;
}

bool process_equal(const Process& a, const Process& b) {
    if (a == b)
        return true;
    if (a->node.index() != b->node.index())
        return false;
    return std::visit(
        overloaded{
            [&](const proc::Inact&) { return true; },
            [&](const proc::Output& x) {
                const auto& y = std::get<proc::Output>(b->node);
                return x.channel == y.channel && x.payload == y.payload && process_equal(x.cont, y.cont);
            },
            [&](const proc::Input& x) {
                const auto& y = std::get<proc::Input>(b->node);
                return x.channel == y.channel && x.var == y.var && ann_equal(x.annotation, y.annotation) &&
                       process_equal(x.cont, y.cont);
            },
            [&](const proc::Branch& x) {
                const auto& y = std::get<proc::Branch>(b->node);
                if (x.channel != y.channel || x.arms.size() != y.arms.size())
                    return false;
                for (auto i = x.arms.begin(), j = y.arms.begin(); i != x.arms.end(); ++i, ++j)
                    if (i->first != j->first || !process_equal(i->second, j->second))
                        return false;
                return true;
            },
            [&](const proc::Select& x) {
                const auto& y = std::get<proc::Select>(b->node);
                return x.channel == y.channel && x.label == y.label && process_equal(x.cont, y.cont);
            },
            [&](const proc::Par& x) {
                const auto& y = std::get<proc::Par>(b->node);
                return process_equal(x.left, y.left) && process_equal(x.right, y.right);
            },
            [&](const proc::Repl& x) { return process_equal(x.body, std::get<proc::Repl>(b->node).body); },
            [&](const proc::Res& x) {
                const auto& y = std::get<proc::Res>(b->node);
                auto first = [](const proc::Res& r) { return r.annotation && r.annotates_second ? r.y : r.x; };
                auto second = [](const proc::Res& r) { return r.annotation && r.annotates_second ? r.x : r.y; };
                return first(x) == first(y) && second(x) == second(y) && ann_equal(x.annotation, y.annotation) &&
                       process_equal(x.body, y.body);
            },
        },
        a->node);
}

Process erase(const Process& p) {
    const SourcePos loc = p->loc;
    return std::visit(overloaded{
                          [&](const proc::Inact&) { return p; },
                          [&](const proc::Output& o) { return mkp::output(o.channel, o.payload, erase(o.cont), loc); },
                          [&](const proc::Input& i) { return mkp::input(i.channel, i.var, nullptr, erase(i.cont), loc); },
                          [&](const proc::Branch& b) {
                              std::map<std::string, Process> arms;
                              for (const auto& [l, arm] : b.arms)
                                  arms.emplace(l, erase(arm));
                              return mkp::branch(b.channel, std::move(arms), loc);
                          },
                          [&](const proc::Select& s) { return mkp::select(s.channel, s.label, erase(s.cont), loc); },
                          [&](const proc::Par& q) { return mkp::par(erase(q.left), erase(q.right), loc); },
                          [&](const proc::Repl& r) { return mkp::repl(erase(r.body), loc); },
                          [&](const proc::Res& r) {
                              // stored orientation is kept
                              return mkp::res(r.x, r.y, nullptr, erase(r.body), loc);
                          },
                      },
                      p->node);
}

// Structural congruence -----------------------------------------------------

namespace {

struct Restriction {
    std::string x;
    std::string y;
    Type annotation;
    bool annotates_second = false;
};

struct Component {
    Process proc;
    int copy = -1; // replication copy this component came from, if any
};

/// Restrictions hoisted to the top and the parallel components under them.
struct Flat {
    std::vector<Restriction> res;
    std::vector<Component> comps;
};

Process normalize_component(const Process& p);

void flatten(const Process& p, Flat& out, std::set<std::string>& avoid, const std::set<std::string>& names_of_whole,
             Renaming env, int copy) {
    std::visit(overloaded{
                   [](const proc::Inact&) {},
                   [&](const proc::Par& q) {
                       flatten(q.left, out, avoid, names_of_whole, env, copy);
                       flatten(q.right, out, avoid, names_of_whole, env, copy);
                   },
                   [&](const proc::Res& r) {
                       auto bind = [&](const std::string& b) {
                           std::string nb = b;
                           if (avoid.contains(b)) {
                               std::set<std::string> taken = names_of_whole;
                               taken.insert(avoid.begin(), avoid.end());
                               nb = fresh_name(b, taken);
                           }
                           avoid.insert(nb);
                           env[b] = nb;
                           return nb;
                       };
                       std::string nx = bind(r.x);
                       std::string ny = bind(r.y);
                       out.res.push_back({nx, ny, r.annotation, r.annotates_second});
                       flatten(r.body, out, avoid, names_of_whole, env, copy);
                   },
                   [&](const auto&) {
                       Process q = p;
                       if (!env.empty()) {
                           for (const auto& [from, to] : env)
                               if (from != to)
                                   q = substitute(q, from, Value::var(to));
                       }
                       out.comps.push_back({normalize_component(q), copy});
                   },
               },
               p->node);
}

std::set<std::string> all_names(const Process& p) {
    auto n = free_names(p);
    auto b = bound_names(p);
    n.insert(b.begin(), b.end());
    return n;
}

Flat canonical_flat(Flat f) {
    std::set<std::string> used;
    for (const auto& c : f.comps) {
        auto fn = free_names(c.proc);
        used.insert(fn.begin(), fn.end());
    }
    std::vector<Restriction> kept;
    for (auto& r : f.res) {
        if (!used.contains(r.x) && !used.contains(r.y))
            continue;
        if (r.y < r.x) {
            std::swap(r.x, r.y);
            r.annotates_second = !r.annotates_second;
        }
        if (!r.annotation)
            r.annotates_second = false;
        kept.push_back(std::move(r));
    }
    std::sort(kept.begin(), kept.end(),
              [](const Restriction& a, const Restriction& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });
    f.res = std::move(kept);
    std::vector<std::pair<std::string, Component>> keyed;
    for (auto& c : f.comps)
        keyed.emplace_back(print(c.proc), std::move(c));
    std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    f.comps.clear();
    for (auto& [_, c] : keyed)
        f.comps.push_back(std::move(c));
    return f;
}

Flat to_flat(const Process& p) {
    Flat f;
    auto names = all_names(p);
    std::set<std::string> avoid = free_names(p);
    flatten(p, f, avoid, names, {}, -1);
    return canonical_flat(std::move(f));
}

Process from_flat(const Flat& f) {
    Process body;
    for (const auto& c : f.comps)
        body = body ? mkp::par(body, c.proc) : c.proc;
    if (!body)
        body = mkp::inact();
    for (auto it = f.res.rbegin(); it != f.res.rend(); ++it)
        body = mkp::res(it->x, it->y, it->annotation, body, {}, it->annotates_second);
    return body;
}

Process normalize_component(const Process& p) {
    const SourcePos loc = p->loc;
    return std::visit(overloaded{
                          [&](const proc::Output& o) {
                              return mkp::output(o.channel, o.payload, normalize(o.cont), loc);
                          },
                          [&](const proc::Input& i) {
                              return mkp::input(i.channel, i.var, i.annotation, normalize(i.cont), loc);
                          },
                          [&](const proc::Branch& b) {
                              std::map<std::string, Process> arms;
                              for (const auto& [l, arm] : b.arms)
                                  arms.emplace(l, normalize(arm));
                              return mkp::branch(b.channel, std::move(arms), loc);
                          },
                          [&](const proc::Select& s) {
                              return mkp::select(s.channel, s.label, normalize(s.cont), loc);
                          },
                          [&](const proc::Repl& r) { return mkp::repl(normalize(r.body), loc); },
                          [&](const auto&) { return normalize(p); },
                      },
                      p->node);
}

} // namespace

Process normalize(const Process& p) { return from_flat(to_flat(p)); }

// Reduction -----------------------------------------------------------------

namespace {

const std::string* channel_of(const Process& p) {
    return std::visit(overloaded{
                          [](const proc::Output& o) -> const std::string* { return &o.channel; },
                          [](const proc::Input& i) -> const std::string* { return &i.channel; },
                          [](const proc::Branch& b) -> const std::string* { return &b.channel; },
                          [](const proc::Select& s) -> const std::string* { return &s.channel; },
                          [](const auto&) -> const std::string* { return nullptr; },
                      },
                      p->node);
}

bool covariables(const Flat& f, const std::string& a, const std::string& b) {
    for (const auto& r : f.res)
        if ((r.x == a && r.y == b) || (r.x == b && r.y == a))
            return true;
    return false;
}

/// Tries the redex with `i` acting as sender/selector and `j` as receiver/brancher.
std::optional<std::pair<std::string, std::vector<Process>>> fire(const Process& pi, const Process& pj) {
    if (auto* o = std::get_if<proc::Output>(&pi->node)) {
        if (auto* in = std::get_if<proc::Input>(&pj->node))
            return std::pair{std::string("r-com"), std::vector<Process>{o->cont, substitute(in->cont, in->var, o->payload)}};
        return std::nullopt;
    }
    if (auto* s = std::get_if<proc::Select>(&pi->node)) {
        if (auto* b = std::get_if<proc::Branch>(&pj->node)) {
            auto it = b->arms.find(s->label);
            if (it == b->arms.end())
                return std::nullopt;
            return std::pair{std::string("r-sync"), std::vector<Process>{s->cont, it->second}};
        }
    }
    return std::nullopt;
}

void redexes(const Flat& f, int copies, std::size_t unfolds, std::vector<Reduction>& out) {
    for (std::size_t i = 0; i < f.comps.size(); ++i) {
        const std::string* a = channel_of(f.comps[i].proc);
        if (!a)
            continue;
        for (std::size_t j = 0; j < f.comps.size(); ++j) {
            if (i == j)
                continue;
            const std::string* b = channel_of(f.comps[j].proc);
            if (!b || !covariables(f, *a, *b))
                continue;
            bool all_copies = true;
            for (int k = 0; k < copies; ++k)
                all_copies = all_copies && (f.comps[i].copy == k || f.comps[j].copy == k);
            if (!all_copies)
                continue;
            auto fired = fire(f.comps[i].proc, f.comps[j].proc);
            if (!fired)
                continue;
            Flat next{f.res, {}};
            for (std::size_t k = 0; k < f.comps.size(); ++k)
                if (k != i && k != j)
                    next.comps.push_back({f.comps[k].proc, -1});
            for (auto& q : fired->second)
                next.comps.push_back({q, -1});
            out.push_back({fired->first, normalize(from_flat(next)), unfolds});
        }
    }
}

/// Multisets of size `k` over `n` elements, as non-decreasing index vectors.
void multisets(std::size_t n, std::size_t k, std::size_t from, std::vector<std::size_t>& cur,
               std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = from; i < n; ++i) {
        cur.push_back(i);
        multisets(n, k, i, cur, out);
        cur.pop_back();
    }
}

} // namespace

std::vector<Reduction> reduce_step(const Process& p, std::size_t repl_budget) {
    Flat base = to_flat(p);
    std::vector<std::size_t> repls;
    for (std::size_t i = 0; i < base.comps.size(); ++i)
        if (std::holds_alternative<proc::Repl>(base.comps[i].proc->node))
            repls.push_back(i);

    std::vector<Reduction> found;
    const std::size_t budget = std::min<std::size_t>(repl_budget, 2);
    for (std::size_t k = 0; k <= budget && (k == 0 || !repls.empty()); ++k) {
        std::vector<std::vector<std::size_t>> choices;
        std::vector<std::size_t> cur;
        multisets(repls.size(), k, 0, cur, choices);
        for (const auto& choice : choices) {
            Flat f = base;
            std::set<std::string> avoid = all_names(from_flat(base));
            int copy = 0;
            for (std::size_t idx : choice) {
                const auto& body = std::get<proc::Repl>(base.comps[repls[idx]].proc->node).body;
                Process fresh = freshen(body, avoid);
                Flat part;
                std::set<std::string> part_avoid = free_names(fresh);
                flatten(fresh, part, part_avoid, all_names(fresh), {}, copy++);
                f.res.insert(f.res.end(), part.res.begin(), part.res.end());
                f.comps.insert(f.comps.end(), part.comps.begin(), part.comps.end());
            }
            redexes(f, copy, k, found);
        }
    }

    std::map<std::string, Reduction> unique;
    for (auto& r : found) {
        std::string key = print(r.result);
        auto it = unique.find(key);
        if (it == unique.end() || r.unfolds < it->second.unfolds)
            unique[key] = std::move(r);
    }
    std::vector<Reduction> out;
    for (auto& [_, r] : unique)
        out.push_back(std::move(r));
    return out;
}

RunTrace run(const Process& p, std::size_t max_steps, std::size_t repl_budget, std::optional<std::uint64_t> seed) {
    RunTrace trace;
    trace.initial = normalize(p);
    std::optional<std::mt19937_64> rng;
    if (seed)
        rng.emplace(*seed);
    Process cur = trace.initial;
    std::size_t remaining = repl_budget;
    while (true) {
        auto next = reduce_step(cur, remaining);
        if (next.empty()) {
            bool blocked = remaining < 2 && !reduce_step(cur, 2).empty();
            trace.stop = blocked ? RunTrace::Stop::ReplBudget : RunTrace::Stop::Quiescent;
            return trace;
        }
        if (trace.steps.size() >= max_steps) {
            trace.stop = RunTrace::Stop::MaxSteps;
            return trace;
        }
        std::size_t pick = 0;
        if (rng)
            pick = std::uniform_int_distribution<std::size_t>(0, next.size() - 1)(*rng);
        Reduction& r = next[pick];
        remaining -= std::min(remaining, r.unfolds);
        trace.steps.push_back({r.rule, r.result});
        cur = r.result;
    }
}

std::string_view to_string(RunTrace::Stop s) {
    switch (s) {
    case RunTrace::Stop::Quiescent: return "quiescent";
    case RunTrace::Stop::MaxSteps: return "max-steps";
    case RunTrace::Stop::ReplBudget: return "replication-budget";
    }
    return "?";
}

} // namespace sct
