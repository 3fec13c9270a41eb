#include <algorithm>

#include "lexer.hpp"
#include "sct/typecheck.hpp"
#include "type_parser.hpp"

namespace sct {

bool is_unrestricted(const SessionCoalgebra& c, const StateId& t) {
    Op op = c.op(t);
    return op == Op::Par || op == Op::End || op == Op::Bsc;
}

bool is_unrestricted(const SessionCoalgebra& c, const TypingContext& g) {
    return std::all_of(g.begin(), g.end(), [&](const auto& b) { return is_unrestricted(c, b.second); });
}

std::vector<std::pair<TypingContext, TypingContext>> split_contexts(const SessionCoalgebra& c,
                                                                    const TypingContext& g) {
    TypingContext shared;
    std::vector<std::pair<std::string, StateId>> lin;
    for (const auto& [x, t] : g) {
        if (is_unrestricted(c, t))
            shared.emplace(x, t);
        else
            lin.emplace_back(x, t);
    }
    std::vector<std::pair<TypingContext, TypingContext>> out;
    const std::size_t n = lin.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        TypingContext left = shared, right = shared;
        for (std::size_t i = 0; i < n; ++i)
            ((mask >> i) & 1 ? right : left).insert(lin[i]);
        out.emplace_back(std::move(left), std::move(right));
    }
    return out;
}

TypingContext context_difference(const SessionCoalgebra& c, const TypingContext& g, const std::set<std::string>& f) {
    TypingContext out = g;
    for (const auto& x : f) {
        auto it = out.find(x);
        if (it == out.end())
            continue;
        if (!is_unrestricted(c, it->second))
            throw Error(ErrorKind::LinearViolation, "'" + x + "' still has linear type '" + it->second + "'");
        out.erase(it);
    }
    return out;
}

// TypeStore -----------------------------------------------------------------

TypeStore::TypeStore() = default;

TypeStore::TypeStore(SessionCoalgebra base) : c_(std::move(base)) {}

StateId TypeStore::add(const Type& t) {
    std::string key = canonical_text(t);
    if (auto it = compiled_.find(key); it != compiled_.end())
        return it->second;
    auto tc = type_to_coalgebra(t, c_);
    c_ = std::move(tc.coalgebra);
    compiled_.emplace(std::move(key), tc.root);
    return tc.root;
}

StateId TypeStore::add(std::string_view type_text) {
    if (auto it = texts_.find(type_text); it != texts_.end())
        return it->second;
    StateId s = add(parse_type(type_text, c_.basic_order()));
    texts_.emplace(std::string(type_text), s);
    return s;
}

StateId TypeStore::dual(const StateId& x) {
    if (auto d = c_.known_dual(x))
        return *d;
    auto dc = dual_closure(c_, x);
    c_ = std::move(dc.coalgebra);
    return dc.dual;
}

RelationWitness TypeStore::similar(const StateId& x, const StateId& y) { return decide_similar(c_, x, y, &memo_); }

RelationWitness TypeStore::bisimilar(const StateId& x, const StateId& y) {
    return decide_bisimilar(c_, x, y, &memo_);
}

RelationWitness TypeStore::parallelizable(const StateId& x) { return decide_parallelizable(c_, x, &memo_); }

// Context text --------------------------------------------------------------

TypingContext parse_context(std::string_view text, TypeStore& store) {
    detail::TokenStream ts(detail::tokenize(text));
    TypingContext g;
    if (ts.at_end())
        return g;
    do {
        const detail::Token& vt = ts.peek();
        std::string x = ts.expect_ident("a variable");
        ts.expect(":");
        StateId t;
        if (ts.accept("@")) {
            const detail::Token st = ts.peek();
            // state ids are arbitrary table keys, keywords included
            if (st.kind != detail::Token::Kind::Ident)
                ts.fail("expected a state id but found " + detail::describe(st));
            t = ts.next().text;
            if (!store.coalgebra().contains(t))
                ts.fail_at(st, ErrorKind::UnknownState, "no state named '" + t + "'");
        } else {
            t = store.add(detail::parse_type_from(ts, store.basic_order()));
        }
        if (!g.emplace(x, t).second)
            ts.fail_at(vt, ErrorKind::SyntaxError, "'" + x + "' is bound twice");
    } while (ts.accept(","));
    if (!ts.at_end())
        ts.fail("unexpected " + detail::describe(ts.peek()) + " in context");
    return g;
}

std::string print_context(const TypingContext& g) {
    std::string out;
    for (const auto& [x, t] : g) {
        if (!out.empty())
            out += ", ";
        out += x + ": " + t;
    }
    return out;
}

TypingContext with_ambient_bools(const TypingContext& g, TypeStore& store) {
    TypingContext out = g;
    StateId b = store.add(mk::basic("bool"));
    out.emplace("true", b);
    out.emplace("false", b);
    return out;
}

// Traces --------------------------------------------------------------------

std::string_view to_string(TraceEntry::Op op) {
    switch (op) {
    case TraceEntry::Op::Bind: return "bind";
    case TraceEntry::Op::Rebind: return "rebind";
    case TraceEntry::Op::Remove: return "remove";
    case TraceEntry::Op::Mark: return "mark";
    case TraceEntry::Op::Save: return "save";
    case TraceEntry::Op::Restore: return "restore";
    case TraceEntry::Op::Pop: return "pop";
    }
    return "?";
}

TypingContext replay_trace(const TypingContext& input, const std::vector<TraceEntry>& trace) {
    TypingContext cur = input;
    std::vector<TypingContext> saved;
    for (const auto& e : trace) {
        switch (e.op) {
        case TraceEntry::Op::Bind:
        case TraceEntry::Op::Rebind: cur[e.subject] = *e.after; break;
        case TraceEntry::Op::Remove: cur.erase(e.subject); break;
        case TraceEntry::Op::Mark: break;
        case TraceEntry::Op::Save: saved.push_back(cur); break;
        case TraceEntry::Op::Restore: cur = saved.back(); break;
        case TraceEntry::Op::Pop: saved.pop_back(); break;
        }
    }
    return cur;
}

} // namespace sct
