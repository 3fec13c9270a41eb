#include "sct/coalgebra.hpp"

#include <deque>

#include "sct/error.hpp"

namespace sct {

std::string_view to_string(Op op) {
    switch (op) {
    case Op::Com: return "com";
    case Op::Branch: return "branch";
    case Op::End: return "end";
    case Op::Bsc: return "bsc";
    case Op::Par: return "par";
    }
    return "?";
}

std::string_view to_string(Polarity p) { return p == Polarity::In ? "in" : "out"; }

namespace {
template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;
} // namespace

Op op_of(const StateLabel& l) {
    return std::visit(overloaded{
                          [](const label::Com&) { return Op::Com; },
                          [](const label::Branch&) { return Op::Branch; },
                          [](const label::End&) { return Op::End; },
                          [](const label::Bsc&) { return Op::Bsc; },
                          [](const label::Par&) { return Op::Par; },
                      },
                      l);
}

std::optional<Polarity> polarity_of(const StateLabel& l) {
    if (auto* c = std::get_if<label::Com>(&l))
        return c->pol;
    if (auto* b = std::get_if<label::Branch>(&l))
        return b->pol;
    return std::nullopt;
}

std::string to_string(const StateLabel& l) {
    return std::visit(overloaded{
                          [](const label::Com& c) { return std::string(c.pol == Polarity::In ? "?" : "!"); },
                          [](const label::Branch& b) {
                              std::string s = b.pol == Polarity::In ? "&{" : "+{";
                              bool first = true;
                              for (const auto& l : b.labels) {
                                  if (!first)
                                      s += ",";
                                  s += l;
                                  first = false;
                              }
                              return s + "}";
                          },
                          [](const label::End&) { return std::string("end"); },
                          [](const label::Bsc& b) { return b.type; },
                          [](const label::Par&) { return std::string("par"); },
                      },
                      l);
}

StateLabel label_dual(const StateLabel& l) {
    return std::visit(overloaded{
                          [](const label::Com& c) -> StateLabel { return label::Com{dual(c.pol)}; },
                          [](const label::Branch& b) -> StateLabel { return label::Branch{dual(b.pol), b.labels}; },
                          [](const label::End&) -> StateLabel { return label::End{}; },
                          [](const label::Bsc& b) -> StateLabel {
                              throw Error(ErrorKind::BscHasNoDual, "basic type '" + b.type + "' has no dual");
                          },
                          [](const label::Par&) -> StateLabel { return label::Par{}; },
                      },
                      l);
}

std::string to_string(const TransitionKey& k) {
    switch (k.kind) {
    case TransitionKey::Kind::Data: return "data";
    case TransitionKey::Kind::Star: return "*";
    case TransitionKey::Kind::Label: return k.label;
    }
    return "?";
}

std::set<TransitionKey> required_keys(const StateLabel& l) {
    switch (op_of(l)) {
    case Op::Com: return {TransitionKey::data(), TransitionKey::star()};
    case Op::Branch: {
        std::set<TransitionKey> keys;
        for (const auto& name : std::get<label::Branch>(l).labels)
            keys.insert(TransitionKey::arm(name));
        return keys;
    }
    case Op::Par: return {TransitionKey::star()};
    case Op::End:
    case Op::Bsc: return {};
    }
    return {};
}

bool is_identifier(std::string_view s) {
    if (s.empty())
        return false;
    auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); };
    auto digit = [](char c) { return c >= '0' && c <= '9'; };
    if (!alpha(s.front()))
        return false;
    for (char c : s)
        if (!alpha(c) && !digit(c) && c != '_')
            return false;
    return true;
}

// BasicTypePreorder ---------------------------------------------------------

BasicTypePreorder::BasicTypePreorder(std::set<std::string> universe, const std::vector<Pair>& pairs)
    : universe_(std::move(universe)) {
    for (const auto& [a, b] : pairs) {
        universe_.insert(a);
        universe_.insert(b);
        leq_.insert({a, b});
    }
    for (const auto& t : universe_)
        leq_.insert({t, t});
    // Warshall over the (small) universe.
    for (const auto& k : universe_)
        for (const auto& i : universe_)
            if (leq_.contains({i, k}))
                for (const auto& j : universe_)
                    if (leq_.contains({k, j}))
                        leq_.insert({i, j});
}

const BasicTypePreorder& BasicTypePreorder::defaults() {
    static const BasicTypePreorder d = from_pairs({{"int", "real"}});
    return d;
}

BasicTypePreorder BasicTypePreorder::from_pairs(const std::vector<Pair>& pairs) {
    return BasicTypePreorder({"int", "real", "bool"}, pairs);
}

bool BasicTypePreorder::leq(const std::string& lhs, const std::string& rhs) const { return leq_.contains({lhs, rhs}); }

std::vector<BasicTypePreorder::Pair> BasicTypePreorder::serializable_pairs() const {
    static const std::set<std::string> builtin{"int", "real", "bool"};
    std::vector<Pair> out;
    std::set<std::string> mentioned;
    for (const auto& [a, b] : leq_) {
        if (a == b)
            continue;
        out.emplace_back(a, b);
        mentioned.insert(a);
        mentioned.insert(b);
    }
    for (const auto& t : universe_)
        if (!builtin.contains(t) && !mentioned.contains(t))
            out.emplace_back(t, t);
    return out;
}

// SessionCoalgebra ----------------------------------------------------------

const State& SessionCoalgebra::state(const StateId& id) const {
    auto it = states_.find(id);
    if (it == states_.end())
        throw Error(ErrorKind::UnknownState, "no state named '" + id + "'");
    return it->second;
}

const StateId& SessionCoalgebra::target(const StateId& id, const TransitionKey& key) const {
    const auto& tr = transitions(id);
    auto it = tr.find(key);
    if (it == tr.end())
        throw Error(ErrorKind::ArityMismatch, "state '" + id + "' has no transition '" + to_string(key) + "'");
    return it->second;
}

std::optional<StateId> SessionCoalgebra::known_dual(const StateId& id) const {
    if (auto it = duals_.find(id); it != duals_.end())
        return it->second;
    return std::nullopt;
}

SessionCoalgebra SessionCoalgebra::merged(const SessionCoalgebra& other) const {
    if (!(order_ == other.order_))
        throw Error(ErrorKind::FormatError, "cannot merge coalgebras over different basic orders");
    SessionCoalgebra out = *this;
    for (const auto& [id, st] : other.states_) {
        auto [it, inserted] = out.states_.emplace(id, st);
        if (!inserted && !(it->second == st))
            throw Error(ErrorKind::DuplicateState, "state '" + id + "' defined twice with different content");
    }
    for (const auto& [a, b] : other.duals_) {
        auto [it, inserted] = out.duals_.emplace(a, b);
        if (!inserted && it->second != b)
            throw Error(ErrorKind::DuplicateState, "state '" + a + "' has two different recorded duals");
    }
    return out;
}

SessionCoalgebra validate_coalgebra(RawCoalgebra raw) {
    for (const auto& [id, st] : raw.states) {
        if (auto* b = std::get_if<label::Branch>(&st.label)) {
            if (b->labels.empty())
                throw Error(ErrorKind::EmptyBranch, "branch state '" + id + "' offers no labels");
            for (const auto& l : b->labels)
                if (!is_identifier(l))
                    throw Error(ErrorKind::FormatError, "branch label '" + l + "' of '" + id + "' is not an identifier");
        }
        if (auto* b = std::get_if<label::Bsc>(&st.label); b && !raw.basic_order.contains(b->type))
            throw Error(ErrorKind::UnknownBasicType, "state '" + id + "' uses unknown basic type '" + b->type + "'");

        auto want = required_keys(st.label);
        std::set<TransitionKey> have;
        for (const auto& [key, tgt] : st.transitions)
            have.insert(key);
        if (want != have)
            throw Error(ErrorKind::ArityMismatch,
                        "transitions of '" + id + "' do not match its label " + to_string(st.label));
        for (const auto& [key, tgt] : st.transitions)
            if (!raw.states.contains(tgt))
                throw Error(ErrorKind::DanglingTarget,
                            "transition '" + to_string(key) + "' of '" + id + "' targets unknown state '" + tgt + "'");
    }
    SessionCoalgebra c;
    c.states_ = std::move(raw.states);
    c.order_ = std::move(raw.basic_order);
    return c;
}

namespace {
std::set<StateId> closure(const SessionCoalgebra& c, const StateId& x, bool follow_data) {
    c.state(x);
    std::set<StateId> seen{x};
    std::deque<StateId> queue{x};
    while (!queue.empty()) {
        StateId u = std::move(queue.front());
        queue.pop_front();
        for (const auto& [key, tgt] : c.transitions(u)) {
            if (key.is_data() && !follow_data)
                continue;
            if (seen.insert(tgt).second)
                queue.push_back(tgt);
        }
    }
    return seen;
}
} // namespace

std::set<StateId> generated_subcoalgebra(const SessionCoalgebra& c, const StateId& x) { return closure(c, x, true); }

std::set<StateId> continuation_closure(const SessionCoalgebra& c, const StateId& x) { return closure(c, x, false); }

DualClosure dual_closure(const SessionCoalgebra& c, const StateId& x) {
    auto reach = continuation_closure(c, x);
    for (const auto& u : reach)
        if (c.op(u) == Op::Bsc)
            throw Error(ErrorKind::DualUndefined,
                        "state '" + u + "' is a basic type reachable by continuations from '" + x + "'");

    SessionCoalgebra out = c;
    auto fresh_name = [&](const StateId& u) {
        StateId name = "~" + u;
        while (out.states_.contains(name))
            name += "'";
        return name;
    };

    // Name every mirror first.
    std::map<StateId, StateId> mirror;
    for (const auto& u : reach) {
        if (auto d = out.known_dual(u))
            mirror[u] = *d;
        else if (c.op(u) == Op::End)
            mirror[u] = u;
        else {
            StateId name = fresh_name(u);
            out.states_.emplace(name, State{label::End{}, {}}); // placeholder, reserves the name
            mirror[u] = name;
        }
    }
    for (const auto& u : reach) {
        const StateId& d = mirror[u];
        if (d == u)
            out.duals_[u] = u;
        if (d == u || c.known_dual(u))
            continue;
        const State& src = c.state(u);
        State st{label_dual(src.label), {}};
        for (const auto& [key, tgt] : src.transitions)
            st.transitions.emplace(key, key.is_data() ? tgt : mirror.at(tgt));
        out.states_[d] = std::move(st);
        out.duals_[u] = d;
        out.duals_[d] = u;
    }
    return {std::move(out), mirror.at(x)};
}

} // namespace sct
