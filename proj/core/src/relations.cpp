#include "sct/relations.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <vector>

namespace sct {

std::string_view to_string(RelationKind k) {
    switch (k) {
    case RelationKind::Bisim: return "bisim";
    case RelationKind::Dual: return "dual";
    case RelationKind::Sim: return "sim";
    }
    return "?";
}

// RelationMemo --------------------------------------------------------------

RelationMemo::RelationMemo(const RelationMemo& other) {
    std::lock_guard lock(other.mu_);
    pairs_ = other.pairs_;
    par_ = other.par_;
}

RelationMemo& RelationMemo::operator=(const RelationMemo& other) {
    if (this != &other) {
        std::scoped_lock lock(mu_, other.mu_);
        pairs_ = other.pairs_;
        par_ = other.par_;
    }
    return *this;
}

std::optional<bool> RelationMemo::lookup(RelationKind k, const StateId& x, const StateId& y) const {
    std::lock_guard lock(mu_);
    if (auto it = pairs_.find({k, x, y}); it != pairs_.end())
        return it->second;
    return std::nullopt;
}

void RelationMemo::store(RelationKind k, const StateId& x, const StateId& y, bool v) {
    std::lock_guard lock(mu_);
    pairs_[{k, x, y}] = v;
}

std::optional<bool> RelationMemo::lookup_par(const StateId& x) const {
    std::lock_guard lock(mu_);
    if (auto it = par_.find(x); it != par_.end())
        return it->second;
    return std::nullopt;
}

void RelationMemo::store_par(const StateId& x, bool v) {
    std::lock_guard lock(mu_);
    par_[x] = v;
}

void RelationMemo::clear() {
    std::lock_guard lock(mu_);
    pairs_.clear();
    par_.clear();
}

std::size_t RelationMemo::size() const {
    std::lock_guard lock(mu_);
    return pairs_.size() + par_.size();
}

// One-step conditions -------------------------------------------------------

namespace {

using BisimOracle = std::function<bool(const StateId&, const StateId&)>;
using ParOracle = std::function<bool(const StateId&)>;

/// Outcome of unfolding the defining map once at a pair: either a reason the
/// pair can never be related, or the successor pairs that must be related.
struct Step {
    std::string failure;
    std::vector<StatePair> required;

    bool ok() const { return failure.empty(); }
};

Step fail(std::string why) { return {std::move(why), {}}; }

Step step_bisim(const SessionCoalgebra& c, const StateId& u, const StateId& w) {
    const State& a = c.state(u);
    const State& b = c.state(w);
    if (auto* da = std::get_if<label::Bsc>(&a.label)) {
        auto* db = std::get_if<label::Bsc>(&b.label);
        const auto& ord = c.basic_order();
        if (!db || !ord.leq(da->type, db->type) || !ord.leq(db->type, da->type))
            return fail("labels " + to_string(a.label) + " and " + to_string(b.label) + " differ");
        return {};
    }
    if (!(a.label == b.label))
        return fail("labels " + to_string(a.label) + " and " + to_string(b.label) + " differ");
    Step s;
    for (const auto& [key, tgt] : a.transitions)
        s.required.emplace_back(tgt, b.transitions.at(key));
    return s;
}

Step step_dual(const SessionCoalgebra& c, const StateId& u, const StateId& w, const BisimOracle& bisim) {
    const State& a = c.state(u);
    const State& b = c.state(w);
    if (op_of(a.label) == Op::Bsc || op_of(b.label) == Op::Bsc)
        return fail("basic types have no dual");
    if (!(label_dual(a.label) == b.label))
        return fail("label " + to_string(b.label) + " is not the dual of " + to_string(a.label));
    Step s;
    for (const auto& [key, tgt] : a.transitions) {
        const StateId& other = b.transitions.at(key);
        if (key.is_data()) {
            if (!bisim(tgt, other))
                return fail("payloads '" + tgt + "' and '" + other + "' are not bisimilar");
        } else {
            s.required.emplace_back(tgt, other);
        }
    }
    return s;
}

Step step_sim(const SessionCoalgebra& c, const StateId& u, const StateId& w, const ParOracle& par) {
    const State& a = c.state(u);
    const State& b = c.state(w);
    const Op op = op_of(a.label);
    if (op != op_of(b.label) || polarity_of(a.label) != polarity_of(b.label))
        return fail("labels " + to_string(a.label) + " and " + to_string(b.label) + " are incomparable");
    Step s;
    auto at = [](const State& st, const TransitionKey& k) -> const StateId& { return st.transitions.at(k); };
    switch (op) {
    case Op::Com: {
        const auto data = TransitionKey::data();
        s.required.emplace_back(at(a, TransitionKey::star()), at(b, TransitionKey::star()));
        if (*polarity_of(a.label) == Polarity::In)
            s.required.emplace_back(at(a, data), at(b, data));
        else
            s.required.emplace_back(at(b, data), at(a, data));
        return s;
    }
    case Op::Branch: {
        const auto& la = std::get<label::Branch>(a.label).labels;
        const auto& lb = std::get<label::Branch>(b.label).labels;
        const bool in = std::get<label::Branch>(a.label).pol == Polarity::In;
        const auto& small = in ? la : lb;
        const auto& large = in ? lb : la;
        if (!std::includes(large.begin(), large.end(), small.begin(), small.end()))
            return fail(std::string(in ? "external" : "internal") + " choice labels " + to_string(a.label) + " vs " +
                        to_string(b.label));
        for (const auto& l : small)
            s.required.emplace_back(at(a, TransitionKey::arm(l)), at(b, TransitionKey::arm(l)));
        return s;
    }
    case Op::Bsc: {
        const auto& da = std::get<label::Bsc>(a.label).type;
        const auto& db = std::get<label::Bsc>(b.label).type;
        if (!c.basic_order().leq(da, db))
            return fail(da + " is not a subtype of " + db);
        return s;
    }
    case Op::End: return s;
    case Op::Par: {
        const StateId& fa = at(a, TransitionKey::star());
        const StateId& fb = at(b, TransitionKey::star());
        if (par(fa) != par(fb))
            return fail("continuations '" + fa + "' and '" + fb + "' disagree on parallelizability");
        s.required.emplace_back(fa, fb);
        return s;
    }
    }
    return s;
}

Step step(RelationKind kind, const SessionCoalgebra& c, const StateId& u, const StateId& w, const BisimOracle& bisim,
          const ParOracle& par) {
    switch (kind) {
    case RelationKind::Bisim: return step_bisim(c, u, w);
    case RelationKind::Dual: return step_dual(c, u, w, bisim);
    case RelationKind::Sim: return step_sim(c, u, w, par);
    }
    return {};
}

/// Grows a relation from `seeds` until it is closed under the one-step condition.
RelationWitness explore(RelationKind kind, const SessionCoalgebra& c, const std::vector<StatePair>& seeds,
                        RelationMemo* memo) {
    BisimOracle bisim = [&](const StateId& a, const StateId& b) { return decide_bisimilar(c, a, b, memo).verdict; };
    ParOracle par = [&](const StateId& a) { return decide_parallelizable(c, a, memo).verdict; };

    RelationWitness w;
    std::deque<StatePair> queue;
    for (const auto& p : seeds)
        if (w.relation.insert(p).second)
            queue.push_back(p);
    while (!queue.empty()) {
        StatePair p = std::move(queue.front());
        queue.pop_front();
        Step s = step(kind, c, p.first, p.second, bisim, par);
        if (!s.ok())
            return {false, {}, std::move(p), std::move(s.failure)};
        for (auto& q : s.required)
            if (w.relation.insert(q).second)
                queue.push_back(std::move(q));
    }
    w.verdict = true;
    if (memo)
        for (const auto& [a, b] : w.relation)
            memo->store(kind, a, b, true);
    return w;
}

RelationWitness incremental(RelationKind kind, const SessionCoalgebra& c, const StateId& x, const StateId& y,
                            RelationMemo* memo) {
    c.state(x);
    c.state(y);
    if (memo) {
        if (auto v = memo->lookup(kind, x, y)) {
            if (*v)
                return {true, {{x, y}}, std::nullopt, {}};
            return {false, {}, StatePair{x, y}, "known unrelated"};
        }
    }
    RelationWitness w = explore(kind, c, {{x, y}}, memo);
    if (!w.verdict && memo)
        memo->store(kind, x, y, false);
    return w;
}

bool is_inert(Op op) { return op == Op::Par || op == Op::End; }

} // namespace

RelationWitness decide_bisimilar(const SessionCoalgebra& c, const StateId& x, const StateId& y, RelationMemo* memo) {
    return incremental(RelationKind::Bisim, c, x, y, memo);
}

RelationWitness decide_dual(const SessionCoalgebra& c, const StateId& x, const StateId& y, RelationMemo* memo) {
    return incremental(RelationKind::Dual, c, x, y, memo);
}

RelationWitness decide_similar(const SessionCoalgebra& c, const StateId& x, const StateId& y, RelationMemo* memo) {
    return incremental(RelationKind::Sim, c, x, y, memo);
}

RelationWitness decide(RelationKind k, const SessionCoalgebra& c, const StateId& x, const StateId& y,
                       RelationMemo* memo) {
    return incremental(k, c, x, y, memo);
}

RelationWitness decide_parallelizable(const SessionCoalgebra& c, const StateId& x, RelationMemo* memo) {
    if (memo) {
        if (auto v = memo->lookup_par(x)) {
            if (*v)
                return {true, {}, std::nullopt, {}};
            return {false, {}, StatePair{x, x}, "known unparallelizable"};
        }
    }
    auto closure = continuation_closure(c, x);
    std::vector<StateId> active;
    for (const auto& u : closure)
        if (!is_inert(c.op(u)))
            active.push_back(u);
    if (active.empty()) {
        if (memo)
            memo->store_par(x, true);
        return {true, {}, std::nullopt, {}};
    }

    std::vector<StatePair> seeds;
    for (const auto& v : active)
        seeds.emplace_back(active.front(), v);
    RelationWitness w = explore(RelationKind::Bisim, c, seeds, memo);
    if (memo)
        memo->store_par(x, w.verdict);
    if (!w.verdict)
        w.reason = "'" + w.failure->first + "' and '" + w.failure->second + "' are not bisimilar: " + w.reason;
    return w;
}

// Oracles -------------------------------------------------------------------

namespace {

Relation greatest_fixpoint(const SessionCoalgebra& c, RelationKind kind, const BisimOracle& bisim,
                           const ParOracle& par) {
    Relation r;
    for (const auto& [u, _] : c.states())
        for (const auto& [w, __] : c.states())
            r.insert({u, w});
    bool changed = true;
    while (changed) {
        changed = false;
        for (auto it = r.begin(); it != r.end();) {
            Step s = step(kind, c, it->first, it->second, bisim, par);
            bool keep = s.ok() && std::all_of(s.required.begin(), s.required.end(),
                                              [&](const StatePair& q) { return r.contains(q); });
            if (keep) {
                ++it;
            } else {
                it = r.erase(it);
                changed = true;
            }
        }
    }
    return r;
}

std::map<StateId, bool> par_from_bisim(const SessionCoalgebra& c, const Relation& bisim) {
    std::map<StateId, bool> out;
    for (const auto& [x, _] : c.states()) {
        bool ok = true;
        auto closure = continuation_closure(c, x);
        for (const auto& u : closure)
            for (const auto& v : closure)
                if (!is_inert(c.op(u)) && !is_inert(c.op(v)) && !bisim.contains({u, v}))
                    ok = false;
        out[x] = ok;
    }
    return out;
}

} // namespace

Relation brute_force_relation(const SessionCoalgebra& c, RelationKind kind) {
    BisimOracle no_bisim = [](const StateId&, const StateId&) { return false; };
    ParOracle no_par = [](const StateId&) { return false; };
    Relation bisim = greatest_fixpoint(c, RelationKind::Bisim, no_bisim, no_par);
    if (kind == RelationKind::Bisim)
        return bisim;
    auto par = par_from_bisim(c, bisim);
    return greatest_fixpoint(
        c, kind, [&](const StateId& a, const StateId& b) { return bisim.contains({a, b}); },
        [&](const StateId& a) { return par.at(a); });
}

std::map<StateId, bool> brute_force_parallelizable(const SessionCoalgebra& c) {
    BisimOracle no_bisim = [](const StateId&, const StateId&) { return false; };
    ParOracle no_par = [](const StateId&) { return false; };
    return par_from_bisim(c, greatest_fixpoint(c, RelationKind::Bisim, no_bisim, no_par));
}

bool is_post_fixpoint(const SessionCoalgebra& c, RelationKind kind, const Relation& r) {
    BisimOracle bisim = [&](const StateId& a, const StateId& b) { return decide_bisimilar(c, a, b).verdict; };
    ParOracle par = [&](const StateId& a) { return decide_parallelizable(c, a).verdict; };
    for (const auto& [u, w] : r) {
        Step s = step(kind, c, u, w, bisim, par);
        if (!s.ok())
            return false;
        for (const auto& q : s.required)
            if (!r.contains(q))
                return false;
    }
    return true;
}

} // namespace sct
