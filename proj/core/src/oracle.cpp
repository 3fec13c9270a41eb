#include <algorithm>
#include <unordered_map>

#include "sct/typecheck.hpp"

namespace sct {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t max_split_bindings = 12;

using Id = std::uint32_t;

/// Variable to state, sorted by variable.
using Ctx = std::vector<std::pair<Id, Id>>;

struct Key {
    Ctx ctx;
    const ProcNode* node;
    friend bool operator==(const Key&, const Key&) = default;
};

struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
        std::size_t h = std::hash<const void*>{}(k.node);
        for (const auto& [v, s] : k.ctx)
            h = (h ^ (std::size_t{v} << 32 | s)) * 0x9E3779B97F4A7C15ull;
        return h;
    }
};

class Interner {
public:
    Id id(const std::string& s) {
        auto [it, fresh] = ids_.try_emplace(s, static_cast<Id>(names_.size()));
        if (fresh)
            names_.push_back(s);
        return it->second;
    }
    const std::string& name(Id i) const { return names_[i]; }

private:
    std::unordered_map<std::string, Id> ids_;
    std::vector<std::string> names_;
};

/// What the rules need to know about a state.
struct Info {
    Op op = Op::End;
    std::optional<Polarity> pol;
    Id data = 0;
    Id star = 0;
    std::map<std::string, Id> arms;
    bool un = false;
    std::optional<bool> par;
};

class Oracle {
public:
    explicit Oracle(TypeStore& store) : store_(store) {}

    bool check(const TypingContext& g, const Process& p) {
        Ctx ctx;
        for (const auto& [x, t] : g)
            ctx.emplace_back(vars_.id(x), state(t));
        std::sort(ctx.begin(), ctx.end());
        return derivable(ctx, p);
    }

private:
    Id state(const StateId& s) { return states_.id(s); }

    Id compiled(const Type& t) {
        auto [it, fresh] = types_.try_emplace(t.get(), 0);
        if (fresh)
            it->second = state(store_.add(t));
        return it->second;
    }

    Info& info(Id s) {
        if (s < infos_.size() && infos_[s])
            return *infos_[s];
        const SessionCoalgebra& c = store_.coalgebra();
        const StateId name = states_.name(s);
        Info i;
        const StateLabel& l = c.label(name);
        i.op = op_of(l);
        i.pol = polarity_of(l);
        i.un = store_.unrestricted(name);
        for (const auto& [k, t] : c.transitions(name)) {
            if (k == TransitionKey::data())
                i.data = state(t);
            else if (k == TransitionKey::star())
                i.star = state(t);
            else
                i.arms.emplace(k.label, state(t));
        }
        if (s >= infos_.size())
            infos_.resize(s + 1);
        infos_[s] = std::move(i);
        return *infos_[s];
    }

    struct Facts {
        std::vector<Id> free;
        bool branches = false;
        bool names(Id v) const { return std::binary_search(free.begin(), free.end(), v); }
    };

    const Facts& facts(const Process& p) {
        auto [it, fresh] = facts_.try_emplace(p.get());
        if (fresh) {
            for (const auto& n : free_names(p))
                it->second.free.push_back(vars_.id(n));
            std::sort(it->second.free.begin(), it->second.free.end());
            it->second.branches = has_branch(p);
        }
        return it->second;
    }

    static bool has_branch(const Process& p) {
        return std::visit(overloaded{
                              [](const proc::Inact&) { return false; },
                              [](const proc::Branch&) { return true; },
                              [](const proc::Par& q) { return has_branch(q.left) || has_branch(q.right); },
                              [](const proc::Repl& r) { return has_branch(r.body); },
                              [](const proc::Res& r) { return has_branch(r.body); },
                              [](const auto& a) { return has_branch(a.cont); },
                          },
                          p->node);
    }

    bool parallelizable(Id s) {
        if (!info(s).par)
            info(s).par = store_.parallelizable(states_.name(s)).verdict;
        return *info(s).par;
    }

    bool similar(Id a, Id b) {
        std::uint64_t k = std::uint64_t{a} << 32 | b;
        if (auto it = sim_.find(k); it != sim_.end())
            return it->second;
        bool v = store_.similar(states_.name(a), states_.name(b)).verdict;
        sim_.emplace(k, v);
        return v;
    }

    static const std::pair<Id, Id>* find(const Ctx& g, Id v) {
        auto it = std::lower_bound(g.begin(), g.end(), std::pair<Id, Id>{v, 0});
        return it != g.end() && it->first == v ? &*it : nullptr;
    }
    static Ctx with(Ctx g, Id v, Id s) {
        auto it = std::lower_bound(g.begin(), g.end(), std::pair<Id, Id>{v, 0});
        if (it != g.end() && it->first == v)
            it->second = s;
        else
            g.insert(it, {v, s});
        return g;
    }
    static Ctx without(Ctx g, Id v) {
        auto it = std::lower_bound(g.begin(), g.end(), std::pair<Id, Id>{v, 0});
        if (it != g.end() && it->first == v)
            g.erase(it);
        return g;
    }

    bool un(const Ctx& g) {
        return std::all_of(g.begin(), g.end(), [&](const auto& b) { return info(b.second).un; });
    }

    bool derivable(const Ctx& g, const Process& p) {
        auto [it, fresh] = memo_.try_emplace(Key{g, p.get()}, Verdict::Open);
        Verdict& slot = it->second; // element references survive rehashing
        if (!fresh && slot != Verdict::Retry) {
            if (slot == Verdict::Open)
                cycle_ = true;
            return slot == Verdict::Yes;
        }
        slot = Verdict::Open;
        const bool outer = cycle_;
        cycle_ = false;
        bool v = direct(g, p) || unpack(g, p);
        slot = v ? Verdict::Yes : cycle_ ? Verdict::Retry : Verdict::No;
        cycle_ = outer || (cycle_ && !v);
        return v;
    }

    /// T-Unpack on any variable.
    bool unpack(const Ctx& g, const Process& p) {
        for (const auto& [x, t] : g) {
            if (info(t).op != Op::Par || !parallelizable(t))
                continue;
            if (derivable(with(g, x, info(t).star), p))
                return true;
        }
        return false;
    }

    /// The binding of `x` if its state has the given operation and polarity.
    std::optional<std::pair<Id, Id>> subject(const Ctx& g, const std::string& x, Op op, Polarity pol) {
        const auto* b = find(g, vars_.id(x));
        if (!b)
            return std::nullopt;
        const Info& i = info(b->second);
        if (i.op != op || i.pol != pol)
            return std::nullopt;
        return *b;
    }

    bool direct(const Ctx& g, const Process& p) {
        return std::visit(
            overloaded{
                [&](const proc::Inact&) { return un(g); },
                [&](const proc::Repl& r) { return un(g) && derivable(g, r.body); },
                [&](const proc::Par& q) {
                    // linear bindings only go to sides that name them or contain a branching
                    const Facts& fl = facts(q.left);
                    const Facts& fr = facts(q.right);
                    Ctx shared, left_only, right_only, free;
                    bool stranded = false;
                    for (const auto& b : g) {
                        if (info(b.second).un) {
                            shared.push_back(b);
                            continue;
                        }
                        bool l = fl.branches || fl.names(b.first), r = fr.branches || fr.names(b.first);
                        stranded = stranded || (!l && !r);
                        (l && r ? free : l ? left_only : right_only).push_back(b);
                    }
                    if (free.size() + left_only.size() + right_only.size() > max_split_bindings)
                        throw Error(ErrorKind::OracleTooLarge,
                                    "parallel composition with " +
                                        std::to_string(free.size() + left_only.size() + right_only.size()) +
                                        " linear bindings",
                                    p->loc);
                    if (stranded)
                        return false;
                    for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
                        Ctx left = shared, right = shared;
                        left.insert(left.end(), left_only.begin(), left_only.end());
                        right.insert(right.end(), right_only.begin(), right_only.end());
                        for (std::size_t i = 0; i < free.size(); ++i)
                            ((mask >> i) & 1 ? right : left).push_back(free[i]);
                        std::sort(left.begin(), left.end());
                        std::sort(right.begin(), right.end());
                        if (derivable(left, q.left) && derivable(right, q.right))
                            return true;
                    }
                    return false;
                },
                [&](const proc::Res& r) {
                    Id x = vars_.id(r.x), y = vars_.id(r.y);
                    if (!r.annotation || find(g, x) || find(g, y))
                        return false;
                    Id ta = compiled(r.annotation);
                    StateId d;
                    try {
                        d = store_.dual(states_.name(ta));
                    } catch (const Error&) {
                        return false;
                    }
                    Id td = state(d);
                    Ctx h = r.annotates_second ? with(with(g, y, ta), x, td) : with(with(g, x, ta), y, td);
                    return derivable(h, r.body);
                },
                [&](const proc::Input& in) {
                    if (!in.annotation)
                        return false;
                    auto b = subject(g, in.channel, Op::Com, Polarity::In);
                    if (!b)
                        return false;
                    const auto [x, t] = *b;
                    Id u = compiled(in.annotation);
                    if (!similar(info(t).data, u))
                        return false;
                    Id var = vars_.id(in.var);
                    Ctx h = without(g, x);
                    if (find(h, var))
                        return false;
                    return derivable(with(with(h, var, u), x, info(t).star), in.cont);
                },
                [&](const proc::Output& o) {
                    auto b = subject(g, o.channel, Op::Com, Polarity::Out);
                    if (!b || o.payload.name == o.channel)
                        return false;
                    const auto [x, t] = *b;
                    const auto* pb = find(g, vars_.id(o.payload.name));
                    if (!pb || !similar(pb->second, info(t).data))
                        return false;
                    return derivable(with(without(g, pb->first), x, info(t).star), o.cont);
                },
                [&](const proc::Select& s) {
                    auto b = subject(g, s.channel, Op::Branch, Polarity::Out);
                    if (!b)
                        return false;
                    const auto [x, t] = *b;
                    auto arm = info(t).arms.find(s.label);
                    if (arm == info(t).arms.end())
                        return false;
                    return derivable(with(g, x, arm->second), s.cont);
                },
                [&](const proc::Branch& br) {
                    auto b = subject(g, br.channel, Op::Branch, Polarity::In);
                    if (!b)
                        return false;
                    const auto [x, t] = *b;
                    const auto arms = info(t).arms;
                    for (const auto& [l, target] : arms) {
                        auto it = br.arms.find(l);
                        if (it == br.arms.end() || !derivable(with(g, x, target), it->second))
                            return false;
                    }
                    return true;
                },
            },
            p->node);
    }

    TypeStore& store_;
    Interner vars_;
    Interner states_;
    std::vector<std::optional<Info>> infos_;
    std::unordered_map<std::uint64_t, bool> sim_;
    std::unordered_map<const TypeNode*, Id> types_;
    std::unordered_map<const ProcNode*, Facts> facts_;
    /// Open while being derived; Retry when a refutation leaned on an open goal.
    enum class Verdict { Open, Yes, No, Retry };
    std::unordered_map<Key, Verdict, KeyHash> memo_;
    bool cycle_ = false;
};

} // namespace

bool declarative_check(TypeStore& store, const TypingContext& g, const Process& p) {
    std::set<std::string> avoid;
    for (const auto& [x, _] : g)
        avoid.insert(x);
    Process q = rename_apart(p, std::move(avoid));
    Oracle oracle(store);
    return oracle.check(g, q);
}

bool declarative_check(const SessionCoalgebra& c, const TypingContext& g, const Process& p) {
    TypeStore store(c);
    return declarative_check(store, g, p);
}

} // namespace sct
