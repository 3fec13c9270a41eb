#include "sct/typecheck.hpp"

namespace sct {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Op = TraceEntry::Op;

/// Output context, or nothing once a rule failed; the failure is in the report.
using Out = std::optional<TypingContext>;

class Checker {
public:
    Checker(TypeStore& store, CheckReport& report) : store_(store), report_(report) {}

    Out check(const TypingContext& g, const Process& p) {
        return std::visit(overloaded{
                              [&](const proc::Inact&) -> Out {
                                  mark("A-Inact");
                                  return g;
                              },
                              [&](const proc::Par& q) -> Out {
                                  mark("A-Par");
                                  Out mid = check(g, q.left);
                                  return mid ? check(*mid, q.right) : mid;
                              },
                              [&](const proc::Repl& r) -> Out {
                                  mark("A-Rep");
                                  Out out = check(g, r.body);
                                  if (out && *out != g)
                                      return fail(ErrorKind::LinearViolation, p,
                                                  "replicated process uses a linear channel: " + changed(g, *out));
                                  return out;
                              },
                              [&](const proc::Res& r) { return res(g, p, r); },
                              [&](const auto&) { return action(g, p, {}); },
                          },
                          p->node);
    }

private:
    const SessionCoalgebra& c() const { return store_.coalgebra(); }

    void mark(const std::string& rule, const std::string& subject = {}) {
        report_.trace.push_back({rule, subject, std::nullopt, std::nullopt, Op::Mark});
    }
    void log(const std::string& rule, Op op, const std::string& x, std::optional<StateId> before,
             std::optional<StateId> after) {
        report_.trace.push_back({rule, x, std::move(before), std::move(after), op});
    }

    Out fail(ErrorKind k, const Process& p, const std::string& msg) {
        report_.error = Error(k, msg, p->loc);
        return std::nullopt;
    }

    static std::string changed(const TypingContext& a, const TypingContext& b) {
        for (const auto& [x, t] : a) {
            auto it = b.find(x);
            if (it == b.end() || it->second != t)
                return "'" + x + "'";
        }
        for (const auto& [x, _] : b)
            if (!a.contains(x))
                return "'" + x + "'";
        return "?";
    }

    /// Context difference, logged.
    Out minus(const std::string& rule, const Out& g, const std::vector<std::string>& xs, const Process& p) {
        if (!g)
            return g;
        TypingContext out = *g;
        for (const auto& x : xs) {
            auto it = out.find(x);
            if (it == out.end())
                continue;
            if (!store_.unrestricted(it->second))
                return fail(ErrorKind::LinearViolation, p,
                            "session on '" + x + "' is incomplete, its type is still '" + it->second + "'");
            log(rule, Op::Remove, x, it->second, std::nullopt);
            out.erase(it);
        }
        return out;
    }

    const StateId* lookup(const TypingContext& g, const std::string& x, const Process& p) {
        auto it = g.find(x);
        if (it == g.end()) {
            fail(ErrorKind::UnknownVariable, p, "'" + x + "' is not in the context");
            return nullptr;
        }
        return &it->second;
    }

    Out res(const TypingContext& g, const Process& p, const proc::Res& r) {
        if (!r.annotation)
            return fail(ErrorKind::MissingAnnotation, p,
                        "restriction of '" + r.x + "', '" + r.y + "' needs a type");
        mark("A-Res");
        StateId t = store_.add(r.annotation);
        StateId d;
        try {
            d = store_.dual(t);
        } catch (const Error& e) {
            return fail(e.kind(), p, e.detail());
        }
        const std::string& xa = r.annotates_second ? r.y : r.x;
        const std::string& xd = r.annotates_second ? r.x : r.y;
        TypingContext inner = g;
        inner[xa] = t;
        inner[xd] = d;
        log("A-Res", Op::Bind, xa, std::nullopt, t);
        log("A-Res", Op::Bind, xd, std::nullopt, d);
        return minus("A-Res", check(inner, r.body), {r.x, r.y}, p);
    }

    /// Action prefixes, unpacking a par-typed subject first.
    Out action(const TypingContext& g, const Process& p, std::set<StateId> visited) {
        const std::string& x = subject(p);
        const StateId* found = lookup(g, x, p);
        if (!found)
            return std::nullopt;
        const StateId t = *found;
        if (c().op(t) != sct::Op::Par)
            return act(g, p, x, t);

        if (!visited.insert(t).second)
            return fail(ErrorKind::ParCycle, p,
                        "unpacking '" + x + "' cycles through par states without reaching an action");
        auto w = store_.parallelizable(t);
        if (!w.verdict)
            return fail(ErrorKind::NotParallelizable, p,
                        "type '" + t + "' of '" + x + "' is not parallelizable: " + w.reason);
        const StateId& inner_t = c().target(t, TransitionKey::star());
        TypingContext inner = g;
        inner[x] = inner_t;
        log("A-Unpack", Op::Rebind, x, t, inner_t);
        Out out = minus("A-Unpack", action(inner, p, std::move(visited)), {x}, p);
        if (!out)
            return out;
        (*out)[x] = t;
        log("A-Unpack", Op::Bind, x, std::nullopt, t);
        return out;
    }

    static const std::string& subject(const Process& p) {
        return std::visit(overloaded{
                              [](const proc::Output& o) -> const std::string& { return o.channel; },
                              [](const proc::Input& i) -> const std::string& { return i.channel; },
                              [](const proc::Branch& b) -> const std::string& { return b.channel; },
                              [](const proc::Select& s) -> const std::string& { return s.channel; },
                              [](const auto&) -> const std::string& { throw std::logic_error("not an action"); },
                          },
                          p->node);
    }

    bool expect_label(const Process& p, const std::string& x, const StateId& t, sct::Op op, Polarity pol,
                      const char* what) {
        const StateLabel& l = c().label(t);
        if (op_of(l) == op && polarity_of(l) == pol)
            return true;
        fail(ErrorKind::PolarityMismatch, p,
             "'" + x + "' has type '" + t + "' (" + to_string(l) + "), which does not allow " + what);
        return false;
    }

    Out act(const TypingContext& g, const Process& p, const std::string& x, const StateId& t) {
        return std::visit(
            overloaded{
                [&](const proc::Input& in) -> Out {
                    if (!expect_label(p, x, t, sct::Op::Com, Polarity::In, "input"))
                        return std::nullopt;
                    if (!in.annotation)
                        return fail(ErrorKind::MissingAnnotation, p,
                                    "input on '" + x + "' needs a type for '" + in.var + "'");
                    mark("A-In", x);
                    StateId u = store_.add(in.annotation);
                    const StateId& f1 = c().target(t, TransitionKey::data());
                    auto w = store_.similar(f1, u);
                    if (!w.verdict)
                        return fail(ErrorKind::SubtypeFailure, p, subtype_msg(f1, u, w));
                    const StateId& fs = c().target(t, TransitionKey::star());
                    TypingContext inner = g;
                    inner[x] = fs;
                    inner[in.var] = u;
                    log("A-In", Op::Rebind, x, t, fs);
                    log("A-In", Op::Bind, in.var, std::nullopt, u);
                    return minus("A-In", check(inner, in.cont), {x, in.var}, p);
                },
                [&](const proc::Output& o) -> Out {
                    if (!expect_label(p, x, t, sct::Op::Com, Polarity::Out, "output"))
                        return std::nullopt;
                    mark("A-Out", x);
                    const std::string& y = o.payload.name;
                    if (y == x)
                        return fail(ErrorKind::LinearViolation, p, "'" + x + "' cannot be sent over itself");
                    const StateId* found = lookup(g, y, p);
                    if (!found)
                        return std::nullopt;
                    StateId u = *found;
                    const StateId& f1 = c().target(t, TransitionKey::data());
                    auto w = store_.similar(u, f1);
                    if (!w.verdict)
                        return fail(ErrorKind::SubtypeFailure, p, subtype_msg(u, f1, w));
                    const StateId& fs = c().target(t, TransitionKey::star());
                    TypingContext inner = g;
                    inner.erase(y);
                    inner[x] = fs;
                    log("A-Out", Op::Remove, y, u, std::nullopt);
                    log("A-Out", Op::Rebind, x, t, fs);
                    Out out = minus("A-Out", check(inner, o.cont), {x}, p);
                    if (out && store_.unrestricted(u)) {
                        (*out)[y] = u;
                        log("A-Out", Op::Bind, y, std::nullopt, u);
                    }
                    return out;
                },
                [&](const proc::Select& s) -> Out {
                    if (!expect_label(p, x, t, sct::Op::Branch, Polarity::Out, "selection"))
                        return std::nullopt;
                    mark("A-Sel", x);
                    const auto& offered = std::get<label::Branch>(c().label(t)).labels;
                    if (!offered.contains(s.label))
                        return fail(ErrorKind::LabelNotOffered, p,
                                    "label '" + s.label + "' is not offered by '" + t + "'");
                    const StateId& fl = c().target(t, TransitionKey::arm(s.label));
                    TypingContext inner = g;
                    inner[x] = fl;
                    log("A-Sel", Op::Rebind, x, t, fl);
                    return minus("A-Sel", check(inner, s.cont), {x}, p);
                },
                [&](const proc::Branch& b) { return branch(g, p, x, t, b); },
                [&](const auto&) -> Out { throw std::logic_error("not an action"); },
            },
            p->node);
    }

    Out branch(const TypingContext& g, const Process& p, const std::string& x, const StateId& t,
               const proc::Branch& b) {
        if (!expect_label(p, x, t, sct::Op::Branch, Polarity::In, "branching"))
            return std::nullopt;
        mark("A-Branch", x);
        const std::set<std::string> wanted = std::get<label::Branch>(c().label(t)).labels;
        std::string missing;
        for (const auto& l : wanted)
            if (!b.arms.contains(l))
                missing += (missing.empty() ? "" : ", ") + l;
        if (!missing.empty())
            return fail(ErrorKind::MissingBranches, p, "branching on '" + x + "' lacks arms for: " + missing);
        for (const auto& [l, _] : b.arms)
            if (!wanted.contains(l))
                report_.warnings.push_back("arm '" + l + "' of the branching on '" + x +
                                           "' is never selected by type '" + t + "' and was not checked");

        log("A-Branch", Op::Save, x, std::nullopt, std::nullopt);
        std::optional<TypingContext> common;
        std::string first_label;
        Out last;
        for (const auto& l : wanted) {
            log("A-Branch", Op::Restore, x, std::nullopt, std::nullopt);
            const StateId& fl = c().target(t, TransitionKey::arm(l));
            TypingContext inner = g;
            inner[x] = fl;
            log("A-Branch", Op::Rebind, x, t, fl);
            Out out = check(inner, b.arms.at(l));
            if (!out)
                return out;
            TypingContext without = *out;
            without.erase(x);
            if (!common) {
                common = without;
                first_label = l;
            } else if (*common != without) {
                return fail(ErrorKind::BranchContextMismatch, b.arms.at(l),
                            "arms '" + first_label + "' and '" + l +
                                "' leave different contexts: " + changed(*common, without));
            }
            if (!minus("A-Branch", out, {x}, p))
                return std::nullopt;
            last = std::move(out);
        }
        if (!last)
            last = TypingContext{};
        Out result = minus("A-Branch", last, {x}, p);
        if (result)
            log("A-Branch", Op::Pop, x, std::nullopt, std::nullopt);
        return result;
    }

    std::string subtype_msg(const StateId& sub, const StateId& sup, const RelationWitness& w) const {
        std::string msg = "'" + sub + "' is not a subtype of '" + sup + "'";
        if (w.failure && (w.failure->first != sub || w.failure->second != sup))
            msg += " (fails at '" + w.failure->first + "' vs '" + w.failure->second + "': " + w.reason + ")";
        else if (!w.reason.empty())
            msg += ": " + w.reason;
        return msg;
    }

    TypeStore& store_;
    CheckReport& report_;
};

/// Keeps binders away from the context so rule premises never shadow a binding.
Process prepare(const TypingContext& g, const Process& p) {
    std::set<std::string> avoid;
    for (const auto& [x, _] : g)
        avoid.insert(x);
    return rename_apart(p, std::move(avoid));
}

} // namespace

CheckReport algo_judge(TypeStore& store, const TypingContext& g, const Process& p) {
    CheckReport report;
    report.input = g;
    Checker checker(store, report);
    try {
        report.output = checker.check(g, prepare(g, p));
    } catch (const Error& e) {
        report.error = e;
    }
    report.verdict = report.output.has_value();
    return report;
}

CheckReport algo_check(TypeStore& store, const TypingContext& g, const Process& p) {
    CheckReport report = algo_judge(store, g, p);
    if (report.verdict) {
        for (const auto& [x, t] : *report.output) {
            if (!store.unrestricted(t)) {
                report.verdict = false;
                report.error = Error(ErrorKind::ResidualLinear,
                                     "session on '" + x + "' is left incomplete at type '" + t + "'", p->loc);
                break;
            }
        }
    }
    return report;
}

CheckReport algo_check(const SessionCoalgebra& c, const TypingContext& g, const Process& p) {
    TypeStore store(c);
    return algo_check(store, g, p);
}

bool check_subsumption_admissible(TypeStore& store, const TypingContext& g, const std::string& x, const StateId& t,
                                  const StateId& u, const Process& p) {
    if (!store.similar(u, t).verdict)
        return false;
    TypingContext gt = g, gu = g;
    gt[x] = t;
    gu[x] = u;
    if (!algo_check(store, gt, p).verdict)
        return false;
    return algo_check(store, gu, p).verdict;
}

} // namespace sct
