#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "sct/types.hpp"

namespace sct::testing {

std::string data_path(const std::string& name) { return std::string(SCT_TEST_DATA_DIR) + "/" + name; }

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SessionCoalgebra load_coalgebra(const std::string& name) { return coalgebra_from_json(read_text(data_path(name))); }

SessionCoalgebra random_coalgebra(std::mt19937_64& rng, std::size_t n) {
    auto pick = [&](std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng); };
    auto id = [](std::size_t i) { return "s" + std::to_string(i); };
    static const std::vector<std::string> basics{"int", "real", "bool"};
    static const std::vector<std::string> labels{"a", "b", "c"};

    RawCoalgebra raw;
    for (std::size_t i = 0; i < n; ++i) {
        State s;
        switch (pick(5)) {
        case 0: {
            Polarity p = pick(2) ? Polarity::In : Polarity::Out;
            s.label = label::Com{p};
            s.transitions[TransitionKey::data()] = id(pick(n));
            s.transitions[TransitionKey::star()] = id(pick(n));
            break;
        }
        case 1: {
            Polarity p = pick(2) ? Polarity::In : Polarity::Out;
            std::set<std::string> ls;
            for (const auto& l : labels)
                if (pick(2))
                    ls.insert(l);
            if (ls.empty())
                ls.insert(labels[pick(labels.size())]);
            for (const auto& l : ls)
                s.transitions[TransitionKey::arm(l)] = id(pick(n));
            s.label = label::Branch{p, ls};
            break;
        }
        case 2: s.label = label::End{}; break;
        case 3: s.label = label::Bsc{basics[pick(basics.size())]}; break;
        default:
            s.label = label::Par{};
            s.transitions[TransitionKey::star()] = id(pick(n));
            break;
        }
        raw.states.emplace(id(i), std::move(s));
    }
    return validate_coalgebra(std::move(raw));
}

// Corpus ------------------------------------------------------------------------

const std::vector<std::string>& corpus_context_types() {
    static const std::vector<std::string> v{"end", "?int", "!int", "un?int", "bool"};
    return v;
}

const std::vector<std::string>& corpus_restriction_types() {
    static const std::vector<std::string> v{"end", "?int", "!int", "un?int"};
    return v;
}

namespace {

enum class Act { InInt, InBool, OutX, OutTrue, OutLast };

struct Action {
    std::string channel;
    Act act;
};

struct Thread {
    std::vector<Action> actions;
    bool replicated = false;
};

void extend_threads(const std::vector<std::string>& channels, std::size_t depth, Thread& cur, bool has_input,
                    std::vector<Thread>& out) {
    out.push_back(cur);
    if (cur.actions.size() == depth)
        return;
    for (const auto& ch : channels) {
        for (Act a : {Act::InInt, Act::InBool, Act::OutX, Act::OutTrue, Act::OutLast}) {
            if (a == Act::OutX && ch == "x")
                continue;
            if (a == Act::OutLast && !has_input)
                continue;
            cur.actions.push_back({ch, a});
            extend_threads(channels, depth, cur, has_input || a == Act::InInt || a == Act::InBool, out);
            cur.actions.pop_back();
        }
    }
}

Process build_thread(const Thread& t, std::size_t component) {
    Process p = mkp::inact();
    // built back to front; input variables are named by component and position
    std::vector<std::string> last(t.actions.size());
    std::string current;
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
        last[i] = current;
        if (t.actions[i].act == Act::InInt || t.actions[i].act == Act::InBool)
            current = "z" + std::to_string(component) + "_" + std::to_string(i);
    }
    for (std::size_t i = t.actions.size(); i-- > 0;) {
        const Action& a = t.actions[i];
        switch (a.act) {
        case Act::InInt:
        case Act::InBool:
            p = mkp::input(a.channel, "z" + std::to_string(component) + "_" + std::to_string(i),
                           mk::basic(a.act == Act::InInt ? "int" : "bool"), p);
            break;
        case Act::OutX: p = mkp::output(a.channel, Value::var("x"), p); break;
        case Act::OutTrue: p = mkp::output(a.channel, Value::boolean(true), p); break;
        case Act::OutLast: p = mkp::output(a.channel, Value::var(last[i]), p); break;
        }
    }
    return t.replicated ? mkp::repl(p) : p;
}

std::string signature(const Thread& t, const std::map<std::string, std::string>& rename = {}) {
    std::string s = t.replicated ? "*" : "";
    for (const auto& a : t.actions) {
        auto it = rename.find(a.channel);
        s += (it == rename.end() ? a.channel : it->second) + std::to_string(static_cast<int>(a.act)) + ";";
    }
    return s;
}

bool uses(const std::vector<const Thread*>& comps, const std::string& a, const std::string& b) {
    for (const Thread* t : comps)
        for (const auto& act : t->actions)
            if (act.channel == a || act.channel == b)
                return true;
    return false;
}

} // namespace

std::size_t enumerate_corpus(const CorpusBounds& bounds, const std::function<bool(const CorpusCase&)>& visit) {
    static const std::vector<std::pair<std::string, std::string>> pairs{{"a", "b"}, {"c", "d"}};
    std::size_t count = 0;
    for (std::size_t r = 0; r <= std::min(bounds.max_restrictions, pairs.size()); ++r) {
        std::vector<std::string> channels{"x"};
        for (std::size_t i = 0; i < r; ++i) {
            channels.push_back(pairs[i].first);
            channels.push_back(pairs[i].second);
        }
        std::vector<Thread> plain;
        Thread seed;
        extend_threads(channels, bounds.max_depth, seed, false, plain);
        std::vector<Thread> threads;
        for (const auto& t : plain) {
            if (t.actions.size() > bounds.max_prefixes)
                continue;
            threads.push_back(t);
            if (!t.actions.empty()) {
                threads.push_back(t);
                threads.back().replicated = true;
            }
        }

        std::stable_sort(threads.begin(), threads.end(),
                         [](const Thread& a, const Thread& b) { return a.actions.size() < b.actions.size(); });

        // multisets of threads, the empty thread only alone
        std::vector<std::vector<const Thread*>> combos;
        std::vector<const Thread*> cur;
        std::function<void(std::size_t, std::size_t)> grow = [&](std::size_t from, std::size_t used) {
            if (!cur.empty())
                combos.push_back(cur);
            if (cur.size() == bounds.max_components)
                return;
            for (std::size_t i = from; i < threads.size(); ++i) {
                const Thread& t = threads[i];
                if (t.actions.empty() && !cur.empty())
                    continue;
                if (used + t.actions.size() > bounds.max_prefixes)
                    break;
                if (!cur.empty() && cur.front()->actions.empty())
                    break;
                cur.push_back(&t);
                grow(i, used + t.actions.size());
                cur.pop_back();
            }
        };
        grow(0, 0);

        // swapping the two restricted pairs maps a term to an alpha-equivalent one up to
        // commuting components and restrictions; only the smaller of the two is visited
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < threads.size(); ++i)
            index.emplace(signature(threads[i]), i);
        const std::map<std::string, std::string> swap{{"a", "c"}, {"b", "d"}, {"c", "a"}, {"d", "b"}};
        auto key = [&](const std::vector<const Thread*>& combo, bool swapped) {
            std::vector<std::size_t> k;
            for (const Thread* t : combo)
                k.push_back(index.at(swapped ? signature(*t, swap) : signature(*t)));
            std::sort(k.begin(), k.end());
            return k;
        };

        // annotation tuples
        const auto& rtypes = corpus_restriction_types();
        std::map<std::string, Type> parsed;
        for (const auto& t : rtypes)
            parsed.emplace(t, parse_type(t));
        std::vector<std::vector<std::string>> annots{{}};
        for (std::size_t i = 0; i < r; ++i) {
            std::vector<std::vector<std::string>> next;
            for (const auto& a : annots)
                for (const auto& t : rtypes) {
                    next.push_back(a);
                    next.back().push_back(t);
                }
            annots = std::move(next);
        }

        for (const auto& combo : combos) {
            // restrictions that bind nothing in use are covered by smaller r
            bool all_used = true;
            for (std::size_t i = 0; i < r; ++i)
                all_used = all_used && uses(combo, pairs[i].first, pairs[i].second);
            if (!all_used)
                continue;
            Process body;
            for (std::size_t k = 0; k < combo.size(); ++k) {
                Process t = build_thread(*combo[k], k);
                body = body ? mkp::par(body, t) : t;
            }
            const bool symmetric = r == 2;
            std::vector<std::size_t> own, image;
            if (symmetric) {
                own = key(combo, false);
                image = key(combo, true);
            }
            for (const auto& annot : annots) {
                if (symmetric) {
                    std::vector<std::string> flipped{annot[1], annot[0]};
                    if (std::tie(image, flipped) < std::tie(own, annot))
                        continue;
                }
                Process p = body;
                for (std::size_t i = r; i-- > 0;)
                    p = mkp::res(pairs[i].first, pairs[i].second, parsed.at(annot[i]), p);
                for (const auto& ctx : corpus_context_types()) {
                    ++count;
                    if (!visit(CorpusCase{ctx, p}))
                        return count;
                }
            }
        }
    }
    return count;
}

TypingContext corpus_context(TypeStore& store, const CorpusCase& c) {
    TypingContext g{{"x", store.add(std::string_view(c.context_type))}};
    return with_ambient_bools(g, store);
}

// Generator -------------------------------------------------------------------------

const std::vector<std::string>& subtyping_pool() {
    static const std::vector<std::string> v{
        "end",
        "?int",
        "?real",
        "!int",
        "!real",
        "?bool",
        "?int.!int",
        "?real.!int",
        "?int.!real",
        "&{a: ?int, b: end}",
        "&{a: ?int}",
        "&{a: ?real, b: !int}",
        "&{a: ?int.!int, b: ?bool}",
        "&{a: ?int.!int, b: ?bool, c: end}",
        "+{a: !int, b: end}",
        "+{a: !int}",
        "+{a: !real}",
        "+{a: !int.?int, b: !bool}",
        "+{a: !real.?int}",
        "un?int",
        "un?real",
        "un!int",
        "un!real",
        "rec X.un?int.X",
        "rec X.un?real.X",
        "rec X.un!real.X",
        "rec X.un!int.X",
        "rec X.+{a: !int.X, b: end}",
        "rec X.+{a: !real.X, b: end}",
        "rec X.+{a: !int.X}",
        "?int.un?int",
    };
    return v;
}

TypingContext generator_context(TypeStore& store) {
    TypingContext g{{"vi", store.add(std::string_view("int"))},
                    {"vr", store.add(std::string_view("real"))},
                    {"vb", store.add(std::string_view("bool"))}};
    return g;
}

namespace {

struct Generator {
    TypeStore& store;
    std::mt19937_64& rng;
    std::size_t vars = 0;

    std::size_t pick(std::size_t k) { return std::uniform_int_distribution<std::size_t>(0, k - 1)(rng); }

    /// `data` holds the variables not yet sent along this thread.
    Process gen(StateId t, std::size_t fuel, const TypingContext& data) {
        const SessionCoalgebra& c = store.coalgebra();
        const StateLabel label = c.label(t);
        switch (op_of(label)) {
        case Op::End:
        case Op::Bsc: return mkp::inact();
        case Op::Par: {
            if (fuel == 0 || !store.parallelizable(t).verdict || pick(4) == 0)
                return mkp::inact();
            StateId inner = c.target(t, TransitionKey::star());
            if (store.coalgebra().op(inner) == Op::Par)
                return mkp::inact();
            Process p = gen(inner, fuel - 1, data);
            if (!p)
                return mkp::inact();
            if (pick(3) == 0) {
                Process q = gen(inner, fuel - 1, data);
                if (q)
                    return mkp::par(p, q);
            }
            return p;
        }
        case Op::Com: {
            if (fuel == 0)
                return nullptr;
            StateId data_state = c.target(t, TransitionKey::data());
            StateId next = c.target(t, TransitionKey::star());
            if (polarity_of(label) == Polarity::In) {
                if (c.op(data_state) != Op::Bsc)
                    return nullptr;
                std::vector<std::string> sup;
                for (const auto& d : c.basic_order().universe())
                    if (c.basic_order().leq(std::get<label::Bsc>(c.label(data_state)).type, d))
                        sup.push_back(d);
                std::string var = "y" + std::to_string(vars++);
                Type ann = mk::basic(sup[pick(sup.size())]);
                TypingContext more = data;
                more[var] = store.add(ann);
                Process k = gen(next, fuel - 1, more);
                return k ? mkp::input("x", var, ann, k) : nullptr;
            }
            std::vector<std::string> ok;
            for (const auto& [v, s] : data)
                if (store.similar(s, data_state).verdict)
                    ok.push_back(v);
            if (ok.empty())
                return nullptr;
            const std::string sent = ok[pick(ok.size())];
            TypingContext rest = data;
            rest.erase(sent);
            Process k = gen(next, fuel - 1, rest);
            return k ? mkp::output("x", Value::var(sent), k) : nullptr;
        }
        case Op::Branch: {
            if (fuel == 0)
                return nullptr;
            const auto labels = std::get<label::Branch>(label).labels;
            if (polarity_of(label) == Polarity::In) {
                std::map<std::string, Process> arms;
                for (const auto& l : labels) {
                    Process k = gen(c.target(t, TransitionKey::arm(l)), fuel - 1, data);
                    if (!k)
                        return nullptr;
                    arms.emplace(l, k);
                }
                return mkp::branch("x", std::move(arms));
            }
            std::vector<std::string> ls(labels.begin(), labels.end());
            // labels in random order
            std::shuffle(ls.begin(), ls.end(), rng);
            for (const auto& l : ls) {
                Process k = gen(store.coalgebra().target(t, TransitionKey::arm(l)), fuel - 1, data);
                if (k)
                    return mkp::select("x", l, k);
            }
            return nullptr;
        }
        }
        return nullptr;
    }
};

} // namespace

Process generate_user(TypeStore& store, const StateId& t, std::mt19937_64& rng, std::size_t fuel) {
    Generator g{store, rng};
    return g.gen(t, fuel, generator_context(store));
}

} // namespace sct::testing
