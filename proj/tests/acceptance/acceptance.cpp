// Acceptance criteria 1-10. Prints one PASS/FAIL line per criterion.
//   acceptance            run all
//   acceptance --only N   run criterion N

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sct/coalgebra.hpp"
#include "sct/process.hpp"
#include "sct/relations.hpp"
#include "sct/typecheck.hpp"
#include "sct/types.hpp"
#include "support.hpp"

using namespace sct;
using namespace sct::testing;

namespace {

// Time limits in seconds.
constexpr double kQuick = 1.0;
constexpr double kOracleCorpus = 60.0;
constexpr double kRandomRelations = 120.0;
constexpr double kMetatheory = 120.0;

constexpr std::size_t kRandomCoalgebras = 1000;
constexpr std::size_t kMaxRandomStates = 8;
constexpr std::size_t kSubsumptionTriples = 200;
constexpr std::size_t kMaxReductionSteps = 8;

struct Outcome {
    bool pass = true;
    std::string detail;
    std::size_t checks = 0;

    void expect(bool ok, const std::string& what) {
        ++checks;
        if (!ok) {
            if (pass)
                detail = what;
            pass = false;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return cli::dispatch(args, out, err);
}

// 1 -------------------------------------------------------------------------

Outcome ac1() {
    Outcome o;
    const std::string t = "rec X.?X.X";
    const std::string u = "rec X.!(rec X.?X.X).X";
    const std::string naive = "rec X.!X.X";
    TypeStore store;
    StateId st = store.add(std::string_view(t)), su = store.add(std::string_view(u)),
            sn = store.add(std::string_view(naive));
    o.expect(decide_dual(store.coalgebra(), st, su).verdict, "T and U are not dual");
    o.expect(!decide_dual(store.coalgebra(), st, sn).verdict, "T and rec X.!X.X reported dual");
    o.expect(cli({"rel", "--kind", "dual", t, u}) == 0, "sct rel on T, U did not exit 0");
    o.expect(cli({"rel", "--kind", "dual", t, naive}) == 1, "sct rel on T, rec X.!X.X did not exit 1");
    return o;
}

// 2 -------------------------------------------------------------------------

Outcome ac2() {
    Outcome o;
    SessionCoalgebra c = load_coalgebra("math_protocol.json");
    o.expect(decide_dual(c, "q0", "s0").verdict, "q0 and s0 are not dual");
    DualClosure dc = dual_closure(c, "q0");
    o.expect(decide_bisimilar(dc.coalgebra, dc.dual, "s0").verdict, "dual_closure(q0) is not bisimilar to s0");
    o.expect(decide_dual(dc.coalgebra, "q0", dc.dual).verdict, "q0 is not dual to its closure state");

    // the client entered through the type syntax, against the JSON server
    SessionCoalgebra server = load_coalgebra("math_server.json");
    Type client = parse_type("rec X.+{mul: !int.!int.?int.X, neg: !bool.?bool.X, quit: end}");
    TypeCoalgebra tc = type_to_coalgebra(client, server);
    o.expect(decide_dual(tc.coalgebra, "q0", tc.root).verdict, "q0 is not dual to the syntactic client");
    DualClosure ds = dual_closure(tc.coalgebra, "q0");
    o.expect(decide_bisimilar(ds.coalgebra, ds.dual, tc.root).verdict,
             "dual_closure(q0) is not bisimilar to the syntactic client");
    o.expect(cli({"rel", "--kind", "dual", "--coalgebra", data_path("math_protocol.json"), "--state", "q0",
                  "--state2", "s0"}) == 0,
             "sct rel on q0, s0 did not exit 0");
    return o;
}

// 3 -------------------------------------------------------------------------

Outcome ac3() {
    Outcome o;
    struct Case {
        std::string sub, sup;
        bool expected;
    };
    const std::vector<Case> cases{
        {"?int", "?real", true},
        {"?real", "?int", false},
        {"!real", "!int", true},
        {"!int", "!real", false},
        {"+{a: !int, b: end}", "+{a: !int}", true},
        {"+{a: !int}", "+{a: !int, b: end}", false},
        {"&{a: ?int}", "&{a: ?int, b: end}", true},
        {"&{a: ?int, b: end}", "&{a: ?int}", false},
    };
    TypeStore store;
    std::vector<std::pair<StateId, StateId>> ids;
    for (const auto& c : cases)
        ids.emplace_back(store.add(std::string_view(c.sub)), store.add(std::string_view(c.sup)));
    Relation brute = brute_force_relation(store.coalgebra(), RelationKind::Sim);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& [x, y] = ids[i];
        bool v = decide_similar(store.coalgebra(), x, y).verdict;
        o.expect(v == cases[i].expected, cases[i].sub + " <= " + cases[i].sup + " decided " + (v ? "true" : "false"));
        o.expect(brute.contains({x, y}) == v, cases[i].sub + " <= " + cases[i].sup + " disagrees with brute force");
    }
    return o;
}

// 4 -------------------------------------------------------------------------

Outcome ac4() {
    Outcome o;
    struct Case {
        std::string context;
        std::string process;
        bool expected;
        const char* coalgebra;
    };
    const std::vector<Case> cases{
        {"x: ?int", "0", false, nullptr},
        {"x: ?int", "x?(z:int).0", true, nullptr},
        {"v: int", "new(x,y:?int) (x?(z:int).0 | y!(v).0)", true, nullptr},
        {"x: un?int", "x?(z1:int).0 | x?(z2:int).0", true, nullptr},
        {"x: ?int", "x?(z1:int).0 | x?(z2:int).0", false, nullptr},
        {"x: @T", "x?(y1:int).x?(y2:int).x?(y3:int).0", false, "alt_end.json"},
        {"x: @T", "x?(y1:int).0 | x?(y2:int).0 | x?(y3:int).0", true, "alt_end.json"},
        {"x: @T", "*x?(y:int).0", true, "alt_end.json"},
    };
    for (const auto& c : cases) {
        auto t0 = Clock::now();
        TypeStore store = c.coalgebra ? TypeStore(load_coalgebra(c.coalgebra)) : TypeStore();
        TypingContext g = with_ambient_bools(parse_context(c.context, store), store);
        Process p = parse_process(c.process);
        bool algo = algo_check(store, g, p).verdict;
        bool decl = declarative_check(store, g, p);
        double dt = seconds_since(t0);
        const std::string name = c.context + " |- " + c.process;
        o.expect(algo == c.expected, name + ": algorithm says " + (algo ? "accept" : "reject"));
        o.expect(decl == c.expected, name + ": declarative system says " + (decl ? "accept" : "reject"));
        o.expect(dt < kQuick, name + ": took " + std::to_string(dt) + " s");
    }
    return o;
}

// 5 -------------------------------------------------------------------------

Outcome ac5() {
    Outcome o;
    TypeStore store;
    std::size_t accepted = 0, mismatches = 0;
    std::string first;
    std::size_t n = enumerate_corpus({}, [&](const CorpusCase& c) {
        TypingContext g = corpus_context(store, c);
        bool algo = algo_check(store, g, c.process).verdict;
        bool decl = declarative_check(store, g, c.process);
        accepted += algo ? 1 : 0;
        if (algo != decl && mismatches++ == 0)
            first = "x: " + c.context_type + " |- " + print(c.process) + ": algorithm " + (algo ? "accepts" : "rejects");
        return true;
    });
    o.checks = n;
    o.pass = mismatches == 0;
    o.detail = std::to_string(n) + " terms, " + std::to_string(accepted) + " accepted, " +
               std::to_string(mismatches) + " disagreements" + (first.empty() ? "" : "; first: " + first);
    return o;
}

// 6 -------------------------------------------------------------------------

Outcome ac6() {
    Outcome o;
    std::mt19937_64 rng(20261015);
    const RelationKind kinds[] = {RelationKind::Bisim, RelationKind::Dual, RelationKind::Sim};
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < kRandomCoalgebras && o.pass; ++i) {
        std::size_t n = 1 + i % kMaxRandomStates;
        SessionCoalgebra c = random_coalgebra(rng, n);
        for (RelationKind k : kinds) {
            Relation brute = brute_force_relation(c, k);
            for (const auto& [x, _x] : c.states())
                for (const auto& [y, _y] : c.states()) {
                    ++pairs;
                    RelationWitness w = decide(k, c, x, y);
                    const std::string where = "coalgebra " + std::to_string(i) + ", " + std::string(to_string(k)) +
                                              " (" + x + ", " + y + ")";
                    o.expect(w.verdict == brute.contains({x, y}), where + ": disagrees with brute force");
                    if (w.verdict) {
                        o.expect(w.relation.contains({x, y}), where + ": witness lacks the queried pair");
                        o.expect(is_post_fixpoint(c, k, w.relation), where + ": witness is not a post-fixpoint");
                    } else {
                        o.expect(w.failure.has_value(), where + ": rejection without a failing pair");
                    }
                }
        }
    }
    if (o.pass)
        o.detail = std::to_string(kRandomCoalgebras) + " coalgebras, " + std::to_string(pairs) + " queries";
    return o;
}

// 7 -------------------------------------------------------------------------

bool contains_all(const TypingContext& big, const TypingContext& small) {
    for (const auto& [x, t] : small) {
        auto it = big.find(x);
        if (it == big.end() || it->second != t)
            return false;
    }
    return true;
}

Outcome ac7() {
    Outcome o;
    TypeStore store;
    const std::vector<std::string> weakening_types{"end", "?int", "un?int", "bool"};
    std::vector<StateId> weak;
    for (const auto& t : weakening_types)
        weak.push_back(store.add(std::string_view(t)));

    std::size_t runs = 0, strengthened = 0;
    enumerate_corpus({}, [&](const CorpusCase& c) {
        TypingContext g = corpus_context(store, c);
        CheckReport r = algo_judge(store, g, c.process);
        if (!r.verdict)
            return true;
        ++runs;
        const std::string name = "x: " + c.context_type + " |- " + print(c.process);
        const TypingContext& out = *r.output;

        // monotonicity: output bindings appear verbatim in the input, unrestricted inputs survive
        o.expect(contains_all(g, out), name + ": output not contained in input");
        for (const auto& [v, t] : g)
            if (store.unrestricted(t))
                o.expect(out.contains(v) && out.at(v) == t, name + ": unrestricted '" + v + "' lost");

        // weakening with a fresh variable
        for (const auto& t : weak) {
            TypingContext gw = g;
            gw["zfresh"] = t;
            CheckReport rw = algo_judge(store, gw, c.process);
            TypingContext expected = out;
            expected["zfresh"] = t;
            o.expect(rw.verdict && *rw.output == expected, name + ": weakening with zfresh: " + t + " fails");
        }

        // linear strengthening
        for (const auto& [v, t] : out) {
            if (store.unrestricted(t))
                continue;
            ++strengthened;
            TypingContext gs = g;
            gs.erase(v);
            CheckReport rs = algo_judge(store, gs, c.process);
            TypingContext expected = out;
            expected.erase(v);
            o.expect(rs.verdict && *rs.output == expected, name + ": strengthening without '" + v + "' fails");
        }
        return true;
    });

    // subsumption
    std::mt19937_64 rng(7);
    const auto& pool = subtyping_pool();
    std::vector<StateId> states;
    for (const auto& t : pool)
        states.push_back(store.add(std::string_view(t)));
    std::vector<std::pair<std::size_t, std::size_t>> related;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j)
            if (store.similar(states[j], states[i]).verdict)
                related.emplace_back(i, j); // U = j below T = i
    std::size_t triples = 0, attempts = 0, proper = 0;
    while (triples < kSubsumptionTriples && attempts < 100 * kSubsumptionTriples) {
        ++attempts;
        auto [i, j] = related[std::uniform_int_distribution<std::size_t>(0, related.size() - 1)(rng)];
        Process p = generate_user(store, states[i], rng);
        if (!p)
            continue;
        TypingContext g = with_ambient_bools(generator_context(store), store);
        TypingContext gt = g;
        gt["x"] = states[i];
        const std::string name = "T = " + pool[i] + ", U = " + pool[j] + ", P = " + print(p);
        o.expect(algo_check(store, gt, p).verdict, name + ": generated process rejected under T");
        o.expect(check_subsumption_admissible(store, g, "x", states[i], states[j], p),
                 name + ": rejected under U");
        ++triples;
        proper += i != j ? 1 : 0;
    }
    o.expect(triples == kSubsumptionTriples, "only " + std::to_string(triples) + " subsumption triples generated");
    if (o.pass)
        o.detail = std::to_string(runs) + " accepting runs, " + std::to_string(strengthened) +
                   " strengthenings, " + std::to_string(triples) + " subsumption triples (" + std::to_string(proper) +
                   " with U != T)";
    return o;
}

// 8 -------------------------------------------------------------------------

Outcome ac8() {
    Outcome o;
    const std::vector<std::string> touching{"x?(y:int).0", "x!(true).0", "x<<a.0", "x>>{a: 0}",
                                            "x?(y:int).0 | x?(w:int).0", "*x!(true).0"};
    const std::vector<std::string> untouched{"0", "*0", "new(a,b:?int) (a?(z:int).0 | b!(v).0)",
                                             "w?(z:int).0"};
    for (const char* state : {"Tend", "P1"}) {
        TypeStore store(load_coalgebra("par_cycle.json"));
        TypingContext g = with_ambient_bools(
            parse_context(std::string("x: @") + state + ", v: int, w: @lin", store), store);
        for (const auto& text : touching) {
            auto t0 = Clock::now();
            CheckReport r = algo_check(store, g, parse_process(text));
            double dt = seconds_since(t0);
            o.expect(!r.verdict && r.error && r.error->kind() == ErrorKind::ParCycle,
                     std::string(state) + ": " + text + " not rejected with ParCycle");
            o.expect(dt < kQuick, text + ": took " + std::to_string(dt) + " s");
        }
        for (const auto& text : untouched) {
            TypingContext gu = g;
            if (text != "w?(z:int).0")
                gu.erase("w");
            auto t0 = Clock::now();
            CheckReport r = algo_check(store, gu, parse_process(text));
            double dt = seconds_since(t0);
            o.expect(r.verdict, std::string(state) + ": " + text + " rejected");
            o.expect(dt < kQuick, text + ": took " + std::to_string(dt) + " s");
        }
    }
    return o;
}

// 9 -------------------------------------------------------------------------

Outcome ac9() {
    Outcome o;
    TypeStore store;
    StateId a = store.add(std::string_view("rec X.un!int.X"));
    StateId b = store.add(std::string_view("rec X.un?int.un?int.X"));
    o.expect(store.parallelizable(a).verdict, "rec X.un!int.X is not parallelizable");
    RelationWitness wb = store.parallelizable(b);
    o.expect(!wb.verdict, "rec X.un?int.un?int.X is parallelizable");
    SessionCoalgebra alt_end = load_coalgebra("alt_end.json");
    o.expect(decide_parallelizable(alt_end, "T").verdict, "T of the alternative-end coalgebra is not parallelizable");
    return o;
}

// 10 ------------------------------------------------------------------------

Outcome ac10() {
    Outcome o;
    Process p = parse_process(read_text(data_path("server.proc")));
    RunTrace t = run(p, kMaxReductionSteps, 0);
    std::vector<std::string> rules;
    for (const auto& s : t.steps)
        rules.push_back(s.rule);
    const std::vector<std::string> expected{"r-sync", "r-com", "r-com", "r-com"};
    std::string got;
    for (const auto& r : rules)
        got += (got.empty() ? "" : ", ") + r;
    o.expect(rules == expected, "rule sequence was [" + got + "]");
    o.expect(t.stop == RunTrace::Stop::Quiescent, "run stopped with " + std::string(to_string(t.stop)));
    o.expect(t.steps.size() <= kMaxReductionSteps, "more than 8 steps");
    o.expect(!t.steps.empty() && reduce_step(t.steps.back().result, 0).empty(), "final term still reduces");

    TypeStore store;
    TypingContext g = with_ambient_bools(parse_context("v1: int, v2: int", store), store);
    o.expect(algo_check(store, g, p).verdict, "the composed server and client does not typecheck");
    if (o.pass)
        o.detail = "[" + got + "] then " + std::string(to_string(t.stop));
    return o;
}

struct Criterion {
    int number;
    const char* name;
    double limit;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {1, "duality of recursive delegating types", kQuick, ac1},
        {2, "server/client duality and dual closure", kQuick, ac2},
        {3, "subtyping directions", kQuick, ac3},
        {4, "typing judgements of the examples", 8 * kQuick, ac4},
        {5, "algorithm agrees with the declarative system on the corpus", kOracleCorpus, ac5},
        {6, "relation deciders agree with brute force", kRandomRelations, ac6},
        {7, "metatheory properties", kMetatheory, ac7},
        {8, "par-cycle termination guard", kQuick, ac8},
        {9, "parallelizability verdicts", kQuick, ac9},
        {10, "reduction of server and client", kQuick, ac10},
    };
    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
            only = std::atoi(argv[++i]);

    int failures = 0;
    for (const auto& c : all) {
        if (only != 0 && c.number != only)
            continue;
        auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double dt = seconds_since(t0);
        if (dt >= c.limit) {
            if (o.pass)
                o.detail = "exceeded the time limit";
            o.pass = false;
        }
        failures += o.pass ? 0 : 1;
        std::printf("AC%-2d %s  %s (%.3f s, limit %.0f s)%s%s\n", c.number, o.pass ? "PASS" : "FAIL", c.name, dt,
                    c.limit, o.detail.empty() ? "" : ": ", o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
