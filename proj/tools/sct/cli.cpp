#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "sct/coalgebra.hpp"
#include "sct/process.hpp"
#include "sct/relations.hpp"
#include "sct/typecheck.hpp"
#include "sct/types.hpp"

namespace sct::cli {

namespace {

using nlohmann::json;

struct Config {
    std::string basic_order_path;
    bool ambient_bools = true;
    std::string format = "human";
    bool json() const { return format == "json"; }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::FormatError, "cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// A file's contents when `arg` names a regular file, otherwise `arg` itself.
std::string text_or_file(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec))
        return read_file(arg);
    return arg;
}

std::string read_source(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    return read_file(path);
}

/// Lines of the form `a <= b`; `#` starts a comment.
BasicTypePreorder read_basic_order(const std::string& path) {
    std::istringstream in(read_file(path));
    std::vector<BasicTypePreorder::Pair> pairs;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        std::istringstream ls(line);
        std::string a, op, b, extra;
        if (!(ls >> a))
            continue;
        if (!(ls >> op >> b) || op != "<=" || (ls >> extra) || !is_identifier(a) || !is_identifier(b))
            throw Error(ErrorKind::FormatError, path + ":" + std::to_string(n) + ": expected 'a <= b'",
                        SourcePos{0, n, 1});
        pairs.emplace_back(a, b);
    }
    return BasicTypePreorder::from_pairs(pairs);
}

TypeStore make_store(const Config& cfg, const std::string& coalgebra_path) {
    RawCoalgebra raw;
    if (!coalgebra_path.empty())
        raw = raw_coalgebra_from_json(read_file(coalgebra_path));
    if (!cfg.basic_order_path.empty())
        raw.basic_order = read_basic_order(cfg.basic_order_path);
    return TypeStore(validate_coalgebra(std::move(raw)));
}

json pos_json(const std::optional<SourcePos>& p) {
    if (!p)
        return nullptr;
    return {{"line", p->line}, {"column", p->column}, {"offset", p->offset}};
}

json error_json(const Error& e) {
    return {{"kind", std::string(to_string(e.kind()))}, {"message", e.detail()}, {"position", pos_json(e.position())}};
}

std::string error_text(const Error& e) {
    std::string s(to_string(e.kind()));
    if (e.position())
        s += " at " + std::to_string(e.position()->line) + ":" + std::to_string(e.position()->column);
    return s + ": " + e.detail();
}

json context_json(const TypingContext& g) {
    json j = json::object();
    for (const auto& [x, t] : g)
        j[x] = t;
    return j;
}

json pairs_json(const Relation& r) {
    json j = json::array();
    for (const auto& [a, b] : r)
        j.push_back({a, b});
    return j;
}

// type ----------------------------------------------------------------------

int cmd_type(const Config& cfg, const std::string& action, const std::string& arg, std::ostream& out) {
    TypeStore store = make_store(cfg, "");
    Type t = parse_type(text_or_file(arg), store.basic_order());
    if (action == "parse") {
        if (cfg.json())
            out << json{{"type", pretty_print(t)}, {"canonical", canonical_text(t)}}.dump(2) << "\n";
        else
            out << pretty_print(t) << "\n";
    } else if (action == "unfold") {
        Type u = unfold(t);
        if (cfg.json())
            out << json{{"type", pretty_print(u)}, {"canonical", canonical_text(u)}}.dump(2) << "\n";
        else
            out << pretty_print(u) << "\n";
    } else {
        StateId root = store.add(t);
        const SessionCoalgebra& c = store.coalgebra();
        if (cfg.json())
            out << json{{"root", root}, {"coalgebra", json::parse(coalgebra_to_json(c))}}.dump(2) << "\n";
        else
            out << to_dot(c, std::set<StateId>{root});
    }
    return Accept;
}

// rel -----------------------------------------------------------------------

struct RelArgs {
    std::string kind;
    std::vector<std::string> types;
    std::string coalgebra;
    std::string state, state2;
};

int cmd_rel(const Config& cfg, const RelArgs& a, std::ostream& out) {
    TypeStore store = make_store(cfg, a.coalgebra);
    std::vector<std::string> types = a.types;
    std::reverse(types.begin(), types.end());
    auto operand = [&](const std::string& state, const char* what) -> StateId {
        if (!state.empty()) {
            if (!store.coalgebra().contains(state))
                throw Error(ErrorKind::UnknownState, "no state named '" + state + "'");
            return state;
        }
        if (types.empty())
            throw CLI::ValidationError(std::string("missing ") + what);
        std::string text = text_or_file(types.back());
        types.pop_back();
        return store.add(std::string_view(text));
    };

    const bool unary = a.kind == "par";
    StateId x = operand(a.state, "first operand (type or --state)");
    StateId y;
    if (!unary)
        y = operand(a.state2, "second operand (type or --state2)");
    if (!types.empty())
        throw CLI::ValidationError("too many operands for --kind " + a.kind);

    RelationWitness w;
    if (a.kind == "bisim")
        w = store.bisimilar(x, y);
    else if (a.kind == "dual")
        w = decide_dual(store.coalgebra(), x, y, &store.memo());
    else if (a.kind == "sub")
        w = store.similar(x, y);
    else
        w = store.parallelizable(x);

    if (cfg.json()) {
        json j{{"kind", a.kind}, {"verdict", w.verdict}, {"left", x}};
        if (!unary)
            j["right"] = y;
        if (w.verdict) {
            j["relation"] = pairs_json(w.relation);
        } else {
            j["failure"] = w.failure ? json{w.failure->first, w.failure->second} : json(nullptr);
            j["reason"] = w.reason;
        }
        out << j.dump(2) << "\n";
    } else {
        out << (w.verdict ? "true" : "false") << "\n";
        if (!w.verdict && w.failure)
            out << "  fails at (" << w.failure->first << ", " << w.failure->second << "): " << w.reason << "\n";
        else if (!w.verdict && !w.reason.empty())
            out << "  " << w.reason << "\n";
    }
    return w.verdict ? Accept : Reject;
}

// check / oracle ------------------------------------------------------------

struct CheckArgs {
    std::string context;
    std::string coalgebra;
    std::string file;
    bool trace = false;
};

struct Prepared {
    TypeStore store;
    TypingContext context;
    Process process;
};

Prepared prepare(const Config& cfg, const CheckArgs& a) {
    Prepared p{make_store(cfg, a.coalgebra), {}, nullptr};
    p.context = parse_context(a.context, p.store);
    if (cfg.ambient_bools)
        p.context = with_ambient_bools(p.context, p.store);
    p.process = parse_process(read_source(a.file), p.store.basic_order());
    return p;
}

json trace_json(const std::vector<TraceEntry>& trace) {
    json j = json::array();
    for (const auto& e : trace) {
        json item{{"rule", e.rule}, {"op", std::string(to_string(e.op))}};
        if (!e.subject.empty())
            item["subject"] = e.subject;
        if (e.before)
            item["before"] = *e.before;
        if (e.after)
            item["after"] = *e.after;
        j.push_back(std::move(item));
    }
    return j;
}

void print_trace(const std::vector<TraceEntry>& trace, std::ostream& out) {
    for (const auto& e : trace) {
        out << "  " << e.rule << " " << to_string(e.op);
        if (!e.subject.empty())
            out << " " << e.subject;
        if (e.before || e.after)
            out << " : " << e.before.value_or("-") << " -> " << e.after.value_or("-");
        out << "\n";
    }
}

int cmd_check(const Config& cfg, const CheckArgs& a, std::ostream& out, std::ostream& err) {
    Prepared p = prepare(cfg, a);
    CheckReport r = algo_check(p.store, p.context, p.process);
    for (const auto& w : r.warnings)
        err << "warning: " << w << "\n";
    if (cfg.json()) {
        json j{{"verdict", r.verdict ? "accept" : "reject"}, {"trace", trace_json(r.trace)}};
        j["output"] = r.output ? context_json(*r.output) : json(nullptr);
        j["error"] = r.error ? error_json(*r.error) : json(nullptr);
        j["warnings"] = r.warnings;
        out << j.dump(2) << "\n";
    } else {
        if (r.verdict) {
            out << "accept\n  output: {" << print_context(*r.output) << "}\n";
        } else {
            out << "reject\n  " << error_text(*r.error) << "\n";
        }
        if (a.trace)
            print_trace(r.trace, out);
    }
    return r.verdict ? Accept : Reject;
}

int cmd_oracle(const Config& cfg, const CheckArgs& a, std::ostream& out) {
    Prepared p = prepare(cfg, a);
    bool v = declarative_check(p.store, p.context, p.process);
    if (cfg.json())
        out << json{{"verdict", v ? "accept" : "reject"}}.dump(2) << "\n";
    else
        out << (v ? "accept" : "reject") << "\n";
    return v ? Accept : Reject;
}

// run -----------------------------------------------------------------------

struct RunArgs {
    std::string file;
    std::size_t max_steps = 100;
    std::size_t max_repl = 0;
    std::optional<std::uint64_t> seed;
};

int cmd_run(const Config& cfg, const RunArgs& a, std::ostream& out) {
    TypeStore store = make_store(cfg, "");
    Process p = parse_process(read_source(a.file), store.basic_order());
    RunTrace t = run(p, a.max_steps, a.max_repl, a.seed);
    if (cfg.json()) {
        json steps = json::array();
        for (const auto& s : t.steps)
            steps.push_back({{"rule", s.rule}, {"result", print(s.result)}});
        out << json{{"initial", print(t.initial)}, {"steps", steps}, {"stop", std::string(to_string(t.stop))}}.dump(2)
            << "\n";
    } else {
        out << "   " << print(t.initial) << "\n";
        for (std::size_t i = 0; i < t.steps.size(); ++i)
            out << i + 1 << ". " << t.steps[i].rule << ": " << print(t.steps[i].result) << "\n";
        out << "stop: " << to_string(t.stop) << "\n";
    }
    return Accept;
}

} // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Session types as coalgebras: relations, type checking and reduction", "sct"};
    app.require_subcommand(1);
    Config cfg;
    app.add_option("--basic-order", cfg.basic_order_path, "Basic type preorder, one 'a <= b' per line")
        ->check(CLI::ExistingFile);
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"human", "json"}));
    app.add_flag("--ambient-bools,!--no-ambient-bools", cfg.ambient_bools, "Bind true and false to bool");

    auto* type = app.add_subcommand("type", "Parse, unfold or draw a session type");
    std::string type_action, type_arg;
    type->add_option("action", type_action)->required()->check(CLI::IsMember({"parse", "dot", "unfold"}));
    type->add_option("type", type_arg, "Type text or a file holding it")->required();

    auto* rel = app.add_subcommand("rel", "Decide bisimilarity, duality, subtyping or parallelizability");
    RelArgs ra;
    rel->add_option("--kind", ra.kind)->required()->check(CLI::IsMember({"bisim", "dual", "sub", "par"}));
    rel->add_option("types", ra.types, "Types (text or files)");
    rel->add_option("--coalgebra", ra.coalgebra, "JSON coalgebra")->check(CLI::ExistingFile);
    rel->add_option("--state", ra.state, "First operand as a state of --coalgebra");
    rel->add_option("--state2", ra.state2, "Second operand as a state of --coalgebra");

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Algorithmic type check");
    check->add_option("--context", ca.context, "Typing context, e.g. 'x: ?int, y: !int'");
    check->add_option("--coalgebra", ca.coalgebra, "JSON coalgebra for @state references")->check(CLI::ExistingFile);
    check->add_flag("--trace", ca.trace, "Print the rule trace");
    check->add_option("file", ca.file, "Process file, or - for stdin")->required();

    auto* oracle = app.add_subcommand("oracle", "Declarative type check by exhaustive search");
    oracle->add_option("--context", ca.context, "Typing context");
    oracle->add_option("--coalgebra", ca.coalgebra, "JSON coalgebra")->check(CLI::ExistingFile);
    oracle->add_option("file", ca.file, "Process file, or - for stdin")->required();

    RunArgs rn;
    std::uint64_t seed = 0;
    auto* runc = app.add_subcommand("run", "Reduce a process");
    runc->add_option("file", rn.file, "Process file, or - for stdin")->required();
    runc->add_option("--max-steps", rn.max_steps, "Step bound")->capture_default_str();
    runc->add_option("--max-repl", rn.max_repl, "Replication unfoldings for the whole run")->capture_default_str();
    auto* seed_opt = runc->add_option("--random", seed, "Pick successors at random with this seed");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? Accept : Usage;
    }

    try {
        if (type->parsed())
            return cmd_type(cfg, type_action, type_arg, out);
        if (rel->parsed())
            return cmd_rel(cfg, ra, out);
        if (check->parsed())
            return cmd_check(cfg, ca, out, err);
        if (oracle->parsed())
            return cmd_oracle(cfg, ca, out);
        if (seed_opt->count() > 0)
            rn.seed = seed;
        return cmd_run(cfg, rn, out);
    } catch (const Error& e) {
        if (cfg.json())
            out << json{{"error", error_json(e)}}.dump(2) << "\n";
        err << "error: " << error_text(e) << "\n";
        return Usage;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return Usage;
    }
}

} // namespace sct::cli
