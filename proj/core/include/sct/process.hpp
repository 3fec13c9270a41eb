#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sct/error.hpp"
#include "sct/types.hpp"

namespace sct {

struct ProcNode;
using Process = std::shared_ptr<const ProcNode>;

/// A name or one of the literals `true` / `false`.
struct Value {
    std::string name;
    bool literal = false;

    static Value var(std::string n) { return {std::move(n), false}; }
    static Value boolean(bool b) { return {b ? "true" : "false", true}; }

    friend bool operator==(const Value&, const Value&) = default;
};

namespace proc {
struct Inact {};
struct Output {
    std::string channel;
    Value payload;
    Process cont;
};
/// `annotation` is null once erased.
struct Input {
    std::string channel;
    std::string var;
    Type annotation;
    Process cont;
};
struct Branch {
    std::string channel;
    std::map<std::string, Process> arms;
};
struct Select {
    std::string channel;
    std::string label;
    Process cont;
};
struct Par {
    Process left;
    Process right;
};
struct Repl {
    Process body;
};
/// `annotation` types `x`, or `y` when `annotates_second` is set; null once erased.
struct Res {
    std::string x;
    std::string y;
    Type annotation;
    bool annotates_second = false;
    Process body;
};
} // namespace proc

struct ProcNode {
    std::variant<proc::Inact, proc::Output, proc::Input, proc::Branch, proc::Select, proc::Par, proc::Repl, proc::Res>
        node;
    SourcePos loc;
};

namespace mkp {
Process inact(SourcePos loc = {});
Process output(std::string ch, Value v, Process cont, SourcePos loc = {});
Process input(std::string ch, std::string var, Type ann, Process cont, SourcePos loc = {});
Process branch(std::string ch, std::map<std::string, Process> arms, SourcePos loc = {});
Process select(std::string ch, std::string label, Process cont, SourcePos loc = {});
Process par(Process l, Process r, SourcePos loc = {});
Process repl(Process body, SourcePos loc = {});
Process res(std::string x, std::string y, Type ann, Process body, SourcePos loc = {}, bool annotates_second = false);
} // namespace mkp

/// Parses a process. Bound names are renamed apart from each other and from the free names.
/// Annotations are optional in the syntax; the checker insists on them.
Process parse_process(std::string_view text, const BasicTypePreorder& order = BasicTypePreorder::defaults());

/// Concrete syntax; parses back to an equal term.
std::string print(const Process& p);

/// Structural equality, annotations compared as types.
bool process_equal(const Process& a, const Process& b);

/// Drops input and restriction annotations.
Process erase(const Process& p);

std::set<std::string> free_names(const Process& p);
/// Every name bound anywhere in `p`.
std::set<std::string> bound_names(const Process& p);

/// Capture-avoiding substitution of `v` for the free name `x`.
Process substitute(const Process& p, const std::string& x, const Value& v);

/// Renames every binder of `p` to a name outside `avoid`, adding the new names to `avoid`.
Process freshen(const Process& p, std::set<std::string>& avoid);

/// Renames only the binders of `p` that occur in `avoid`.
Process rename_apart(const Process& p, std::set<std::string> avoid);

/// Canonical representative of the structural congruence class, replication kept folded.
Process normalize(const Process& p);

struct Reduction {
    std::string rule; // "r-com" or "r-sync"
    Process result;   // normalized
    std::size_t unfolds = 0;
};

/// All one-step successors, unfolding at most `repl_budget` (capped at 2) replications.
/// Sorted by printed result, duplicates removed.
std::vector<Reduction> reduce_step(const Process& p, std::size_t repl_budget);

struct RunStep {
    std::string rule;
    Process result;
};

struct RunTrace {
    enum class Stop { Quiescent, MaxSteps, ReplBudget };
    Process initial;
    std::vector<RunStep> steps;
    Stop stop = Stop::Quiescent;
};

std::string_view to_string(RunTrace::Stop s);

/// Repeatedly reduces, taking the least successor or, with a seed, a random one.
/// `repl_budget` bounds the replication unfoldings of the whole run.
RunTrace run(const Process& p, std::size_t max_steps, std::size_t repl_budget,
             std::optional<std::uint64_t> seed = std::nullopt);

} // namespace sct
