#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sct/coalgebra.hpp"
#include "sct/error.hpp"
#include "sct/process.hpp"
#include "sct/relations.hpp"
#include "sct/types.hpp"

namespace sct {

/// Variables to states of one ambient coalgebra.
using TypingContext = std::map<std::string, StateId>;

bool is_unrestricted(const SessionCoalgebra& c, const StateId& t);
bool is_unrestricted(const SessionCoalgebra& c, const TypingContext& g);

/// Every split of `g`: unrestricted bindings go to both sides, each linear one to exactly one.
std::vector<std::pair<TypingContext, TypingContext>> split_contexts(const SessionCoalgebra& c,
                                                                    const TypingContext& g);

/// `g` without the variables of `f`. Throws LinearViolation if one of them is bound to a linear type.
TypingContext context_difference(const SessionCoalgebra& c, const TypingContext& g, const std::set<std::string>& f);

/// The ambient coalgebra together with compiled types, duals and relation verdicts.
/// Grows monotonically; a store can serve any number of checks.
class TypeStore {
public:
    TypeStore();
    explicit TypeStore(SessionCoalgebra base);

    const SessionCoalgebra& coalgebra() const noexcept { return c_; }
    const BasicTypePreorder& basic_order() const noexcept { return c_.basic_order(); }

    /// State of a closed, validated type; compiled once.
    StateId add(const Type& t);
    /// Parses and adds.
    StateId add(std::string_view type_text);
    /// Dual state, materialised on first request. Throws DualUndefined.
    StateId dual(const StateId& x);

    RelationWitness similar(const StateId& x, const StateId& y);
    RelationWitness bisimilar(const StateId& x, const StateId& y);
    RelationWitness parallelizable(const StateId& x);
    bool unrestricted(const StateId& x) const { return is_unrestricted(c_, x); }

    RelationMemo& memo() noexcept { return memo_; }

private:
    SessionCoalgebra c_;
    std::map<std::string, StateId> compiled_;
    std::map<std::string, StateId, std::less<>> texts_;
    RelationMemo memo_;
};

/// Comma-separated `x: TYPE` items; `x: @id` names an existing state of the store.
TypingContext parse_context(std::string_view text, TypeStore& store);
std::string print_context(const TypingContext& g);

/// Adds `true: bool` and `false: bool` unless already bound.
TypingContext with_ambient_bools(const TypingContext& g, TypeStore& store);

struct TraceEntry {
    enum class Op { Bind, Rebind, Remove, Mark, Save, Restore, Pop };
    std::string rule;
    std::string subject;
    std::optional<StateId> before;
    std::optional<StateId> after;
    Op op = Op::Mark;
};

std::string_view to_string(TraceEntry::Op op);

struct CheckReport {
    bool verdict = false;
    TypingContext input;
    /// Output context of the judgement whenever it was derivable.
    std::optional<TypingContext> output;
    std::vector<std::string> warnings;
    std::optional<Error> error;
    std::vector<TraceEntry> trace;
};

/// The judgement Gamma |- P ; Gamma' with no condition on Gamma'.
CheckReport algo_judge(TypeStore& store, const TypingContext& g, const Process& p);
/// algo_judge plus the requirement that the output be unrestricted.
CheckReport algo_check(TypeStore& store, const TypingContext& g, const Process& p);
CheckReport algo_check(const SessionCoalgebra& c, const TypingContext& g, const Process& p);

/// Applies the context operations of a trace to `input`.
TypingContext replay_trace(const TypingContext& input, const std::vector<TraceEntry>& trace);

/// Exhaustive search for a derivation in the declarative system. Throws
/// OracleTooLarge when a parallel node would need more than 2^12 splits.
bool declarative_check(TypeStore& store, const TypingContext& g, const Process& p);
bool declarative_check(const SessionCoalgebra& c, const TypingContext& g, const Process& p);

/// With U below T and Gamma, x:T |- P accepted, checks Gamma, x:U |- P.
/// False if either premise fails.
bool check_subsumption_admissible(TypeStore& store, const TypingContext& g, const std::string& x, const StateId& t,
                                  const StateId& u, const Process& p);

} // namespace sct
