#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sct {

/// Opaque state name. Two states are the same iff their ids compare equal.
using StateId = std::string;

enum class Op { Com, Branch, End, Bsc, Par };
enum class Polarity { In, Out };

constexpr Polarity dual(Polarity p) noexcept { return p == Polarity::In ? Polarity::Out : Polarity::In; }

std::string_view to_string(Op op);
std::string_view to_string(Polarity p);

namespace label {
struct Com {
    Polarity pol;
    friend bool operator==(const Com&, const Com&) = default;
};
struct Branch {
    Polarity pol;
    std::set<std::string> labels;
    friend bool operator==(const Branch&, const Branch&) = default;
};
struct End {
    friend bool operator==(const End&, const End&) = default;
};
struct Bsc {
    std::string type;
    friend bool operator==(const Bsc&, const Bsc&) = default;
};
struct Par {
    friend bool operator==(const Par&, const Par&) = default;
};
} // namespace label

/// The element of A attached to a state: operation plus polarity, label set or basic type.
using StateLabel = std::variant<label::Com, label::Branch, label::End, label::Bsc, label::Par>;

Op op_of(const StateLabel& l);
std::optional<Polarity> polarity_of(const StateLabel& l);

/// Short rendering used by DOT and diagnostics: `?`, `!`, `&{a,b}`, `+{a,b}`, `end`, the basic type, `par`.
std::string to_string(const StateLabel& l);

/// Flips the polarity of com and branch labels; end and par are self-dual.
/// Throws Error(BscHasNoDual) for basic types.
StateLabel label_dual(const StateLabel& l);

/// Key of an outgoing transition. `Data` is the payload transition of a com state;
/// `Star` the single continuation of com and par states; `Label` a branch arm.
struct TransitionKey {
    enum class Kind { Data, Star, Label };

    Kind kind = Kind::Star;
    std::string label;

    static TransitionKey data() { return {Kind::Data, {}}; }
    static TransitionKey star() { return {Kind::Star, {}}; }
    static TransitionKey arm(std::string l) { return {Kind::Label, std::move(l)}; }

    bool is_data() const noexcept { return kind == Kind::Data; }
    bool is_continuation() const noexcept { return kind != Kind::Data; }

    friend auto operator<=>(const TransitionKey&, const TransitionKey&) = default;
};

std::string to_string(const TransitionKey& k);

using TransitionMap = std::map<TransitionKey, StateId>;

struct State {
    StateLabel label;
    TransitionMap transitions;

    friend bool operator==(const State&, const State&) = default;
};

/// The exact key set a state with label `l` must have.
std::set<TransitionKey> required_keys(const StateLabel& l);

/// Reflexive-transitive subtyping preorder over basic data types.
class BasicTypePreorder {
public:
    using Pair = std::pair<std::string, std::string>;

    BasicTypePreorder() = default;
    BasicTypePreorder(std::set<std::string> universe, const std::vector<Pair>& pairs);

    /// {int, real, bool} with int <= real.
    static const BasicTypePreorder& defaults();
    /// {int, real, bool} plus every type named in `pairs`, ordered by the closure of `pairs` alone.
    static BasicTypePreorder from_pairs(const std::vector<Pair>& pairs);

    bool contains(const std::string& type) const { return universe_.contains(type); }
    bool leq(const std::string& lhs, const std::string& rhs) const;

    const std::set<std::string>& universe() const noexcept { return universe_; }
    /// Non-reflexive pairs of the closure, plus a reflexive pair for every
    /// non-default type that would otherwise go unmentioned.
    std::vector<Pair> serializable_pairs() const;

    friend bool operator==(const BasicTypePreorder&, const BasicTypePreorder&) = default;

private:
    std::set<std::string> universe_;
    std::set<Pair> leq_;
};

/// Unvalidated state table, as read from JSON or assembled by hand.
struct RawCoalgebra {
    std::map<StateId, State> states;
    BasicTypePreorder basic_order = BasicTypePreorder::defaults();
};

struct DualClosure;

/// A finite session coalgebra. Immutable once built; extension returns a new value.
class SessionCoalgebra {
public:
    SessionCoalgebra() : order_(BasicTypePreorder::defaults()) {}

    bool contains(const StateId& id) const { return states_.contains(id); }
    const State& state(const StateId& id) const;
    const StateLabel& label(const StateId& id) const { return state(id).label; }
    const TransitionMap& transitions(const StateId& id) const { return state(id).transitions; }
    Op op(const StateId& id) const { return op_of(label(id)); }
    const StateId& target(const StateId& id, const TransitionKey& key) const;

    const std::map<StateId, State>& states() const noexcept { return states_; }
    std::size_t size() const noexcept { return states_.size(); }
    const BasicTypePreorder& basic_order() const noexcept { return order_; }

    /// Dual previously materialised by dual_closure, if any.
    std::optional<StateId> known_dual(const StateId& id) const;
    const std::map<StateId, StateId>& duals() const noexcept { return duals_; }

    /// Union of two coalgebras over the same basic order. States present in both must agree.
    SessionCoalgebra merged(const SessionCoalgebra& other) const;

    RawCoalgebra raw() const { return {states_, order_}; }

    friend bool operator==(const SessionCoalgebra& a, const SessionCoalgebra& b) {
        return a.states_ == b.states_ && a.order_ == b.order_;
    }

private:
    friend SessionCoalgebra validate_coalgebra(RawCoalgebra raw);
    friend DualClosure dual_closure(const SessionCoalgebra& c, const StateId& x);

    std::map<StateId, State> states_;
    BasicTypePreorder order_;
    std::map<StateId, StateId> duals_;
};

/// Checks every structural invariant and returns the coalgebra.
/// Errors: DanglingTarget, ArityMismatch, EmptyBranch, UnknownBasicType, FormatError.
SessionCoalgebra validate_coalgebra(RawCoalgebra raw);

/// Least transition-closed set containing `x`.
std::set<StateId> generated_subcoalgebra(const SessionCoalgebra& c, const StateId& x);

/// Least set containing `x` closed under continuation transitions only.
std::set<StateId> continuation_closure(const SessionCoalgebra& c, const StateId& x);

struct DualClosure {
    SessionCoalgebra coalgebra;
    StateId dual;
};

/// Extends `c` with mirror states for everything continuation-reachable from `x`.
/// Data transitions of a mirror point at the original payload states. Duals are
/// memoised in the result, so dualising the returned state yields `x` again.
/// Throws Error(DualUndefined) if a basic-type state is continuation-reachable.
DualClosure dual_closure(const SessionCoalgebra& c, const StateId& x);

/// Graphviz rendering. With `roots`, only their generated subcoalgebras are drawn
/// and the roots are highlighted.
std::string to_dot(const SessionCoalgebra& c, const std::optional<std::set<StateId>>& roots = std::nullopt);

/// JSON state-table format. Unknown fields are rejected with FormatError.
RawCoalgebra raw_coalgebra_from_json(std::string_view text);
SessionCoalgebra coalgebra_from_json(std::string_view text);
std::string coalgebra_to_json(const SessionCoalgebra& c, int indent = 2);

/// Branch labels and type variables: [A-Za-z][A-Za-z0-9_]*.
bool is_identifier(std::string_view s);

} // namespace sct
