#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>

#include "sct/coalgebra.hpp"

namespace sct {

enum class RelationKind { Bisim, Dual, Sim };

std::string_view to_string(RelationKind k);

using StatePair = std::pair<StateId, StateId>;
using Relation = std::set<StatePair>;

/// Result of a relation query. On success `relation` is a post-fixpoint
/// containing the queried pair; on failure `failure` is the first pair found
/// violating the one-step condition and `reason` says why.
struct RelationWitness {
    bool verdict = false;
    Relation relation;
    std::optional<StatePair> failure;
    std::string reason;

    explicit operator bool() const noexcept { return verdict; }
};

/// Verdict cache shared by relation queries over one (growing) coalgebra.
/// Adding states never changes the verdict for existing ones, so entries stay valid.
class RelationMemo {
public:
    RelationMemo() = default;
    RelationMemo(const RelationMemo& other);
    RelationMemo& operator=(const RelationMemo& other);

    std::optional<bool> lookup(RelationKind k, const StateId& x, const StateId& y) const;
    void store(RelationKind k, const StateId& x, const StateId& y, bool v);
    std::optional<bool> lookup_par(const StateId& x) const;
    void store_par(const StateId& x, bool v);
    void clear();
    std::size_t size() const;

private:
    mutable std::mutex mu_;
    std::map<std::tuple<RelationKind, StateId, StateId>, bool> pairs_;
    std::map<StateId, bool> par_;
};

/// With a memo, a cached verdict short-cuts the search and the returned
/// relation is just the queried pair.
RelationWitness decide_bisimilar(const SessionCoalgebra& c, const StateId& x, const StateId& y,
                                 RelationMemo* memo = nullptr);
RelationWitness decide_dual(const SessionCoalgebra& c, const StateId& x, const StateId& y,
                            RelationMemo* memo = nullptr);
RelationWitness decide_similar(const SessionCoalgebra& c, const StateId& x, const StateId& y,
                               RelationMemo* memo = nullptr);
RelationWitness decide(RelationKind k, const SessionCoalgebra& c, const StateId& x, const StateId& y,
                       RelationMemo* memo = nullptr);

/// Every pair of non-par, non-end states in the continuation closure of `x` must be bisimilar.
/// On success `relation` is a bisimulation relating one of them to all the others.
RelationWitness decide_parallelizable(const SessionCoalgebra& c, const StateId& x, RelationMemo* memo = nullptr);

/// Greatest fixpoint by deletion, starting from all of X x X.
Relation brute_force_relation(const SessionCoalgebra& c, RelationKind kind);

/// Parallelizability of every state, computed from the brute-force bisimilarity.
std::map<StateId, bool> brute_force_parallelizable(const SessionCoalgebra& c);

/// One pass: every pair of `r` satisfies the defining condition with successors inside `r`.
/// Data-side checks (bisimilar payloads for duality, par for simulation) use the deciders.
bool is_post_fixpoint(const SessionCoalgebra& c, RelationKind kind, const Relation& r);

} // namespace sct
