#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>

#include "sct/coalgebra.hpp"

namespace sct {

enum class Qualifier { Lin, Un };

struct TypeNode;
/// Immutable, shareable session type expression.
using Type = std::shared_ptr<const TypeNode>;

namespace ty {
struct Basic {
    std::string name;
};
struct End {};
/// de Bruijn index; 0 is the innermost enclosing `rec`.
struct Var {
    std::size_t index;
};
/// `hint` is the source name of the binder and takes no part in equality.
struct Mu {
    std::string hint;
    Type body;
};
/// `?T.S` and `!T.S`.
struct Com {
    Qualifier qual;
    Polarity pol;
    Type payload;
    Type cont;
};
/// `&{...}` (In) and `+{...}` (Out).
struct Choice {
    Qualifier qual;
    Polarity pol;
    std::map<std::string, Type> arms;
};
} // namespace ty

struct TypeNode {
    std::variant<ty::Basic, ty::End, ty::Var, ty::Mu, ty::Com, ty::Choice> node;
};

namespace mk {
Type basic(std::string name);
Type end();
Type var(std::size_t index);
Type mu(std::string hint, Type body);
Type com(Qualifier q, Polarity p, Type payload, Type cont);
Type recv(Type payload, Type cont = end(), Qualifier q = Qualifier::Lin);
Type send(Type payload, Type cont = end(), Qualifier q = Qualifier::Lin);
Type choice(Qualifier q, Polarity p, std::map<std::string, Type> arms);
} // namespace mk

/// Structural equality up to binder names.
bool type_equal(const Type& a, const Type& b);

/// Parses the concrete syntax. Identifiers bound by an enclosing `rec` are
/// variables; any other identifier must name a type of `order`.
Type parse_type(std::string_view text, const BasicTypePreorder& order = BasicTypePreorder::defaults());

/// Returns `t` if it is closed and contractive; throws FreeVariable or NotContractive otherwise.
const Type& validate_type(const Type& t);

/// Unrolls leading `rec` binders until the head is a constructor.
Type unfold(const Type& t);

/// Replaces variable `index` by the closed type `v`, lowering the indices above it.
Type substitute(const Type& t, std::size_t index, const Type& v);

/// Readable concrete syntax using the binder hints (renamed when they would clash).
/// Parses back to an equal type.
std::string pretty_print(const Type& t);

/// Concrete syntax with binders named X1, X2, ... by depth. Equal types print
/// identically; used as the state id in coalgebras built from types.
std::string canonical_text(const Type& t);

bool is_unrestricted_type(const Type& t);

struct TypeCoalgebra {
    SessionCoalgebra coalgebra;
    StateId root;
};

/// Builds the coalgebra generated by `t`, one state per distinct unfolded subterm.
TypeCoalgebra type_to_coalgebra(const Type& t, const BasicTypePreorder& order = BasicTypePreorder::defaults());

/// Same, but adds the states to `base`. Throws DuplicateState if `base` already
/// uses one of the canonical ids for a different state.
TypeCoalgebra type_to_coalgebra(const Type& t, const SessionCoalgebra& base);

} // namespace sct
