#include <gtest/gtest.h>

#include "sct/relations.hpp"
#include "sct/types.hpp"
#include "support.hpp"

using namespace sct;
using sct::testing::error_kind;

namespace {

std::optional<ErrorKind> parse_error(std::string_view text) {
    return error_kind([&] { parse_type(text); });
}

} // namespace

TEST(ParseType, Constructors) {
    Type t = parse_type("?int.!bool.end");
    ASSERT_TRUE(std::holds_alternative<ty::Com>(t->node));
    const auto& c = std::get<ty::Com>(t->node);
    EXPECT_EQ(c.pol, Polarity::In);
    EXPECT_EQ(c.qual, Qualifier::Lin);
    EXPECT_TRUE(type_equal(c.payload, mk::basic("int")));
    EXPECT_TRUE(type_equal(c.cont, mk::send(mk::basic("bool"))));
}

TEST(ParseType, TrailingEndIsOptional) {
    EXPECT_TRUE(type_equal(parse_type("?int"), parse_type("?int.end")));
    EXPECT_TRUE(type_equal(parse_type("+{a: !int}"), parse_type("+{a: !int.end}")));
}

TEST(ParseType, ChoiceArmsAreUnordered) {
    EXPECT_TRUE(type_equal(parse_type("&{b: end, a: ?int}"), parse_type("&{a: ?int, b: end}")));
    EXPECT_FALSE(type_equal(parse_type("&{a: end}"), parse_type("+{a: end}")));
}

TEST(ParseType, Qualifiers) {
    Type t = parse_type("un?int");
    EXPECT_EQ(std::get<ty::Com>(t->node).qual, Qualifier::Un);
    EXPECT_TRUE(is_unrestricted_type(t));
    EXPECT_FALSE(is_unrestricted_type(parse_type("?int")));
    EXPECT_TRUE(is_unrestricted_type(parse_type("end")));
}

TEST(ParseType, DelegationNeedsParentheses) {
    Type t = parse_type("!(?int).end");
    EXPECT_TRUE(type_equal(std::get<ty::Com>(t->node).payload, parse_type("?int")));
}

TEST(ParseType, BinderNamesDoNotMatter) {
    EXPECT_TRUE(type_equal(parse_type("rec X.!int.X"), parse_type("rec Y.!int.Y")));
    EXPECT_FALSE(type_equal(parse_type("rec X.rec Y.?int.X"), parse_type("rec X.rec Y.?int.Y")));
}

TEST(ParseType, Errors) {
    EXPECT_EQ(parse_error("?int."), ErrorKind::SyntaxError);
    EXPECT_EQ(parse_error("&{a: end, a: end}"), ErrorKind::DuplicateBranchLabel);
    EXPECT_EQ(parse_error("?string"), ErrorKind::UnknownBasicType);
    EXPECT_EQ(parse_error("rec X.?int.Y"), ErrorKind::UnknownBasicType);
    EXPECT_EQ(parse_error("rec X.X"), ErrorKind::NotContractive);
    EXPECT_EQ(parse_error("rec X.rec Y.X"), ErrorKind::NotContractive);
}

TEST(ParseType, CustomBasicOrder) {
    auto order = BasicTypePreorder::from_pairs({{"nat", "int"}});
    EXPECT_NO_THROW(parse_type("?nat", order));
    EXPECT_EQ(parse_error("?nat"), ErrorKind::UnknownBasicType);
}

TEST(ValidateType, ClosedAndContractive) {
    EXPECT_EQ(error_kind([] { validate_type(mk::send(mk::basic("int"), mk::var(0))); }), ErrorKind::FreeVariable);
    EXPECT_EQ(error_kind([] { validate_type(mk::mu("X", mk::var(0))); }), ErrorKind::NotContractive);
    EXPECT_FALSE(error_kind([] { validate_type(mk::mu("X", mk::send(mk::basic("int"), mk::var(0)))); }));
}

TEST(Unfold, ExposesConstructor) {
    Type t = parse_type("rec X.!int.X");
    Type u = unfold(t);
    ASSERT_TRUE(std::holds_alternative<ty::Com>(u->node));
    EXPECT_TRUE(type_equal(std::get<ty::Com>(u->node).cont, t));
    EXPECT_TRUE(type_equal(unfold(u), u));
}

TEST(Substitute, LowersOuterIndices) {
    // body of rec X.rec Y.?X.Y with X := end
    Type body = std::get<ty::Mu>(parse_type("rec X.rec Y.?X.Y")->node).body;
    Type r = substitute(body, 0, mk::end());
    EXPECT_TRUE(type_equal(r, parse_type("rec Y.?end.Y")));
}

TEST(Print, CanonicalTextIdentifiesEqualTypes) {
    EXPECT_EQ(canonical_text(parse_type("rec Y.!int.Y")), "rec X1.!int.X1");
    EXPECT_EQ(canonical_text(parse_type("rec A.!int.A")), canonical_text(parse_type("rec B.!int.B")));
    EXPECT_NE(canonical_text(parse_type("?int")), canonical_text(parse_type("!int")));
}

TEST(Print, PrettyPrintRoundTrips) {
    for (const char* text : {"?int", "un !int.rec X.un !int.X", "&{a: ?int, b: +{c: end}}", "rec X.rec Y.?X.Y",
                             "!(?int.!bool).end", "rec X.un &{go: !real.X, stop: end}"}) {
        Type t = parse_type(text);
        EXPECT_TRUE(type_equal(parse_type(pretty_print(t)), t)) << text << " -> " << pretty_print(t);
    }
}

TEST(Print, ShadowedHintsAreRenamed) {
    Type t = mk::mu("X", mk::mu("X", mk::recv(mk::var(1), mk::var(0))));
    EXPECT_TRUE(type_equal(parse_type(pretty_print(t)), t)) << pretty_print(t);
}

TEST(ToCoalgebra, StatesPerUnfoldedSubterm) {
    auto tc = type_to_coalgebra(parse_type("rec X.?int.!bool.X"));
    const auto& c = tc.coalgebra;
    EXPECT_EQ(c.op(tc.root), Op::Com);
    StateId next = c.target(tc.root, TransitionKey::star());
    EXPECT_EQ(c.target(next, TransitionKey::star()), tc.root);
    EXPECT_EQ(c.label(c.target(tc.root, TransitionKey::data())), StateLabel(label::Bsc{"int"}));
    EXPECT_EQ(tc.coalgebra.size(), 4u);
}

TEST(ToCoalgebra, UnrestrictedIsParOverLinear) {
    auto tc = type_to_coalgebra(parse_type("un?int"));
    const auto& c = tc.coalgebra;
    EXPECT_EQ(c.op(tc.root), Op::Par);
    StateId inner = c.target(tc.root, TransitionKey::star());
    EXPECT_EQ(c.label(inner), StateLabel(label::Com{Polarity::In}));
}

TEST(ToCoalgebra, AlphaEquivalentTypesShareStates) {
    auto a = type_to_coalgebra(parse_type("rec X.!int.X"));
    auto b = type_to_coalgebra(parse_type("rec Y.!int.Y"), a.coalgebra);
    EXPECT_EQ(a.root, b.root);
    EXPECT_EQ(a.coalgebra.size(), b.coalgebra.size());
}

TEST(ToCoalgebra, UnfoldingIsBisimilar) {
    Type t = parse_type("rec X.&{a: ?int.X, b: end}");
    auto a = type_to_coalgebra(t);
    auto b = type_to_coalgebra(unfold(t), a.coalgebra);
    EXPECT_TRUE(decide_bisimilar(b.coalgebra, a.root, b.root).verdict);
}
