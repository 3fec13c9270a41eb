#pragma once

#include "lexer.hpp"
#include "sct/types.hpp"

namespace sct::detail {

/// Parses one type starting at the current token, leaving the stream after it.
/// The result is validated.
Type parse_type_from(TokenStream& ts, const BasicTypePreorder& order);

} // namespace sct::detail
