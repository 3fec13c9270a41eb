#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "sct/coalgebra.hpp"
#include "sct/process.hpp"
#include "sct/typecheck.hpp"

namespace sct {
inline void PrintTo(ErrorKind k, std::ostream* os) { *os << to_string(k); }
} // namespace sct

namespace sct::testing {

/// Absolute path of a file under tests/data.
std::string data_path(const std::string& name);
std::string read_text(const std::string& path);
SessionCoalgebra load_coalgebra(const std::string& name);

/// Kind of the Error thrown by `f`, or nothing if it returns normally.
template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

/// A validated coalgebra with `n` states named s0.. and random labels and targets.
/// Branch labels come from {a, b, c}; basic types from {int, real, bool}.
SessionCoalgebra random_coalgebra(std::mt19937_64& rng, std::size_t n);

// Oracle corpus ---------------------------------------------------------------

/// Bounds of the enumerated corpus.
struct CorpusBounds {
    std::size_t max_restrictions = 2;
    std::size_t max_components = 3;
    std::size_t max_depth = 3;
    /// Total prefixes over all components.
    std::size_t max_prefixes = 3;
};

/// Context types of the corpus, bound to the context variable `x`.
const std::vector<std::string>& corpus_context_types();
/// Annotations of corpus restrictions.
const std::vector<std::string>& corpus_restriction_types();

struct CorpusCase {
    std::string context_type; // type of x
    Process process;
};

/// Calls `visit` on every corpus term; stops early when it returns false.
/// Returns the number of terms visited.
std::size_t enumerate_corpus(const CorpusBounds& bounds, const std::function<bool(const CorpusCase&)>& visit);

/// Context of a corpus case, including the ambient booleans.
TypingContext corpus_context(TypeStore& store, const CorpusCase& c);

// Type-directed processes -------------------------------------------------------

/// A random process using `x` according to state `t`, for a context that also
/// holds `vi: int`, `vr: real`, `vb: bool`. Accepted by algo_check under x:t
/// whenever generation succeeds; returns null when `t` admits no finite use.
Process generate_user(TypeStore& store, const StateId& t, std::mt19937_64& rng, std::size_t fuel = 6);

/// The data variables generate_user may reference.
TypingContext generator_context(TypeStore& store);

/// Types for subtyping triples.
const std::vector<std::string>& subtyping_pool();

} // namespace sct::testing
