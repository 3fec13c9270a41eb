#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sct {

enum class ErrorKind {
    // coalgebra-core
    DanglingTarget,
    ArityMismatch,
    EmptyBranch,
    UnknownState,
    DuplicateState,
    BscHasNoDual,
    DualUndefined,
    FormatError,
    // type-syntax
    SyntaxError,
    UnknownBasicType,
    FreeVariable,
    NotContractive,
    // process-calculus
    DuplicateBranchLabel,
    // typechecker
    UnknownVariable,
    PolarityMismatch,
    LabelNotOffered,
    MissingBranches,
    SubtypeFailure,
    LinearViolation,
    BranchContextMismatch,
    NotParallelizable,
    ParCycle,
    ResidualLinear,
    MissingAnnotation,
    OracleTooLarge,
};

std::string_view to_string(ErrorKind kind);

/// Position in a source text. Lines and columns are 1-based.
struct SourcePos {
    std::size_t offset = 0;
    std::size_t line = 1;
    std::size_t column = 1;

    friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::optional<SourcePos> pos = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }
    const std::optional<SourcePos>& position() const noexcept { return pos_; }

private:
    ErrorKind kind_;
    std::string detail_;
    std::optional<SourcePos> pos_;
};

} // namespace sct
