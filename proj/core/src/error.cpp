#include "sct/error.hpp"

namespace sct {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DanglingTarget: return "DanglingTarget";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::EmptyBranch: return "EmptyBranch";
    case ErrorKind::UnknownState: return "UnknownState";
    case ErrorKind::DuplicateState: return "DuplicateState";
    case ErrorKind::BscHasNoDual: return "BscHasNoDual";
    case ErrorKind::DualUndefined: return "DualUndefined";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownBasicType: return "UnknownBasicType";
    case ErrorKind::FreeVariable: return "FreeVariable";
    case ErrorKind::NotContractive: return "NotContractive";
    case ErrorKind::DuplicateBranchLabel: return "DuplicateBranchLabel";
    case ErrorKind::UnknownVariable: return "UnknownVariable";
    case ErrorKind::PolarityMismatch: return "PolarityMismatch";
    case ErrorKind::LabelNotOffered: return "LabelNotOffered";
    case ErrorKind::MissingBranches: return "MissingBranches";
    case ErrorKind::SubtypeFailure: return "SubtypeFailure";
    case ErrorKind::LinearViolation: return "LinearViolation";
    case ErrorKind::BranchContextMismatch: return "BranchContextMismatch";
    case ErrorKind::NotParallelizable: return "NotParallelizable";
    case ErrorKind::ParCycle: return "ParCycle";
    case ErrorKind::ResidualLinear: return "ResidualLinear";
    case ErrorKind::MissingAnnotation: return "MissingAnnotation";
    case ErrorKind::OracleTooLarge: return "OracleTooLarge";
    }
    return "Unknown";
}

namespace {
std::string compose(ErrorKind kind, const std::string& message, const std::optional<SourcePos>& pos) {
    std::string out(to_string(kind));
    if (pos)
        out += " at " + std::to_string(pos->line) + ":" + std::to_string(pos->column);
    out += ": ";
    out += message;
    return out;
}
} // namespace

Error::Error(ErrorKind kind, std::string message, std::optional<SourcePos> pos)
    : std::runtime_error(compose(kind, message, pos)), kind_(kind), detail_(std::move(message)), pos_(pos) {}

} // namespace sct
