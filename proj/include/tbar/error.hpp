#ifndef TBAR_ERROR_HPP
#define TBAR_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tbar {

/// Failure categories reported by library operations.
enum class ErrorCode {
    InvalidArgument,
    DimensionMismatch,
    NonInteger,
    Overlap,
    MethodMismatch,
    SizeCap,
    NonzeroBoundary,
    Fineness,
    FillTooBig,
    HomotopyObstruction,
    Diverged,
    ProjectionUnsafe,
    Format,
    Config,
    Io
};

const char* error_code_name(ErrorCode code);

/// Exception carrying an ErrorCode alongside a human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::DimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::NonInteger: return "NONINTEGER";
    case ErrorCode::Overlap: return "OVERLAP";
    case ErrorCode::MethodMismatch: return "METHOD_MISMATCH";
    case ErrorCode::SizeCap: return "SIZE_CAP";
    case ErrorCode::NonzeroBoundary: return "NONZERO_BOUNDARY";
    case ErrorCode::Fineness: return "FINENESS";
    case ErrorCode::FillTooBig: return "FILL_TOO_BIG";
    case ErrorCode::HomotopyObstruction: return "HOMOTOPY_OBSTRUCTION";
    case ErrorCode::Diverged: return "DIVERGED";
    case ErrorCode::ProjectionUnsafe: return "PROJECTION_UNSAFE";
    case ErrorCode::Format: return "FORMAT";
    case ErrorCode::Config: return "CONFIG";
    case ErrorCode::Io: return "IO";
    }
    return "UNKNOWN";
}

} // namespace tbar

#endif
