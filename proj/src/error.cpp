#include "alexlab/error.hpp"

namespace alexlab {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "Domain";
    case ErrorCode::TriangleInequality: return "TriangleInequality";
    case ErrorCode::PerimeterTooLarge: return "PerimeterTooLarge";
    case ErrorCode::InconsistentGluing: return "InconsistentGluing";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::HostMismatch: return "HostMismatch";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::EmptyShell: return "EmptyShell";
    case ErrorCode::EmptyBoundary: return "EmptyBoundary";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::NotClosed: return "NotClosed";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace alexlab
