#include "curvecast/error.hpp"

namespace curvecast {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSeries: return "MalformedSeries";
    case ErrorCode::ZeroTotal: return "ZeroTotal";
    case ErrorCode::BadGranularity: return "BadGranularity";
    case ErrorCode::MalformedCurve: return "MalformedCurve";
    case ErrorCode::GranularityMismatch: return "GranularityMismatch";
    case ErrorCode::BadPrefix: return "BadPrefix";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyModel: return "EmptyModel";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::BadTotal: return "BadTotal";
    case ErrorCode::BadTolerance: return "BadTolerance";
    case ErrorCode::Complete: return "Complete";
    case ErrorCode::MalformedActual: return "MalformedActual";
    case ErrorCode::NoActuals: return "NoActuals";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::DuplicateProject: return "DuplicateProject";
    case ErrorCode::BadDuration: return "BadDuration";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
  }
  return "UnknownError";
}

}  // namespace curvecast
