#include "intdim/error.hpp"

#include <algorithm>
#include <sstream>

namespace intdim {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::InsufficientClass: return "InsufficientClass";
    case ErrorCode::UnreadableImage: return "UnreadableImage";
    case ErrorCode::InconsistentDims: return "InconsistentDims";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::TooFewRecords: return "TooFewRecords";
    case ErrorCode::Io: return "Io";
    case ErrorCode::NonFiniteData: return "NonFiniteData";
    case ErrorCode::MalformedResults: return "MalformedResults";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

namespace {

std::string describe_pairs(const std::vector<IndexPair>& pairs) {
    std::ostringstream out;
    out << "zero distance between " << pairs.size() << " point pair(s):";
    const std::size_t shown = std::min<std::size_t>(pairs.size(), 10);
    for (std::size_t p = 0; p < shown; ++p) {
        out << " (" << pairs[p].first << ", " << pairs[p].second << ")";
    }
    if (shown < pairs.size()) {
        out << " ...";
    }
    out << "; deduplicate the data and retry";
    return out.str();
}

} // namespace

DuplicatePointsError::DuplicatePointsError(std::vector<IndexPair> pairs)
    : Error(ErrorCode::DuplicatePoints, describe_pairs(pairs)), pairs_(std::move(pairs)) {}

} // namespace intdim
