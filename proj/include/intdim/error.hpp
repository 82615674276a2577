#ifndef INTDIM_ERROR_HPP
#define INTDIM_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace intdim {

// Values are part of the C ABI and double as CLI exit codes; never renumber.
enum class ErrorCode : int {
    InvalidArgument = 1,
    InvalidK = 2,
    DuplicatePoints = 3,
    DegenerateNeighborhood = 4,
    MalformedManifest = 5,
    InsufficientClass = 6,
    UnreadableImage = 7,
    InconsistentDims = 8,
    SpecInvalid = 9,
    DegenerateDesign = 10,
    TooFewRecords = 11,
    Io = 12,
    NonFiniteData = 13,
    MalformedResults = 14,
    Internal = 70,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

using IndexPair = std::pair<std::size_t, std::size_t>;

/// Raised when some point's k-neighborhood contains a point at distance exactly 0.
/// Pairs are (lower index, higher index), sorted and unique.
class DuplicatePointsError : public Error {
public:
    explicit DuplicatePointsError(std::vector<IndexPair> pairs);
    const std::vector<IndexPair>& pairs() const noexcept { return pairs_; }

private:
    std::vector<IndexPair> pairs_;
};

} // namespace intdim

#endif
