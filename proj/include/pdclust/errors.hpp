#pragma once

#include <stdexcept>
#include <string>

namespace pdclust {

enum class Errc {
    InvalidK,
    BadInput,
    SeedConflict,
    TooLarge,
    RefusesToCertify,
    HorizonExhausted,
    InternalError,
};

class SolverError : public std::runtime_error {
public:
    SolverError(Errc code, const std::string& msg)
        : std::runtime_error(msg), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

/// Thrown when the level horizon ends before an independent set of size k
/// appears. Carries the tightest bracketing sizes seen around k.
class HorizonExhaustedError : public SolverError {
public:
    HorizonExhaustedError(int smallest_above, int largest_below, const std::string& msg)
        : SolverError(Errc::HorizonExhausted, msg),
          smallest_above_k(smallest_above),
          largest_below_k(largest_below) {}
    int smallest_above_k;  // smallest |IS| > k observed (-1 if none)
    int largest_below_k;   // largest |IS| < k observed (-1 if none)
};

}  // namespace pdclust
