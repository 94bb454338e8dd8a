#pragma once

// Shared error type and small utilities used across the library.

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gerbecalc {

// All recoverable failures (bad input data, tolerance violations in
// preconditions, malformed files) throw Error with a human-readable message.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
template <class... Args>
[[noreturn]] inline void fail(Args&&... args) {
    std::ostringstream os;
    (os << ... << args);
    throw Error(os.str());
}
}  // namespace detail

// Precondition check that survives NDEBUG builds.
#define GC_CHECK(cond, ...)                                 \
    do {                                                    \
        if (!(cond)) ::gerbecalc::detail::fail(__VA_ARGS__); \
    } while (0)

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

}  // namespace gerbecalc
