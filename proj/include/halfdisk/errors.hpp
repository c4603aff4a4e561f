#ifndef HALFDISK_ERRORS_HPP
#define HALFDISK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace halfdisk {

/// Invalid run or mesh configuration (bad grading ratio, empty free set, ...).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mesh or matrix failed a structural consistency check.
struct IntegrityError : std::runtime_error {
    explicit IntegrityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Factorization of A - sigma*B hit a (near-)singular pivot: sigma collides
/// with an eigenvalue. Carries a suggested perturbed shift.
struct ShiftCollisionError : std::runtime_error {
    ShiftCollisionError(const std::string& msg, double suggested)
        : std::runtime_error(msg), suggested_shift(suggested) {}
    double suggested_shift;
};

/// Krylov iteration exhausted its budget; carries the best residual seen.
struct ConvergenceError : std::runtime_error {
    ConvergenceError(const std::string& msg, double best)
        : std::runtime_error(msg), best_residual(best) {}
    double best_residual;
};

/// Root bracket does not change sign.
struct BracketError : std::runtime_error {
    explicit BracketError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace halfdisk

#endif
