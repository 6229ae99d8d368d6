#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wprelay {

/// Thrown when a caller passes values outside an operation's domain.
class invalid_input : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical procedure cannot continue (singular system,
/// coefficient overflow, ...).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

inline double watt_to_dbm(double watt) {
    if (watt <= 0.0) throw invalid_input("watt_to_dbm: power must be > 0");
    return 10.0 * std::log10(watt * 1e3);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Overflow-safe logistic function, exact at both tails.
inline double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

inline double nats_to_bits(double nats) { return nats / std::log(2.0); }

}  // namespace wprelay
