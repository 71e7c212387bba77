#pragma once

#include <stdexcept>
#include <string>

namespace teqsci {

// Register cap for the statevector backend.
inline constexpr int kMaxQubits = 24;

// CODATA hartree -> eV.
inline constexpr double kHartreeToEv = 27.211386245988;

inline void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

}  // namespace teqsci
