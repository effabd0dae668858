#pragma once

// Physical constants (CODATA 2022) and apparatus defaults for a single
// trapped 111Cd+ ion in a linear rf trap.

namespace catsim::constants {

// Reduced Planck constant, J s. Exact since the 2019 SI redefinition.
inline constexpr double kHBar = 1.0545718176461565e-34;

// Atomic mass unit, kg.
inline constexpr double kAtomicMassKg = 1.66053906892e-27;

// Electron mass, u.
inline constexpr double kElectronMassU = 5.485799090441e-4;

// 111Cd neutral atomic mass, u (AME).
inline constexpr double kCd111AtomMassU = 110.90418287;

// Singly ionized 111Cd+ mass.
inline constexpr double kCd111IonMassU = kCd111AtomMassU - kElectronMassU;
inline constexpr double kCd111IonMassKg = kCd111IonMassU * kAtomicMassKg;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Apparatus defaults.
inline constexpr double kDefaultAxialFreq = kTwoPi * 3.55e6;     // rad/s
inline constexpr double kHyperfineSplitting = kTwoPi * 14.53e9;  // rad/s
inline constexpr double kDopplerNbar = 6.0;          // Doppler-cooled
inline constexpr double kSidebandCooledNbar = 0.05;  // after sideband cooling
inline constexpr double kMeasuredHeatingRate = 200.0;  // quanta/s (0.2 /ms)

// Documentation-only constants: not used by any computation here, kept for
// reference alongside the trap parameters above.
inline constexpr double kTransverseFreqX = kTwoPi * 8.0e6;    // rad/s
inline constexpr double kTransverseFreqY = kTwoPi * 9.0e6;    // rad/s
inline constexpr double kRamanDetuning = kTwoPi * 220.0e9;    // rad/s
inline constexpr double kCyclingLinewidth = kTwoPi * 47.0e6;  // rad/s

}  // namespace catsim::constants
