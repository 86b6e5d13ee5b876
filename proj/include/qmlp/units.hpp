#pragma once

// Internal unit system is Hartree / Bohr throughout. Conversions here are
// only for CLI flags and report columns (meV/atom, eV/Angstrom axes).
namespace qmlp::units {

inline constexpr double kEvPerHartree = 27.211386245988;
inline constexpr double kAngstromPerBohr = 0.529177210903;

inline constexpr double ev_to_hartree(double ev) { return ev / kEvPerHartree; }
inline constexpr double hartree_to_ev(double ha) { return ha * kEvPerHartree; }
inline constexpr double mev_to_hartree(double mev) { return mev * 1e-3 / kEvPerHartree; }
inline constexpr double hartree_to_mev(double ha) { return ha * kEvPerHartree * 1e3; }
inline constexpr double angstrom_to_bohr(double a) { return a / kAngstromPerBohr; }
inline constexpr double bohr_to_angstrom(double b) { return b * kAngstromPerBohr; }

// eV/Angstrom <-> Hartree/Bohr for force noise grids
inline constexpr double ev_per_angstrom_to_au(double f) {
  return f / kEvPerHartree * kAngstromPerBohr;
}
inline constexpr double au_to_ev_per_angstrom(double f) {
  return f * kEvPerHartree / kAngstromPerBohr;
}

}  // namespace qmlp::units
