#pragma once

// Physical constants (CODATA 2018) and the derived unit-conversion
// prefactors used throughout the library.  All magnetic-resonance
// constants are stored as positive magnitudes; signs enter through
// level ordering, not through the constants.

namespace spindec::constants {

// --- SI base values ---------------------------------------------------------
inline constexpr double hbar_J_s = 1.054571817e-34;
inline constexpr double h_J_s = 6.62607015e-34;
inline constexpr double k_B_J_per_K = 1.380649e-23;
inline constexpr double mu0_T2_m3_per_J = 1.25663706212e-6;
inline constexpr double mu_B_J_per_T = 9.2740100783e-24;
inline constexpr double mu_N_J_per_T = 5.0507837461e-27;
inline constexpr double g_e = 2.00231930436256;
inline constexpr double g_n_13c = 1.404824;
inline constexpr double amu_kg = 1.66053906660e-27;
inline constexpr double pi = 3.14159265358979323846;

// --- gyromagnetic ratios (frequency per field) ------------------------------
// electron: g_e mu_B / h, expressed in MHz per gauss
inline constexpr double gamma_e_MHz_per_G = g_e * mu_B_J_per_T / h_J_s * 1e-10;
// 13C nucleus: g_n mu_N / h, expressed in kHz per gauss
inline constexpr double gamma_n_kHz_per_G = g_n_13c * mu_N_J_per_T / h_J_s * 1e-7;

// --- dipole-dipole prefactors ------------------------------------------------
// electron-electron: mu0 g_e^2 mu_B^2 / (4 pi h), in GHz * Angstrom^3
inline constexpr double zfs_dipole_GHz_A3 =
    mu0_T2_m3_per_J * g_e * g_e * mu_B_J_per_T * mu_B_J_per_T /
    (4.0 * pi * h_J_s) * 1e21;
// electron-nucleus (13C): mu0 g_e mu_B g_n mu_N / (4 pi h), in MHz * Angstrom^3
// (Hz * m^3 --> MHz * Angstrom^3 is 1e-6 * 1e30 = 1e24)
inline constexpr double hfi_dipole_MHz_A3 =
    mu0_T2_m3_per_J * g_e * mu_B_J_per_T * g_n_13c * mu_N_J_per_T /
    (4.0 * pi * h_J_s) * 1e24;

// --- mixed-unit helpers -------------------------------------------------------
// hbar expressed in amu * Angstrom^2 / s (for mode variances in amu*A^2)
inline constexpr double hbar_amu_A2_per_s = hbar_J_s / amu_kg * 1e20;
// h/k_B in units of K / THz: hf/kT = (f_THz / T_K) * this
inline constexpr double h_over_kB_K_per_THz = h_J_s / k_B_J_per_K * 1e12;

inline constexpr double two_pi = 2.0 * pi;

}  // namespace spindec::constants
