#pragma once

// Fundamental Lamb modes of an isotropic thin plate and frequency-domain
// propagation of an excitation over a distance.

#include <string_view>

#include "lambmp/core.hpp"

namespace lambmp {

struct PlateModel {
    double E = 70e9;      ///< Young's modulus (Pa)
    double nu = 0.3;      ///< Poisson ratio
    double rho = 1500.0;  ///< density (kg/m^3)
    double h = 2e-3;      ///< thickness (m)

    double G() const noexcept { return E / (2.0 * (1.0 + nu)); }
    double Q() const noexcept { return E / (1.0 - nu * nu); }
    double xi() const noexcept;
    double I() const noexcept { return h * h * h / 12.0; }

    /// Nondispersive S0 speed sqrt(Q / rho).
    double s0_speed() const noexcept;
    void validate() const;
};

enum class LambMode { S0, A0 };

/// Innermost A0 term. Mindlin: rho h / (pi^2 f^2 I Q), the low-frequency
/// flexural term of the Mindlin plate dispersion relation. AsPrinted:
/// (rho + rho / (I Q)) / (pi f^2), as the formula is commonly printed. The
/// printed form is dimensionally inconsistent and puts A0 near 100 m/s at
/// 100 kHz for a 2 mm plate.
enum class A0Form { Mindlin, AsPrinted };

A0Form parse_a0_form(std::string_view name);
std::string_view to_string(A0Form form) noexcept;

struct ModeSet {
    bool s0 = true;
    bool a0 = true;

    static ModeSet parse(std::string_view list);  ///< "s0", "a0", "s0,a0"
    void validate() const;
};

/// 2 pi f sqrt(rho / Q).
double k_s0(double f_hz, const PlateModel& plate);

/// A0 wavenumber (rad/m). Throws NumericalError when a radicand is negative.
double k_a0(double f_hz, const PlateModel& plate, A0Form form = A0Form::Mindlin);

double wavenumber(LambMode mode, double f_hz, const PlateModel& plate, A0Form form = A0Form::Mindlin);

struct Velocities {
    double c_phase;
    double c_group;
};

/// Phase velocity 2 pi f / k and group velocity 2 pi df/dk by central
/// difference with relative step `rel_step`.
Velocities velocities(double f_hz, const PlateModel& plate, LambMode mode, A0Form form = A0Form::Mindlin,
                      double rel_step = 1e-4);

struct PropagateOptions {
    /// Output length in samples; 0 picks the shortest window holding the slowest packet.
    std::size_t out_len = 0;
    A0Form a0_form = A0Form::Mindlin;
};

/// Samples needed for the slowest enabled mode to arrive at distance d and
/// ring for the excitation's duration, measured at the excitation's spectral peak.
std::size_t required_length(const Signal& x, double d_m, const PlateModel& plate, const ModeSet& modes,
                            A0Form form = A0Form::Mindlin);

/// Sum over enabled modes of x_hat(f) exp(-i k(f) d), equal modal amplitudes,
/// inverse transformed and truncated to out_len. DC and Nyquist bins pass
/// through each mode unchanged. Throws WindowError when out_len is shorter
/// than required_length.
Signal propagate(const Signal& x, double d_m, const PlateModel& plate, const ModeSet& modes,
                 const PropagateOptions& options = {});

/// Frequency of the largest DFT magnitude (excluding DC).
double spectral_peak_hz(const Signal& x);

}  // namespace lambmp
