#pragma once

#include <cmath>

// Unit convention used throughout: lengths in um, propagation constants in
// rad/um, angular frequencies in rad/fs, group slopes dbeta/domega in fs/um.

namespace sfwm {

inline constexpr double speed_of_light = 0.299792458;  // um/fs
inline constexpr double pi = 3.14159265358979323846;

inline double omega_from_wavelength(double lambda_um) {
    return 2.0 * pi * speed_of_light / lambda_um;
}

inline double wavelength_from_omega(double omega_radfs) {
    return 2.0 * pi * speed_of_light / omega_radfs;
}

}  // namespace sfwm
