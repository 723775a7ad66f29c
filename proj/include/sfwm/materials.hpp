#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace sfwm {

enum class MaterialKind { constant, sellmeier };

struct SellmeierTerm {
    double B = 0.0;        // dimensionless oscillator strength
    double lambda_sq = 0.0;  // resonance wavelength squared, um^2
};

struct MaterialModel {
    MaterialKind kind = MaterialKind::constant;
    double constant_index = 1.0;          // used iff kind == constant
    std::vector<SellmeierTerm> terms;     // used iff kind == sellmeier
    double lambda_min = 0.0;              // um, inclusive validity bound
    double lambda_max = 0.0;              // um
    std::string name;
};

MaterialModel make_constant_material(std::string name, double index,
                                     double lambda_min, double lambda_max);
MaterialModel make_sellmeier_material(std::string name,
                                      std::vector<SellmeierTerm> terms,
                                      double lambda_min, double lambda_max);

// n(lambda). Throws OutOfRange outside [lambda_min, lambda_max]; throws
// InvalidModel on a Sellmeier pole or non-positive n^2.
double refractive_index(const MaterialModel& material, double wavelength_um);

// n_g = n - lambda dn/dlambda with a central finite difference. The stencil
// must fit strictly inside the validity window.
double group_index(const MaterialModel& material, double wavelength_um,
                   double fd_step_um = 1e-4);

// Same formula for an arbitrary index profile n(lambda).
double group_index_fd(const std::function<double(double)>& n_of_lambda,
                      double wavelength_um, double fd_step_um = 1e-4);

}  // namespace sfwm
