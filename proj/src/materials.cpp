#include "sfwm/materials.hpp"

#include <cmath>
#include <sstream>

#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

void check_range(const MaterialModel& m, double lambda) {
    if (!(lambda > 0.0) || lambda < m.lambda_min || lambda > m.lambda_max) {
        std::ostringstream os;
        os << "wavelength " << lambda << " um outside validity window ["
           << m.lambda_min << ", " << m.lambda_max << "] of material '" << m.name
           << "'";
        throw OutOfRange(os.str());
    }
}

}  // namespace

MaterialModel make_constant_material(std::string name, double index,
                                     double lambda_min, double lambda_max) {
    if (!(index > 0.0)) {
        throw InvalidModel("constant material '" + name +
                           "' requires a positive index");
    }
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
        throw InvalidModel("constant material '" + name +
                           "' requires 0 < lambda_min < lambda_max");
    }
    MaterialModel m;
    m.kind = MaterialKind::constant;
    m.constant_index = index;
    m.lambda_min = lambda_min;
    m.lambda_max = lambda_max;
    m.name = std::move(name);
    return m;
}

MaterialModel make_sellmeier_material(std::string name,
                                      std::vector<SellmeierTerm> terms,
                                      double lambda_min, double lambda_max) {
    if (terms.empty()) {
        throw InvalidModel("sellmeier material '" + name +
                           "' requires at least one term");
    }
    if (!(lambda_min > 0.0) || !(lambda_max > lambda_min)) {
        throw InvalidModel("sellmeier material '" + name +
                           "' requires 0 < lambda_min < lambda_max");
    }
    MaterialModel m;
    m.kind = MaterialKind::sellmeier;
    m.terms = std::move(terms);
    m.lambda_min = lambda_min;
    m.lambda_max = lambda_max;
    m.name = std::move(name);
    return m;
}

double refractive_index(const MaterialModel& material, double wavelength_um) {
    check_range(material, wavelength_um);
    if (material.kind == MaterialKind::constant) {
        return material.constant_index;
    }
    const double ls = wavelength_um * wavelength_um;
    double n_sq = 1.0;
    for (const auto& t : material.terms) {
        const double denom = ls - t.lambda_sq;
        if (denom == 0.0) {
            std::ostringstream os;
            os << "sellmeier pole of material '" << material.name
               << "' at wavelength " << wavelength_um << " um";
            throw InvalidModel(os.str());
        }
        n_sq += t.B * ls / denom;
    }
    if (!(n_sq > 0.0)) {
        std::ostringstream os;
        os << "sellmeier fit of material '" << material.name
           << "' yields non-positive n^2 = " << n_sq << " at " << wavelength_um
           << " um";
        throw InvalidModel(os.str());
    }
    return std::sqrt(n_sq);
}

double group_index(const MaterialModel& material, double wavelength_um,
                   double fd_step_um) {
    if (material.kind == MaterialKind::constant) {
        check_range(material, wavelength_um);
        return material.constant_index;
    }
    // Stencil endpoints must themselves be evaluable.
    check_range(material, wavelength_um - fd_step_um);
    check_range(material, wavelength_um + fd_step_um);
    return group_index_fd(
        [&](double l) { return refractive_index(material, l); }, wavelength_um,
        fd_step_um);
}

double group_index_fd(const std::function<double(double)>& n_of_lambda,
                      double wavelength_um, double fd_step_um) {
    if (!(fd_step_um > 0.0)) {
        throw InvalidModel("finite-difference step must be positive");
    }
    const double n_plus = n_of_lambda(wavelength_um + fd_step_um);
    const double n_minus = n_of_lambda(wavelength_um - fd_step_um);
    const double n0 = n_of_lambda(wavelength_um);
    const double dn_dl = (n_plus - n_minus) / (2.0 * fd_step_um);
    return n0 - wavelength_um * dn_dl;
}

}  // namespace sfwm
