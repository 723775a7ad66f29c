#include "sfwm/schmidt.hpp"

#include <cmath>

#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

void validate_grid(const JsaGrid& jsa) {
    if (!jsa.normalized) {
        throw InvalidModel("jsa must be normalized before decomposition");
    }
    if (jsa.signal_axis.size() != jsa.amplitude.rows() ||
        jsa.idler_axis.size() != jsa.amplitude.cols()) {
        throw InvalidModel("axis lengths must match the amplitude matrix");
    }
}

}  // namespace

SchmidtResult schmidt_decompose(const JsaGrid& jsa,
                                const SchmidtOptions& options) {
    validate_grid(jsa);
    if (jsa.amplitude.rows() < 16 || jsa.amplitude.cols() < 16) {
        throw InvalidModel("schmidt decomposition needs at least a 16x16 grid");
    }
    if (!(options.truncation >= 0.0) || options.max_modes < 1) {
        throw InvalidModel("truncation must be >= 0 and max_modes >= 1");
    }
    const double step_s = axis_step(jsa.signal_axis);
    const double step_i = axis_step(jsa.idler_axis);

    const Eigen::MatrixXcd scaled =
        jsa.amplitude * std::sqrt(step_s * step_i);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(
        scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw NumericalFailure("svd of the joint amplitude failed");
    }
    const Eigen::VectorXd& sigma = svd.singularValues();  // descending
    if (!(sigma[0] > 0.0)) {
        throw NumericalFailure("joint amplitude is identically zero");
    }

    Eigen::Index kept = sigma.size();
    while (kept > 1 && sigma[kept - 1] < options.truncation * sigma[0]) {
        --kept;
    }

    SchmidtResult res;
    res.coefficients.resize(static_cast<std::size_t>(kept));
    double sum_sq = 0.0;
    for (Eigen::Index k = 0; k < kept; ++k) sum_sq += sigma[k] * sigma[k];
    const double scale = 1.0 / std::sqrt(sum_sq);
    for (Eigen::Index k = 0; k < kept; ++k) {
        res.coefficients[static_cast<std::size_t>(k)] = sigma[k] * scale;
    }
    double purity = 0.0;
    for (double q : res.coefficients) purity += q * q * q * q;
    res.purity = purity;
    res.schmidt_number = 1.0 / purity;

    const Eigen::Index n_modes =
        std::min<Eigen::Index>(kept, options.max_modes);
    // f = sum_k q_k u_k(w_s) conj(v_k)(w_i); dividing by sqrt(step) turns the
    // unitary columns into functions orthonormal under the weighted product.
    res.signal_modes = svd.matrixU().leftCols(n_modes) / std::sqrt(step_s);
    res.idler_modes =
        svd.matrixV().leftCols(n_modes).conjugate() / std::sqrt(step_i);
    return res;
}

HeraldedMarginals heralded_marginals(const JsaGrid& jsa) {
    validate_grid(jsa);
    const double step_s = axis_step(jsa.signal_axis);
    const double step_i = axis_step(jsa.idler_axis);

    HeraldedMarginals m;
    m.signal = jsa.amplitude.cwiseAbs2().rowwise().sum() * step_i;
    m.idler = jsa.amplitude.cwiseAbs2().colwise().sum().transpose() * step_s;
    return m;
}

}  // namespace sfwm
