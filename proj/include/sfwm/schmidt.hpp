#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sfwm/jsa.hpp"

namespace sfwm {

struct SchmidtOptions {
    // Coefficients below truncation * leading are dropped before the purity
    // sum; they sit at the SVD noise floor.
    double truncation = 1e-12;
    // Mode pairs kept in the sampled outputs.
    int max_modes = 8;
};

struct SchmidtResult {
    std::vector<double> coefficients;  // q_k >= 0 descending, sum q^2 = 1
    double purity = 0.0;               // sum q_k^4
    double schmidt_number = 0.0;       // 1 / purity
    // Column k samples the k-th mode on the grid axis; orthonormal under the
    // weighted inner product sum_j conj(u_j) v_j step.
    Eigen::MatrixXcd signal_modes;
    Eigen::MatrixXcd idler_modes;
};

// SVD of the amplitude scaled by sqrt(step_s step_i), coefficients
// renormalized to sum q^2 = 1. The decomposition satisfies
// f(w_s, w_i) = sum_k q_k signal_k(w_s) idler_k(w_i) on the grid.
// Requires a normalized JSA on a grid of at least 16x16.
SchmidtResult schmidt_decompose(const JsaGrid& jsa,
                                const SchmidtOptions& options = {});

// Spectral densities of each photon with the partner traced out; each
// integrates to 1 over its axis.
struct HeraldedMarginals {
    Eigen::VectorXd signal;
    Eigen::VectorXd idler;
};

HeraldedMarginals heralded_marginals(const JsaGrid& jsa);

}  // namespace sfwm
