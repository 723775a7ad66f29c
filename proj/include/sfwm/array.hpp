#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "sfwm/parallel.hpp"

namespace sfwm {

// Nearest-neighbour coupled array: -i dA/dz = M A with M real symmetric
// tridiagonal and zero diagonal, so the evolution operator is e^{+iMz}.
struct ArraySpec {
    int n_guides = 1;
    std::vector<double> bond_couplings;  // rad/um, size n_guides-1
    double length = 0.0;                 // um
    Eigen::VectorXcd excitation;         // size n_guides, not identically zero
};

ArraySpec make_uniform_array(int n_guides, double coupling, double length,
                             const Eigen::VectorXcd& excitation);

struct AmplitudeEnvelope {
    std::vector<double> z_grid;     // um
    Eigen::MatrixXcd amplitudes;    // n_guides x n_z
    std::vector<double> total_power;  // per z sample
};

// n_samples points from 0 to length inclusive.
std::vector<double> make_z_grid(double length, int n_samples = 2048);

// Uniform-chain closed forms (0-based k and n):
//   lambda_k = 2C cos((k+1) pi / (N+1))
//   nu_k[n]  = sqrt(2/(N+1)) sin((n+1)(k+1) pi / (N+1))
double uniform_chain_eigenvalue(int n_guides, double coupling, int k);
Eigen::VectorXd uniform_chain_eigenvector(int n_guides, int k);

// Spectral solution via eigen-decomposition; exactly unitary up to roundoff.
// Uniform specs are cross-checked against the closed forms on every call.
AmplitudeEnvelope propagate(const ArraySpec& spec,
                            const std::vector<double>& z_grid,
                            const ExecPolicy& policy = {});

// Single-guide complex amplitude A_n(z); the apodization profile that the
// z-dependent nonlinearity is proportional to.
std::vector<std::complex<double>> envelope_of_guide(
    const AmplitudeEnvelope& envelope, int guide_index);

// One term of A_n(z) = sum_k amp_k e^{i lambda_k z}.
struct EnvelopeTerm {
    double lambda = 0.0;               // rad/um
    std::complex<double> amp{0.0, 0.0};
};

// Eigen-expansion of the amplitude in one guide, amp_k = (nu_k . excitation)
// nu_k[guide]; feeds the closed-form phasematching integral.
std::vector<EnvelopeTerm> envelope_eigen_terms(const ArraySpec& spec,
                                               int guide_index);

// Direct fourth-order integration; exists solely for cross-validation.
AmplitudeEnvelope propagate_rk4_oracle(const ArraySpec& spec,
                                       const std::vector<double>& z_grid,
                                       double step_um);

}  // namespace sfwm
