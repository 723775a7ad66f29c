#include "sfwm/array.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sfwm/constants.hpp"
#include "sfwm/errors.hpp"

namespace sfwm {

namespace {

void validate_spec(const ArraySpec& spec) {
    if (spec.n_guides < 1) {
        throw InvalidModel("array needs at least one guide");
    }
    if (!(spec.length > 0.0)) {
        throw InvalidModel("array length must be positive");
    }
    if (static_cast<int>(spec.bond_couplings.size()) != spec.n_guides - 1) {
        std::ostringstream os;
        os << "expected " << spec.n_guides - 1 << " bond couplings, got "
           << spec.bond_couplings.size();
        throw InvalidModel(os.str());
    }
    for (double c : spec.bond_couplings) {
        if (!(c >= 0.0)) throw InvalidModel("bond couplings must be >= 0");
    }
    if (spec.excitation.size() != spec.n_guides) {
        throw InvalidModel("excitation vector length must equal n_guides");
    }
    if (spec.excitation.norm() == 0.0) {
        throw InvalidModel("excitation must not be identically zero");
    }
}

void validate_z_grid(const ArraySpec& spec, const std::vector<double>& z) {
    if (z.empty() || z.front() != 0.0 || z.back() != spec.length ||
        !std::is_sorted(z.begin(), z.end())) {
        throw InvalidModel("z grid must be sorted, start at 0, end at length");
    }
}

Eigen::MatrixXd coupling_matrix(const ArraySpec& spec) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(spec.n_guides, spec.n_guides);
    for (int j = 0; j + 1 < spec.n_guides; ++j) {
        m(j, j + 1) = spec.bond_couplings[j];
        m(j + 1, j) = spec.bond_couplings[j];
    }
    return m;
}

bool is_uniform(const ArraySpec& spec) {
    if (spec.bond_couplings.empty()) return true;
    const double c0 = spec.bond_couplings.front();
    return std::all_of(spec.bond_couplings.begin(), spec.bond_couplings.end(),
                       [&](double c) { return c == c0; });
}

// The numeric eigensolver must reproduce the analytic chain spectrum; a
// mismatch means the decomposition cannot be trusted for evolution either.
void check_uniform_closed_forms(const ArraySpec& spec,
                                const Eigen::VectorXd& evals,
                                const Eigen::MatrixXd& evecs) {
    const double c = spec.bond_couplings.empty() ? 0.0
                                                 : spec.bond_couplings.front();
    if (c <= 0.0) return;  // degenerate spectrum, eigenbasis not unique
    const int n = spec.n_guides;
    std::vector<double> closed(n);
    for (int k = 0; k < n; ++k) {
        closed[k] = uniform_chain_eigenvalue(n, c, k);
    }
    std::sort(closed.begin(), closed.end());  // evals come out ascending
    for (int k = 0; k < n; ++k) {
        if (std::abs(evals[k] - closed[k]) > 1e-10 * c) {
            throw NumericalFailure(
                "uniform-chain eigenvalues disagree with the closed form");
        }
    }
    for (int k = 0; k < n; ++k) {
        // Closed-form index ordered by descending eigenvalue; evals ascend.
        Eigen::VectorXd expected = uniform_chain_eigenvector(n, n - 1 - k);
        Eigen::VectorXd got = evecs.col(k);
        // Sign of a numeric eigenvector is arbitrary.
        int pivot = 0;
        while (pivot < n && std::abs(expected[pivot]) < 1e-12) ++pivot;
        if (pivot < n && expected[pivot] * got[pivot] < 0.0) got = -got;
        if ((got - expected).cwiseAbs().maxCoeff() > 1e-10) {
            throw NumericalFailure(
                "uniform-chain eigenvectors disagree with the closed form");
        }
    }
}

struct ChainEigen {
    Eigen::VectorXd evals;
    Eigen::MatrixXd evecs;
};

ChainEigen decompose(const ArraySpec& spec) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coupling_matrix(spec));
    if (es.info() != Eigen::Success) {
        throw NumericalFailure("eigendecomposition of coupling matrix failed");
    }
    ChainEigen chain{es.eigenvalues(), es.eigenvectors()};
    if (is_uniform(spec)) {
        check_uniform_closed_forms(spec, chain.evals, chain.evecs);
    }
    return chain;
}

}  // namespace

ArraySpec make_uniform_array(int n_guides, double coupling, double length,
                             const Eigen::VectorXcd& excitation) {
    ArraySpec spec;
    spec.n_guides = n_guides;
    if (n_guides > 0) {
        spec.bond_couplings.assign(static_cast<std::size_t>(n_guides - 1),
                                   coupling);
    }
    spec.length = length;
    spec.excitation = excitation;
    validate_spec(spec);
    return spec;
}

std::vector<double> make_z_grid(double length, int n_samples) {
    if (!(length > 0.0) || n_samples < 2) {
        throw InvalidModel("z grid needs positive length and >= 2 samples");
    }
    std::vector<double> z(static_cast<std::size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        z[static_cast<std::size_t>(i)] =
            length * static_cast<double>(i) / (n_samples - 1);
    }
    z.back() = length;
    return z;
}

double uniform_chain_eigenvalue(int n_guides, double coupling, int k) {
    if (k < 0 || k >= n_guides) throw IndexOutOfRange("eigenvalue index");
    return 2.0 * coupling * std::cos((k + 1) * pi / (n_guides + 1));
}

Eigen::VectorXd uniform_chain_eigenvector(int n_guides, int k) {
    if (k < 0 || k >= n_guides) throw IndexOutOfRange("eigenvector index");
    Eigen::VectorXd v(n_guides);
    const double norm = std::sqrt(2.0 / (n_guides + 1));
    for (int n = 0; n < n_guides; ++n) {
        v[n] = norm * std::sin((n + 1.0) * (k + 1.0) * pi / (n_guides + 1));
    }
    return v;
}

AmplitudeEnvelope propagate(const ArraySpec& spec,
                            const std::vector<double>& z_grid,
                            const ExecPolicy& policy) {
    validate_spec(spec);
    validate_z_grid(spec, z_grid);

    const int n = spec.n_guides;
    const auto nz = static_cast<std::int64_t>(z_grid.size());

    const ChainEigen chain = decompose(spec);
    const Eigen::VectorXd& evals = chain.evals;
    const Eigen::MatrixXd& evecs = chain.evecs;

    const Eigen::VectorXcd coeffs = evecs.transpose() * spec.excitation;

    AmplitudeEnvelope env;
    env.z_grid = z_grid;
    env.amplitudes.resize(n, nz);
    env.total_power.resize(static_cast<std::size_t>(nz));

    parallel_for(nz, policy, [&](std::int64_t i) {
        const double z = z_grid[static_cast<std::size_t>(i)];
        if (z == 0.0) {
            // The z=0 column must equal the excitation exactly, not merely up
            // to the roundoff of a V V^T round trip.
            env.amplitudes.col(i) = spec.excitation;
        } else {
            Eigen::VectorXcd phased(n);
            for (int k = 0; k < n; ++k) {
                phased[k] = coeffs[k] * std::polar(1.0, evals[k] * z);
            }
            env.amplitudes.col(i) = evecs * phased;
        }
        env.total_power[static_cast<std::size_t>(i)] =
            env.amplitudes.col(i).squaredNorm();
    });
    return env;
}

std::vector<std::complex<double>> envelope_of_guide(
    const AmplitudeEnvelope& envelope, int guide_index) {
    if (guide_index < 0 || guide_index >= envelope.amplitudes.rows()) {
        std::ostringstream os;
        os << "guide index " << guide_index << " outside [0, "
           << envelope.amplitudes.rows() << ")";
        throw IndexOutOfRange(os.str());
    }
    std::vector<std::complex<double>> out(
        static_cast<std::size_t>(envelope.amplitudes.cols()));
    for (Eigen::Index i = 0; i < envelope.amplitudes.cols(); ++i) {
        out[static_cast<std::size_t>(i)] = envelope.amplitudes(guide_index, i);
    }
    return out;
}

std::vector<EnvelopeTerm> envelope_eigen_terms(const ArraySpec& spec,
                                               int guide_index) {
    validate_spec(spec);
    if (guide_index < 0 || guide_index >= spec.n_guides) {
        std::ostringstream os;
        os << "guide index " << guide_index << " outside [0, " << spec.n_guides
           << ")";
        throw IndexOutOfRange(os.str());
    }
    const ChainEigen chain = decompose(spec);
    const Eigen::VectorXcd coeffs = chain.evecs.transpose() * spec.excitation;
    std::vector<EnvelopeTerm> terms(static_cast<std::size_t>(spec.n_guides));
    for (int k = 0; k < spec.n_guides; ++k) {
        terms[static_cast<std::size_t>(k)] = {
            chain.evals[k], coeffs[k] * chain.evecs(guide_index, k)};
    }
    return terms;
}

AmplitudeEnvelope propagate_rk4_oracle(const ArraySpec& spec,
                                       const std::vector<double>& z_grid,
                                       double step_um) {
    validate_spec(spec);
    validate_z_grid(spec, z_grid);
    if (!(step_um > 0.0)) throw InvalidModel("step must be positive");
    const double max_c =
        spec.bond_couplings.empty()
            ? 0.0
            : *std::max_element(spec.bond_couplings.begin(),
                                spec.bond_couplings.end());
    if (max_c > 0.0 && step_um > 0.01 / max_c) {
        std::ostringstream os;
        os << "step " << step_um << " um exceeds 0.01 / max coupling = "
           << 0.01 / max_c << " um";
        throw StepTooLarge(os.str());
    }

    const Eigen::MatrixXd m = coupling_matrix(spec);
    const std::complex<double> iu(0.0, 1.0);
    auto rhs = [&](const Eigen::VectorXcd& a) -> Eigen::VectorXcd {
        return iu * (m * a);
    };

    AmplitudeEnvelope env;
    env.z_grid = z_grid;
    env.amplitudes.resize(spec.n_guides,
                          static_cast<Eigen::Index>(z_grid.size()));
    env.total_power.resize(z_grid.size());

    Eigen::VectorXcd a = spec.excitation;
    double z = 0.0;
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        const double target = z_grid[i];
        const double span = target - z;
        if (span > 0.0) {
            const int steps = std::max(
                1, static_cast<int>(std::ceil(span / step_um)));
            const double h = span / steps;
            for (int s = 0; s < steps; ++s) {
                const Eigen::VectorXcd k1 = rhs(a);
                const Eigen::VectorXcd k2 = rhs(a + 0.5 * h * k1);
                const Eigen::VectorXcd k3 = rhs(a + 0.5 * h * k2);
                const Eigen::VectorXcd k4 = rhs(a + h * k3);
                a += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            z = target;
        }
        env.amplitudes.col(static_cast<Eigen::Index>(i)) = a;
        env.total_power[i] = a.squaredNorm();
    }
    return env;
}

}  // namespace sfwm
