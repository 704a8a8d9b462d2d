#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "anneal/model.hpp"
#include "anneal/schedule.hpp"

namespace anneal::oracle {

// Dense reference calculations for small systems: the sampled operator
// product evaluated exactly, equilibrium expectation values, and spectral
// gaps. Basis convention: basis index z has bit i set when spin i points
// down, i.e. sigma_i(z) = 1 - 2*((z >> i) & 1).
inline constexpr int max_sites_quantum = 14;
inline constexpr int max_sites_classical = 20;

enum class Observable { q2, q4, mz2, energy };

// Matrix-free application of G(s) = c(s) - H(s); caches per-graph tables.
class Propagator {
public:
    explicit Propagator(const ModelSpec& model);

    int n_sites() const { return n_; }
    long dim() const { return 1L << n_; }
    const ModelSpec& model() const { return model_; }
    const OperatorTable& table() const { return table_; }

    // out = G(s) * in; out must not alias in.
    void apply(double s, const Eigen::VectorXd& in, Eigen::VectorXd& out) const;

    // classical cost-function value per basis state
    const Eigen::VectorXd& classical_energies() const { return diag_; }

private:
    ModelSpec model_;
    OperatorTable table_;
    int n_ = 0;
    Eigen::VectorXd diag_;  // E0(z)
};

struct WeightedEnsemble {
    Eigen::VectorXd weight;  // unnormalized, nonnegative
    int n_sites = 0;

    double evaluate(Observable obs, const Eigen::VectorXd& energies = {}) const;
    // two-point sz correlation matrix C_ij = <s_i s_j>
    Eigen::MatrixXd correlations() const;
};

struct AsymmetricPoint {
    int tau = 0;
    double s = 0.0;
    double q2 = 0.0;
    double q4 = 0.0;
    double mz2 = 0.0;
};

// Exact asymmetric expectation values along the palindromic 2m string for
// every tau in the protocol grid. Two-replica moments (q2, q4) combine the
// single-replica ensemble with itself since replicas are independent.
// q4 costs O(4^n) pair sums and is skipped (set to NaN) above n = 13.
std::vector<AsymmetricPoint> exact_asymmetric_expectations(const ModelSpec& model,
                                                           const QuenchProtocol& protocol);

// Single value, spec-style entry point. Throws std::out_of_range for tau
// outside [0, m].
double exact_asymmetric_expectation(const ModelSpec& model, const QuenchProtocol& protocol,
                                    Observable obs, int tau);

// Probability of each basis state for the propagated configuration between
// slots p and p+1 of the 2m string, p in 0..2m.
Eigen::VectorXd exact_state_distribution(const ModelSpec& model, const QuenchProtocol& protocol,
                                         int position);

// Exact probability that string slot p in 1..2m holds each elementary
// operator: entries 0..E-1 bonds, E..E+N-1 site constants, E+N..E+2N-1 flips.
Eigen::VectorXd exact_slot_type_distribution(const ModelSpec& model,
                                             const QuenchProtocol& protocol, int slot);

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXd amplitudes;
};

// Lowest eigenpair of H(s) via Lanczos on G(s) (matrix-free).
GroundState exact_ground_state(const ModelSpec& model, double s);

// Ground-state expectation value (quantum).
double exact_equilibrium(const ModelSpec& model, double s, Observable obs);

// Boltzmann average by enumeration, n <= max_sites_classical.
double exact_equilibrium_classical(const CouplingGraph& graph, double temperature,
                                   Observable obs);

// Mean energy of the periodic ferromagnetic chain by transfer matrix.
double chain_energy_transfer_matrix(int n, double temperature);

struct GapPoint {
    double s = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;              // next eigenvalue (possibly degenerate copy)
    double gap = 0.0;             // e1 - e0
    bool degenerate = false;      // gap below degeneracy tolerance
    double gap_above_degenerate = 0.0;  // to the first distinct level
};

struct GapResult {
    std::vector<GapPoint> points;
    double min_gap = 0.0;
    double argmin_s = 0.0;
};

GapResult exact_gap(const ModelSpec& model, std::span<const double> s_grid,
                    double degeneracy_tol = 1e-8);

}  // namespace anneal::oracle
