#pragma once

#include <Eigen/Core>

#include "anneal/graph.hpp"

namespace anneal {

// Interpolating Hamiltonian H(s) = s*H_cost + (1-s)*H_driver with
// H_cost = sum_e J_e sz_i sz_j and H_driver = -h * sum_i sx_i. The driver sign
// is an internal gauge choice: it makes every elementary matrix element of
// G(s) = c(s) - H(s) nonnegative while leaving all sz-diagonal observables
// unchanged.
struct ModelSpec {
    CouplingGraph graph;
    double field = 1.0;              // h > 0
    int dimension = 0;               // 0 when only N is defined (random graphs)
    int upper_critical_dimension = 0; // reporting metadata only

    int n_sites() const { return graph.n; }
};

ModelSpec make_model(CouplingGraph graph, double field = 1.0);

// Elementary operators of G(s) = c(s) - H(s), all with nonnegative weight:
//   per edge e:  diagonal bond operator, weight 2*s*|J_e| when the spin pair
//                matches the coupling sign (antiparallel for J_e > 0,
//                parallel for J_e < 0), zero otherwise;
//   per site i:  a constant operator and a spin-flip operator, both of
//                weight (1-s)*h.
// c(s) = s*sum_e|J_e| + (1-s)*h*N.
struct OperatorTable {
    int n_sites = 0;
    int n_edges = 0;
    double field = 1.0;
    double coupling_abs_sum = 0.0;
    double max_abs_coupling = 0.0;
    Eigen::ArrayXd abs_coupling;            // |J_e|
    // sigma_i*sigma_j value at which bond e has nonzero weight: -1 (AF), +1 (FM)
    std::vector<std::int8_t> satisfied_sign;

    double shift(double s) const {
        return s * coupling_abs_sum + (1.0 - s) * field * n_sites;
    }
    double bond_weight(double s, int e) const { return 2.0 * s * abs_coupling[e]; }
    double site_weight(double s) const { return (1.0 - s) * field; }
    bool bond_active(int e, std::int8_t si, std::int8_t sj) const {
        return si * sj == satisfied_sign[e];
    }
};

OperatorTable build_elementary_decomposition(const ModelSpec& model);

}  // namespace anneal
