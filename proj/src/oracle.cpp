#include "anneal/oracle.hpp"

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace anneal::oracle {

namespace {

int popcount64(std::uint64_t x) { return std::popcount(x); }

double spin_of(long z, int i) { return ((z >> i) & 1) ? -1.0 : 1.0; }

void check_quantum_cap(int n) {
    if (n > max_sites_quantum)
        throw std::out_of_range("oracle: quantum size cap is n <= 14");
}

}  // namespace

Propagator::Propagator(const ModelSpec& model)
    : model_(model), table_(build_elementary_decomposition(model)), n_(model.graph.n) {
    check_quantum_cap(n_);
    const long d = dim();
    diag_.resize(d);
    for (long z = 0; z < d; ++z) {
        double e = 0.0;
        for (const Edge& edge : model_.graph.edges)
            e += edge.coupling * spin_of(z, edge.i) * spin_of(z, edge.j);
        diag_[z] = e;
    }
}

void Propagator::apply(double s, const Eigen::VectorXd& in, Eigen::VectorXd& out) const {
    const double c = table_.shift(s);
    const double site = table_.site_weight(s);
    out = (c - s * diag_.array()).matrix().cwiseProduct(in);
    if (site != 0.0) {
        const long d = dim();
        for (int i = 0; i < n_; ++i) {
            const long bit = 1L << i;
            for (long z = 0; z < d; ++z) out[z] += site * in[z ^ bit];
        }
    }
}

double WeightedEnsemble::evaluate(Observable obs, const Eigen::VectorXd& energies) const {
    const long d = weight.size();
    const double total = weight.sum();
    if (!(total > 0.0)) throw std::runtime_error("oracle: ensemble weight vanished");
    const int n = n_sites;
    switch (obs) {
        case Observable::mz2: {
            double acc = 0.0;
            for (long z = 0; z < d; ++z) {
                double m = (n - 2.0 * popcount64(static_cast<std::uint64_t>(z))) / n;
                acc += weight[z] * m * m;
            }
            return acc / total;
        }
        case Observable::energy: {
            if (energies.size() != d) throw std::invalid_argument("oracle: energies required");
            return weight.dot(energies) / total;
        }
        case Observable::q2:
        case Observable::q4: {
            // two independent replicas drawn from the same ensemble:
            // overlap of z and z' is (n - 2*popcount(z xor z'))/n
            if (n > 13) return std::numeric_limits<double>::quiet_NaN();
            const int k = obs == Observable::q2 ? 2 : 4;
            double acc = 0.0;
            for (long z = 0; z < d; ++z) {
                if (weight[z] == 0.0) continue;
                for (long zp = 0; zp < d; ++zp) {
                    double q = (n - 2.0 * popcount64(static_cast<std::uint64_t>(z ^ zp))) / n;
                    double qk = q * q;
                    if (k == 4) qk *= qk;
                    acc += weight[z] * weight[zp] * qk;
                }
            }
            return acc / (total * total);
        }
    }
    return 0.0;
}

Eigen::MatrixXd WeightedEnsemble::correlations() const {
    const long d = weight.size();
    const double total = weight.sum();
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n_sites, n_sites);
    for (long z = 0; z < d; ++z) {
        if (weight[z] == 0.0) continue;
        for (int i = 0; i < n_sites; ++i) {
            const double si = spin_of(z, i);
            for (int j = i; j < n_sites; ++j)
                c(i, j) += weight[z] * si * spin_of(z, j);
        }
    }
    c /= total;
    return c.selfadjointView<Eigen::Upper>();
}

namespace {

// Forward vectors F_p = O_p ... O_1 |Psi0> of the palindromic 2m string,
// renormalized per step, stored at the requested positions.
std::unordered_map<int, Eigen::VectorXd> forward_vectors(const Propagator& prop,
                                                         const QuenchProtocol& protocol,
                                                         const std::vector<int>& positions) {
    const long d = prop.dim();
    const int two_m = 2 * protocol.m;
    std::unordered_map<int, Eigen::VectorXd> stored;
    Eigen::VectorXd f = Eigen::VectorXd::Ones(d);
    Eigen::VectorXd next(d);
    std::vector<bool> wanted(two_m + 1, false);
    for (int p : positions) {
        if (p < 0 || p > two_m) throw std::out_of_range("oracle: position outside string");
        wanted[p] = true;
    }
    if (wanted[0]) stored.emplace(0, f);
    for (int p = 1; p <= two_m; ++p) {
        prop.apply(protocol.slot_s(p), f, next);
        f.swap(next);
        const double scale = f.maxCoeff();
        if (!(scale > 0.0)) throw std::runtime_error("oracle: propagated vector vanished");
        f /= scale;
        if (wanted[p]) stored.emplace(p, f);
    }
    return stored;
}

WeightedEnsemble ensemble_at(const Propagator& prop, const QuenchProtocol& protocol,
                             const std::unordered_map<int, Eigen::VectorXd>& stored,
                             int position) {
    const int two_m = 2 * protocol.m;
    WeightedEnsemble ens;
    ens.n_sites = prop.n_sites();
    ens.weight = stored.at(position).cwiseProduct(stored.at(two_m - position));
    return ens;
}

}  // namespace

std::vector<AsymmetricPoint> exact_asymmetric_expectations(const ModelSpec& model,
                                                           const QuenchProtocol& protocol) {
    Propagator prop(model);
    const int two_m = 2 * protocol.m;
    std::vector<int> positions;
    for (int tau : protocol.tau_grid) {
        positions.push_back(tau);
        positions.push_back(two_m - tau);
    }
    auto stored = forward_vectors(prop, protocol, positions);
    std::vector<AsymmetricPoint> out;
    out.reserve(protocol.tau_grid.size());
    for (int tau : protocol.tau_grid) {
        WeightedEnsemble ens = ensemble_at(prop, protocol, stored, tau);
        AsymmetricPoint pt;
        pt.tau = tau;
        pt.s = protocol.s_at(tau);
        pt.q2 = ens.evaluate(Observable::q2);
        pt.q4 = ens.evaluate(Observable::q4);
        pt.mz2 = ens.evaluate(Observable::mz2);
        out.push_back(pt);
    }
    return out;
}

double exact_asymmetric_expectation(const ModelSpec& model, const QuenchProtocol& protocol,
                                    Observable obs, int tau) {
    if (tau < 0 || tau > protocol.m) throw std::out_of_range("oracle: tau outside [0, m]");
    Propagator prop(model);
    const int two_m = 2 * protocol.m;
    auto stored = forward_vectors(prop, protocol, {tau, two_m - tau});
    WeightedEnsemble ens = ensemble_at(prop, protocol, stored, tau);
    return ens.evaluate(obs, obs == Observable::energy ? prop.classical_energies()
                                                       : Eigen::VectorXd());
}

Eigen::VectorXd exact_state_distribution(const ModelSpec& model, const QuenchProtocol& protocol,
                                         int position) {
    Propagator prop(model);
    const int two_m = 2 * protocol.m;
    if (position < 0 || position > two_m)
        throw std::out_of_range("oracle: position outside [0, 2m]");
    auto stored = forward_vectors(prop, protocol, {position, two_m - position});
    WeightedEnsemble ens = ensemble_at(prop, protocol, stored, position);
    return ens.weight / ens.weight.sum();
}

Eigen::VectorXd exact_slot_type_distribution(const ModelSpec& model,
                                             const QuenchProtocol& protocol, int slot) {
    Propagator prop(model);
    const int two_m = 2 * protocol.m;
    if (slot < 1 || slot > two_m) throw std::out_of_range("oracle: slot outside [1, 2m]");
    auto stored = forward_vectors(prop, protocol, {slot - 1, two_m - slot});
    const Eigen::VectorXd& before = stored.at(slot - 1);
    const Eigen::VectorXd& after = stored.at(two_m - slot);
    const OperatorTable& table = prop.table();
    const double s = protocol.slot_s(slot);
    const int n_edges = table.n_edges;
    const int n = prop.n_sites();
    const long d = prop.dim();
    Eigen::VectorXd prob = Eigen::VectorXd::Zero(n_edges + 2 * n);
    for (int e = 0; e < n_edges; ++e) {
        const Edge& edge = model.graph.edges[e];
        double acc = 0.0;
        for (long z = 0; z < d; ++z) {
            if (spin_of(z, edge.i) * spin_of(z, edge.j) == table.satisfied_sign[e])
                acc += before[z] * after[z];
        }
        prob[e] = table.bond_weight(s, e) * acc;
    }
    const double site = table.site_weight(s);
    for (int i = 0; i < n; ++i) {
        double acc_const = 0.0, acc_flip = 0.0;
        const long bit = 1L << i;
        for (long z = 0; z < d; ++z) {
            acc_const += before[z] * after[z];
            acc_flip += before[z] * after[z ^ bit];
        }
        prob[n_edges + i] = site * acc_const;
        prob[n_edges + n + i] = site * acc_flip;
    }
    const double total = prob.sum();
    if (!(total > 0.0)) throw std::runtime_error("oracle: slot distribution vanished");
    return prob / total;
}

namespace {

// Lanczos with full reorthogonalization on G(s); returns the largest Ritz
// pairs (ground state of H first). Deflation vectors are projected out.
struct LanczosResult {
    double theta = 0.0;  // eigenvalue of G
    Eigen::VectorXd vec;
    bool converged = false;
};

LanczosResult lanczos_top(const Propagator& prop, double s,
                          const std::vector<Eigen::VectorXd>& deflate, std::uint64_t seed) {
    const long d = prop.dim();
    const int max_iter = static_cast<int>(std::min<long>(d, 300));
    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    Eigen::VectorXd v = Eigen::VectorXd::Ones(d);
    // deterministic jitter breaks symmetry sectors the uniform vector misses
    std::uint64_t state = seed ^ 0x9e3779b97f4a7c15ULL;
    for (long z = 0; z < d; ++z) {
        state = state * 6364136223846793005ULL + 1442695040888963407ULL;
        v[z] += 1e-3 * (static_cast<double>(state >> 11) / 9007199254740992.0 - 0.5);
    }
    auto project_out = [&](Eigen::VectorXd& x) {
        for (const auto& u : deflate) x -= u.dot(x) * u;
        for (const auto& u : basis) x -= u.dot(x) * u;
    };
    project_out(v);
    double nrm = v.norm();
    if (nrm < 1e-12) return {};
    v /= nrm;

    Eigen::VectorXd w(d);
    double prev_theta = -std::numeric_limits<double>::infinity();
    LanczosResult result;
    for (int it = 0; it < max_iter; ++it) {
        basis.push_back(v);
        prop.apply(s, v, w);
        double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (it > 0) w -= beta.back() * basis[it - 1];
        project_out(w);
        double b = w.norm();

        const int k = static_cast<int>(alpha.size());
        const bool check = k <= 32 || k % 4 == 0 || b < 1e-12 || it == max_iter - 1;
        if (!check) {
            beta.push_back(b);
            v = w / b;
            continue;
        }
        // Ritz values of the tridiagonal
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            tri(i, i) = alpha[i];
            if (i + 1 < k) tri(i, i + 1) = tri(i + 1, i) = beta.size() > static_cast<size_t>(i)
                                                               ? beta[i]
                                                               : 0.0;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        double theta = es.eigenvalues()(k - 1);
        if (std::abs(theta - prev_theta) < 1e-13 * std::max(1.0, std::abs(theta)) || b < 1e-12 ||
            it == max_iter - 1) {
            Eigen::VectorXd ritz = Eigen::VectorXd::Zero(d);
            for (int i = 0; i < k; ++i) ritz += es.eigenvectors()(i, k - 1) * basis[i];
            ritz.normalize();
            result.theta = theta;
            result.vec = ritz;
            result.converged = true;
            return result;
        }
        prev_theta = theta;
        beta.push_back(b);
        v = w / b;
    }
    return result;
}

}  // namespace

GroundState exact_ground_state(const ModelSpec& model, double s) {
    Propagator prop(model);
    LanczosResult top = lanczos_top(prop, s, {}, 1);
    if (!top.converged) throw std::runtime_error("oracle: Lanczos failed to converge");
    GroundState gs;
    gs.energy = prop.table().shift(s) - top.theta;
    gs.amplitudes = top.vec;
    return gs;
}

double exact_equilibrium(const ModelSpec& model, double s, Observable obs) {
    Propagator prop(model);
    GroundState gs = exact_ground_state(model, s);
    if (obs == Observable::energy) return gs.energy;
    WeightedEnsemble ens;
    ens.n_sites = model.graph.n;
    ens.weight = gs.amplitudes.cwiseAbs2();
    return ens.evaluate(obs);
}

double exact_equilibrium_classical(const CouplingGraph& graph, double temperature,
                                   Observable obs) {
    if (graph.n > max_sites_classical)
        throw std::out_of_range("oracle: classical size cap is n <= 20");
    if (temperature <= 0.0) throw std::invalid_argument("oracle: temperature must be > 0");
    const long d = 1L << graph.n;
    Eigen::VectorXd energies(d);
    for (long z = 0; z < d; ++z) {
        double e = 0.0;
        for (const Edge& edge : graph.edges)
            e += edge.coupling * spin_of(z, edge.i) * spin_of(z, edge.j);
        energies[z] = e;
    }
    const double e_min = energies.minCoeff();
    WeightedEnsemble ens;
    ens.n_sites = graph.n;
    ens.weight = ((e_min - energies.array()) / temperature).exp().matrix();
    return ens.evaluate(obs, energies);
}

double chain_energy_transfer_matrix(int n, double temperature) {
    const double beta = 1.0 / temperature;
    const double lp = 2.0 * std::cosh(beta);
    const double lm = 2.0 * std::sinh(beta);
    // d lambda_+/d beta = lambda_-, d lambda_-/d beta = lambda_+
    const double num = std::pow(lp, n - 1) * lm + std::pow(lm, n - 1) * lp;
    const double den = std::pow(lp, n) + std::pow(lm, n);
    return -static_cast<double>(n) * num / den;
}

GapResult exact_gap(const ModelSpec& model, std::span<const double> s_grid,
                    double degeneracy_tol) {
    if (model.graph.n > 12) throw std::out_of_range("oracle: gap size cap is n <= 12");
    Propagator prop(model);
    GapResult result;
    result.min_gap = std::numeric_limits<double>::infinity();
    for (double s : s_grid) {
        LanczosResult first = lanczos_top(prop, s, {}, 1);
        if (!first.converged) throw std::runtime_error("oracle: Lanczos failed");
        std::vector<Eigen::VectorXd> deflate{first.vec};
        LanczosResult second = lanczos_top(prop, s, deflate, 2);
        const double shift = prop.table().shift(s);
        GapPoint pt;
        pt.s = s;
        pt.e0 = shift - first.theta;
        pt.e1 = shift - second.theta;
        pt.gap = pt.e1 - pt.e0;
        pt.degenerate = pt.gap < degeneracy_tol;
        pt.gap_above_degenerate = pt.gap;
        if (pt.degenerate) {
            // deflate until a distinct level appears (bounded)
            for (int extra = 0; extra < 8; ++extra) {
                deflate.push_back(second.vec);
                second = lanczos_top(prop, s, deflate, 3 + extra);
                if (!second.converged) break;
                double gap = shift - second.theta - pt.e0;
                if (gap >= degeneracy_tol) {
                    pt.gap_above_degenerate = gap;
                    break;
                }
            }
        }
        result.points.push_back(pt);
        if (pt.gap < result.min_gap) {
            result.min_gap = pt.gap;
            result.argmin_s = s;
        }
    }
    return result;
}

}  // namespace anneal::oracle
