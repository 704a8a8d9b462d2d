#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace anneal {

enum class GraphKind { chain, regular, complete, square_lattice };

enum class CouplingModel {
    antiferro_unit,  // J = +1
    ferro_unit,      // J = -1
    gaussian,        // J ~ N(0, 1/n), extensive energy
};

struct Edge {
    int i = 0;  // i < j always
    int j = 0;
    double coupling = 0.0;
};

// Couplings of the classical cost function E(sigma) = sum_e J_e sigma_i sigma_j,
// each unordered pair counted once.
struct CouplingGraph {
    int n = 0;
    GraphKind kind = GraphKind::chain;
    int degree = 0;           // kind == regular only
    std::uint64_t seed = 0;   // 0 for deterministic constructions
    std::vector<Edge> edges;

    std::vector<int> degrees() const;
    // site -> indices into `edges` of incident edges
    std::vector<std::vector<int>> incident_edges() const;
    double coupling_abs_sum() const;
    bool has_uniform_sign() const;
};

const char* to_string(GraphKind k);

// Periodic ferromagnetic chain (J = -1), n >= 3.
CouplingGraph make_chain(int n);

// All n(n-1)/2 pairs coupled, n >= 2. Gaussian couplings use the given seed.
CouplingGraph make_complete(int n, CouplingModel model, std::uint64_t seed = 0);

// length x length periodic square lattice, ferromagnetic (J = -1).
CouplingGraph make_square_lattice(int length);

// Random simple d-regular graph via the pairing model with restarts,
// antiferromagnetic (J = +1). Requires n > d and n*d even.
CouplingGraph generate_regular_graph(int n, int d, std::uint64_t seed);

// sum_e J_e s_i s_j; throws std::invalid_argument on size mismatch.
double classical_energy(const CouplingGraph& g, std::span<const std::int8_t> spins);

// One edge per line "i j J" after a header line with n, kind, degree, seed.
std::string serialize_graph(const CouplingGraph& g);
CouplingGraph parse_graph(std::istream& in);
CouplingGraph parse_graph(const std::string& text);

// FNV-1a over the canonical serialization; recorded for provenance.
std::uint64_t graph_hash(const CouplingGraph& g);

std::uint64_t fnv1a(std::string_view bytes);

}  // namespace anneal
