#include "anneal/model.hpp"

#include <cmath>
#include <stdexcept>

namespace anneal {

ModelSpec make_model(CouplingGraph graph, double field) {
    if (field <= 0.0) throw std::invalid_argument("make_model: field must be > 0");
    ModelSpec m;
    m.graph = std::move(graph);
    m.field = field;
    switch (m.graph.kind) {
        case GraphKind::chain: m.dimension = 1; m.upper_critical_dimension = 0; break;
        case GraphKind::square_lattice: m.dimension = 2; m.upper_critical_dimension = 0; break;
        case GraphKind::regular: m.dimension = 0; m.upper_critical_dimension = 6; break;
        case GraphKind::complete: m.dimension = 0; m.upper_critical_dimension = 8; break;
    }
    return m;
}

OperatorTable build_elementary_decomposition(const ModelSpec& model) {
    OperatorTable t;
    t.n_sites = model.graph.n;
    t.n_edges = static_cast<int>(model.graph.edges.size());
    t.field = model.field;
    t.abs_coupling.resize(t.n_edges);
    t.satisfied_sign.resize(t.n_edges);
    for (int e = 0; e < t.n_edges; ++e) {
        const double coupling = model.graph.edges[e].coupling;
        t.abs_coupling[e] = std::abs(coupling);
        t.satisfied_sign[e] = coupling > 0 ? std::int8_t{-1} : std::int8_t{+1};
    }
    t.coupling_abs_sum = t.n_edges > 0 ? t.abs_coupling.sum() : 0.0;
    t.max_abs_coupling = t.n_edges > 0 ? t.abs_coupling.maxCoeff() : 0.0;
    return t;
}

}  // namespace anneal
