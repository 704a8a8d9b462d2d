#include "anneal/graph.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "anneal/rng.hpp"

namespace anneal {

std::vector<int> CouplingGraph::degrees() const {
    std::vector<int> deg(n, 0);
    for (const Edge& e : edges) {
        ++deg[e.i];
        ++deg[e.j];
    }
    return deg;
}

std::vector<std::vector<int>> CouplingGraph::incident_edges() const {
    std::vector<std::vector<int>> inc(n);
    for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
        inc[edges[k].i].push_back(k);
        inc[edges[k].j].push_back(k);
    }
    return inc;
}

double CouplingGraph::coupling_abs_sum() const {
    double s = 0.0;
    for (const Edge& e : edges) s += std::abs(e.coupling);
    return s;
}

bool CouplingGraph::has_uniform_sign() const {
    if (edges.empty()) return true;
    const bool pos = edges.front().coupling > 0;
    for (const Edge& e : edges)
        if ((e.coupling > 0) != pos) return false;
    return true;
}

const char* to_string(GraphKind k) {
    switch (k) {
        case GraphKind::chain: return "chain";
        case GraphKind::regular: return "regular";
        case GraphKind::complete: return "complete";
        case GraphKind::square_lattice: return "square-lattice";
    }
    return "?";
}

CouplingGraph make_chain(int n) {
    if (n < 3) throw std::invalid_argument("make_chain: n must be >= 3");
    CouplingGraph g;
    g.n = n;
    g.kind = GraphKind::chain;
    g.degree = 2;
    g.edges.reserve(n);
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        g.edges.push_back({std::min(i, j), std::max(i, j), -1.0});
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    return g;
}

CouplingGraph make_complete(int n, CouplingModel model, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("make_complete: n must be >= 2");
    CouplingGraph g;
    g.n = n;
    g.kind = GraphKind::complete;
    g.degree = n - 1;
    g.seed = seed;
    auto rng = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(n)));
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double coupling = 0.0;
            switch (model) {
                case CouplingModel::antiferro_unit: coupling = 1.0; break;
                case CouplingModel::ferro_unit: coupling = -1.0; break;
                case CouplingModel::gaussian: coupling = gauss(rng); break;
            }
            g.edges.push_back({i, j, coupling});
        }
    }
    return g;
}

CouplingGraph make_square_lattice(int length) {
    if (length < 2) throw std::invalid_argument("make_square_lattice: length must be >= 2");
    CouplingGraph g;
    g.n = length * length;
    g.kind = GraphKind::square_lattice;
    g.degree = 4;
    auto site = [length](int x, int y) { return ((x + length) % length) + length * ((y + length) % length); };
    for (int y = 0; y < length; ++y) {
        for (int x = 0; x < length; ++x) {
            for (auto [nx, ny] : {std::pair{x + 1, y}, std::pair{x, y + 1}}) {
                int a = site(x, y), b = site(nx, ny);
                if (a == b) continue;  // length == 1 degenerate, excluded by precondition
                g.edges.push_back({std::min(a, b), std::max(a, b), -1.0});
            }
        }
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end(),
                              [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }),
                  g.edges.end());
    return g;
}

CouplingGraph generate_regular_graph(int n, int d, std::uint64_t seed) {
    if (d < 1 || n <= d) throw std::invalid_argument("generate_regular_graph: need n > d >= 1");
    if ((static_cast<long long>(n) * d) % 2 != 0)
        throw std::invalid_argument("generate_regular_graph: n*d must be even");

    auto rng = make_engine(seed);
    constexpr int max_restarts = 1000;
    for (int attempt = 0; attempt < max_restarts; ++attempt) {
        // Pairing model: n*d half-edge stubs, matched uniformly at random;
        // restart on self-loops/duplicates that cannot be avoided.
        std::vector<int> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * d);
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < d; ++k) stubs.push_back(v);

        std::set<std::pair<int, int>> used;
        std::vector<Edge> edges;
        edges.reserve(stubs.size() / 2);
        bool failed = false;
        while (!stubs.empty()) {
            bool paired = false;
            for (int tries = 0; tries < 64; ++tries) {
                std::uniform_int_distribution<std::size_t> pick(0, stubs.size() - 1);
                std::size_t a = pick(rng);
                std::size_t b = pick(rng);
                if (a == b) continue;
                int u = stubs[a], v = stubs[b];
                if (u == v) continue;
                auto key = std::minmax(u, v);
                if (used.count({key.first, key.second})) continue;
                used.insert({key.first, key.second});
                edges.push_back({key.first, key.second, +1.0});
                if (a < b) std::swap(a, b);  // erase larger index first
                stubs[a] = stubs.back();
                stubs.pop_back();
                stubs[b] = stubs.back();
                stubs.pop_back();
                paired = true;
                break;
            }
            if (!paired) {
                failed = true;  // remaining stubs likely force a self-loop or duplicate
                break;
            }
        }
        if (failed) continue;

        CouplingGraph g;
        g.n = n;
        g.kind = GraphKind::regular;
        g.degree = d;
        g.seed = seed;
        g.edges = std::move(edges);
        std::sort(g.edges.begin(), g.edges.end(),
                  [](const Edge& a, const Edge& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
        return g;
    }
    throw std::runtime_error("generate_regular_graph: pairing failed after max restarts");
}

double classical_energy(const CouplingGraph& g, std::span<const std::int8_t> spins) {
    if (static_cast<int>(spins.size()) != g.n)
        throw std::invalid_argument("classical_energy: spin vector size mismatch");
    double e = 0.0;
    for (const Edge& edge : g.edges)
        e += edge.coupling * static_cast<double>(spins[edge.i]) * static_cast<double>(spins[edge.j]);
    return e;
}

std::string serialize_graph(const CouplingGraph& g) {
    std::ostringstream out;
    out.precision(17);
    out << "# n " << g.n << " kind " << to_string(g.kind) << " degree " << g.degree << " seed "
        << g.seed << "\n";
    for (const Edge& e : g.edges) out << e.i << " " << e.j << " " << e.coupling << "\n";
    return out.str();
}

CouplingGraph parse_graph(std::istream& in) {
    CouplingGraph g;
    std::string hash, nkey, kindkey, kindval, degkey, seedkey;
    if (!(in >> hash >> nkey >> g.n >> kindkey >> kindval >> degkey >> g.degree >> seedkey >> g.seed) ||
        hash != "#" || nkey != "n" || kindkey != "kind" || degkey != "degree" || seedkey != "seed")
        throw std::runtime_error("parse_graph: bad header");
    if (kindval == "chain") g.kind = GraphKind::chain;
    else if (kindval == "regular") g.kind = GraphKind::regular;
    else if (kindval == "complete") g.kind = GraphKind::complete;
    else if (kindval == "square-lattice") g.kind = GraphKind::square_lattice;
    else throw std::runtime_error("parse_graph: unknown kind " + kindval);
    Edge e;
    while (in >> e.i >> e.j >> e.coupling) {
        if (e.i >= e.j || e.i < 0 || e.j >= g.n) throw std::runtime_error("parse_graph: bad edge");
        g.edges.push_back(e);
    }
    return g;
}

CouplingGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t graph_hash(const CouplingGraph& g) { return fnv1a(serialize_graph(g)); }

}  // namespace anneal
