#include "anneal/qmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "anneal/rng.hpp"

namespace anneal {

const char* to_string(UpdateKind k) {
    return k == UpdateKind::cluster ? "cluster" : "local";
}

OperatorString::OperatorString(const ModelSpec& model, const QuenchProtocol& protocol,
                               std::uint64_t seed)
    : model_(model),
      table_(build_elementary_decomposition(model)),
      protocol_(protocol),
      n_(model.graph.n),
      rng_(make_engine(seed)) {
    const int two_m = 2 * protocol_.m;
    ops_.resize(two_m);
    z_right_.resize(n_);
    spins_.resize(n_);
    sat_pos_.assign(table_.n_edges, -1);
    sat_list_.reserve(table_.n_edges);
    site_seg_.resize(n_);

    const int n_edges = table_.n_edges;
    edge_i_.resize(n_edges);
    edge_j_.resize(n_edges);
    for (int e = 0; e < n_edges; ++e) {
        edge_i_[e] = model_.graph.edges[e].i;
        edge_j_[e] = model_.graph.edges[e].j;
    }
    auto inc = model_.graph.incident_edges();
    inc_offset_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) inc_offset_[i + 1] = inc_offset_[i] + static_cast<int>(inc[i].size());
    inc_edge_.resize(inc_offset_[n_]);
    for (int i = 0; i < n_; ++i)
        std::copy(inc[i].begin(), inc[i].end(), inc_edge_.begin() + inc_offset_[i]);

    uniform_couplings_ = true;
    for (int e = 0; e < n_edges; ++e)
        if (std::abs(table_.abs_coupling[e] - table_.max_abs_coupling) > 1e-12 * table_.max_abs_coupling)
            uniform_couplings_ = false;

    for (int i = 0; i < n_; ++i) z_right_[i] = (rng_() & 1) ? std::int8_t{1} : std::int8_t{-1};

    if (protocol_.mode == QuenchProtocol::Mode::simulation_time) {
        uniform_mode_ = true;
        uniform_s_ = protocol_.s_start;
        if (uniform_s_ == 0.0) {
            // exact equilibrium draw at s = 0: all site operators carry equal
            // weight and any flip pattern is legal with free boundaries
            for (Slot& op : ops_) {
                op.kind = (rng_() & 1) ? Slot::Kind::site_const : Slot::Kind::site_flip;
                op.index = static_cast<std::int32_t>(bounded(n_));
            }
            return;
        }
    } else {
        slot_s_.resize(two_m);
        for (int p = 0; p < two_m; ++p) slot_s_[p] = protocol_.slot_s(p + 1);
    }

    // legal deterministic start: site constants where they have weight,
    // otherwise a bond on a satisfied edge (spins are never flipped here)
    for (int p = 0; p < two_m; ++p) {
        const double s = slot_s(p);
        if (table_.site_weight(s) > 0.0) {
            ops_[p] = {Slot::Kind::site_const, static_cast<std::int32_t>(p % n_)};
            continue;
        }
        int chosen = -1;
        for (int e = 0; e < n_edges; ++e) {
            if (table_.bond_active(e, z_right_[edge_i_[e]], z_right_[edge_j_[e]]) &&
                table_.bond_weight(s, e) > 0.0) {
                chosen = e;
                break;
            }
        }
        if (chosen < 0 && n_edges > 0) {
            // force edge 0 into its satisfied state and retry
            z_right_[edge_j_[0]] = static_cast<std::int8_t>(table_.satisfied_sign[0] * z_right_[edge_i_[0]]);
            for (int e = 0; e < n_edges; ++e) {
                if (table_.bond_active(e, z_right_[edge_i_[e]], z_right_[edge_j_[e]]) &&
                    table_.bond_weight(s, e) > 0.0) {
                    chosen = e;
                    break;
                }
            }
        }
        if (chosen < 0) throw std::runtime_error("operator string: no legal slot operator");
        ops_[p] = {Slot::Kind::bond, chosen};
    }
}

void OperatorString::set_uniform_s(double s) {
    if (!uniform_mode_)
        throw std::logic_error("set_uniform_s: only valid in simulation-time mode");
    if (s < 0.0 || s > 1.0) throw std::invalid_argument("set_uniform_s: s outside [0,1]");
    uniform_s_ = s;
}

void OperatorString::rebuild_satisfied() {
    sat_list_.clear();
    std::fill(sat_pos_.begin(), sat_pos_.end(), -1);
    sat_abs_sum_ = 0.0;
    const int n_edges = table_.n_edges;
    for (int e = 0; e < n_edges; ++e) {
        if (table_.bond_active(e, spins_[edge_i_[e]], spins_[edge_j_[e]])) {
            sat_pos_[e] = static_cast<std::int32_t>(sat_list_.size());
            sat_list_.push_back(e);
            sat_abs_sum_ += table_.abs_coupling[e];
        }
    }
}

void OperatorString::apply_flip_tracking(int site) {
    spins_[site] = static_cast<std::int8_t>(-spins_[site]);
    for (int k = inc_offset_[site]; k < inc_offset_[site + 1]; ++k) {
        const int e = inc_edge_[k];
        const bool active = table_.bond_active(e, spins_[edge_i_[e]], spins_[edge_j_[e]]);
        const int pos = sat_pos_[e];
        if (active && pos < 0) {
            sat_pos_[e] = static_cast<std::int32_t>(sat_list_.size());
            sat_list_.push_back(e);
            sat_abs_sum_ += table_.abs_coupling[e];
        } else if (!active && pos >= 0) {
            const int last = sat_list_.back();
            sat_list_[pos] = last;
            sat_pos_[last] = pos;
            sat_list_.pop_back();
            sat_pos_[e] = -1;
            sat_abs_sum_ -= table_.abs_coupling[e];
        }
    }
}

int OperatorString::pick_satisfied_edge() {
    const auto count = sat_list_.size();
    if (uniform_couplings_) return sat_list_[bounded(count)];
    for (int tries = 0; tries < 64; ++tries) {
        const int e = sat_list_[bounded(count)];
        if (u01() * table_.max_abs_coupling <= table_.abs_coupling[e]) return e;
    }
    // rare fallback: exact cumulative scan
    double target = u01() * sat_abs_sum_;
    for (int e : sat_list_) {
        target -= table_.abs_coupling[e];
        if (target <= 0.0) return e;
    }
    return sat_list_.back();
}

void OperatorString::diagonal_sweep() {
    std::copy(z_right_.begin(), z_right_.end(), spins_.begin());
    rebuild_satisfied();
    const double h = table_.field;
    const int two_m = string_length();
    for (int p = 0; p < two_m; ++p) {
        Slot& op = ops_[p];
        if (op.kind == Slot::Kind::site_flip) {
            apply_flip_tracking(op.index);
            continue;
        }
        const double s = slot_s(p);
        const double w_bond = 2.0 * s * sat_abs_sum_;
        const double w_site = n_ * (1.0 - s) * h;
        const double total = w_bond + w_site;
        if (!(total > 0.0)) throw std::runtime_error("diagonal sweep: zero total weight");
        if (u01() * total < w_bond) {
            op.kind = Slot::Kind::bond;
            op.index = pick_satisfied_edge();
        } else {
            op.kind = Slot::Kind::site_const;
            op.index = static_cast<std::int32_t>(bounded(n_));
        }
    }
}

int OperatorString::find_root(int x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

void OperatorString::cluster_sweep() {
    const int two_m = string_length();
    int n_site_ops = 0;
    for (const Slot& op : ops_)
        if (op.kind != Slot::Kind::bond) ++n_site_ops;
    n_segments_ = n_ + n_site_ops;

    parent_.resize(n_segments_);
    uf_size_.assign(n_segments_, 1);
    std::iota(parent_.begin(), parent_.end(), 0);
    std::iota(site_seg_.begin(), site_seg_.end(), 0);

    auto unite = [&](int a, int b) {
        a = find_root(a);
        b = find_root(b);
        if (a == b) return;
        if (uf_size_[a] < uf_size_[b]) std::swap(a, b);
        parent_[b] = a;
        uf_size_[a] += uf_size_[b];
    };

    int counter = n_;
    for (int p = 0; p < two_m; ++p) {
        const Slot& op = ops_[p];
        if (op.kind == Slot::Kind::bond) {
            unite(site_seg_[edge_i_[op.index]], site_seg_[edge_j_[op.index]]);
        } else {
            site_seg_[op.index] = counter++;
        }
    }

    seg_flip_.resize(n_segments_);
    for (int id = 0; id < n_segments_; ++id)
        if (parent_[id] == id) seg_flip_[id] = static_cast<std::uint8_t>(rng_() & 1);

    std::iota(site_seg_.begin(), site_seg_.end(), 0);
    for (int i = 0; i < n_; ++i)
        if (seg_flip_[find_root(i)]) z_right_[i] = static_cast<std::int8_t>(-z_right_[i]);
    counter = n_;
    for (int p = 0; p < two_m; ++p) {
        Slot& op = ops_[p];
        if (op.kind == Slot::Kind::bond) continue;
        const int before = site_seg_[op.index];
        const int after = counter++;
        site_seg_[op.index] = after;
        if (seg_flip_[find_root(before)] != seg_flip_[find_root(after)])
            op.kind = op.kind == Slot::Kind::site_const ? Slot::Kind::site_flip
                                                        : Slot::Kind::site_const;
    }
}

void OperatorString::local_sweep() {
    const int two_m = string_length();
    int n_site_ops = 0;
    for (const Slot& op : ops_)
        if (op.kind != Slot::Kind::bond) ++n_site_ops;
    n_segments_ = n_ + n_site_ops;

    seg_bonds_.assign(n_segments_, 0);
    // begin/end slot of each segment (-1: open at the string boundary)
    static thread_local std::vector<std::int32_t> seg_begin, seg_end, seg_site;
    seg_begin.assign(n_segments_, -1);
    seg_end.assign(n_segments_, -1);
    seg_site.resize(n_segments_);
    std::iota(site_seg_.begin(), site_seg_.end(), 0);
    for (int i = 0; i < n_; ++i) seg_site[i] = i;

    int counter = n_;
    for (int p = 0; p < two_m; ++p) {
        const Slot& op = ops_[p];
        if (op.kind == Slot::Kind::bond) {
            ++seg_bonds_[site_seg_[edge_i_[op.index]]];
            ++seg_bonds_[site_seg_[edge_j_[op.index]]];
        } else {
            const int prev = site_seg_[op.index];
            seg_end[prev] = p;
            seg_begin[counter] = p;
            seg_site[counter] = op.index;
            site_seg_[op.index] = counter;
            ++counter;
        }
    }

    // flip bond-free segments with p = 1/2; a toggled terminator may toggle
    // back when its other segment flips too, which is the correct net result
    for (int id = 0; id < n_segments_; ++id) {
        if (seg_bonds_[id] != 0) continue;
        if (rng_() & 1) continue;
        if (seg_begin[id] < 0) z_right_[seg_site[id]] = static_cast<std::int8_t>(-z_right_[seg_site[id]]);
        for (int p : {seg_begin[id], seg_end[id]}) {
            if (p < 0) continue;
            Slot& op = ops_[p];
            op.kind = op.kind == Slot::Kind::site_const ? Slot::Kind::site_flip
                                                        : Slot::Kind::site_const;
        }
    }
}

void OperatorString::sweep(UpdateKind kind) {
    diagonal_sweep();
    if (kind == UpdateKind::cluster)
        cluster_sweep();
    else
        local_sweep();
}

void OperatorString::propagated_configs(std::span<const int> positions,
                                        std::vector<std::vector<std::int8_t>>& out) {
    out.resize(positions.size());
    const int two_m = string_length();
    std::copy(z_right_.begin(), z_right_.end(), spins_.begin());
    std::size_t idx = 0;
    while (idx < positions.size() && positions[idx] == 0) out[idx++].assign(spins_.begin(), spins_.end());
    for (int p = 0; p < two_m && idx < positions.size(); ++p) {
        const Slot& op = ops_[p];
        if (op.kind == Slot::Kind::site_flip)
            spins_[op.index] = static_cast<std::int8_t>(-spins_[op.index]);
        while (idx < positions.size() && positions[idx] == p + 1)
            out[idx++].assign(spins_.begin(), spins_.end());
    }
    if (idx != positions.size())
        throw std::out_of_range("propagated_configs: position outside [0, 2m]");
}

std::vector<std::int8_t> OperatorString::left_boundary() const {
    std::vector<std::int8_t> spins(z_right_.begin(), z_right_.end());
    for (const Slot& op : ops_)
        if (op.kind == Slot::Kind::site_flip) spins[op.index] = static_cast<std::int8_t>(-spins[op.index]);
    return spins;
}

bool OperatorString::legal_configuration() const {
    std::vector<std::int8_t> spins(z_right_.begin(), z_right_.end());
    const int two_m = string_length();
    for (int p = 0; p < two_m; ++p) {
        const Slot& op = ops_[p];
        const double s = slot_s(p);
        switch (op.kind) {
            case Slot::Kind::bond:
                if (!table_.bond_active(op.index, spins[edge_i_[op.index]], spins[edge_j_[op.index]]))
                    return false;
                if (!(table_.bond_weight(s, op.index) > 0.0)) return false;
                break;
            case Slot::Kind::site_const:
                if (!(table_.site_weight(s) > 0.0)) return false;
                break;
            case Slot::Kind::site_flip:
                if (!(table_.site_weight(s) > 0.0)) return false;
                spins[op.index] = static_cast<std::int8_t>(-spins[op.index]);
                break;
        }
    }
    return true;
}

double OperatorString::log_weight() const {
    std::vector<std::int8_t> spins(z_right_.begin(), z_right_.end());
    double acc = 0.0;
    const int two_m = string_length();
    for (int p = 0; p < two_m; ++p) {
        const Slot& op = ops_[p];
        const double s = slot_s(p);
        double w = 0.0;
        switch (op.kind) {
            case Slot::Kind::bond:
                w = table_.bond_active(op.index, spins[edge_i_[op.index]], spins[edge_j_[op.index]])
                        ? table_.bond_weight(s, op.index)
                        : 0.0;
                break;
            case Slot::Kind::site_const:
                w = table_.site_weight(s);
                break;
            case Slot::Kind::site_flip:
                w = table_.site_weight(s);
                spins[op.index] = static_cast<std::int8_t>(-spins[op.index]);
                break;
        }
        if (!(w > 0.0)) throw std::runtime_error("log_weight: illegal configuration");
        acc += std::log(w);
    }
    return acc;
}

ReplicaPair::ReplicaPair(const ModelSpec& model, const QuenchProtocol& protocol,
                         std::uint64_t seed)
    : first(model, protocol, child_seed(seed, 1)),
      second(model, protocol, child_seed(seed, 2)) {}

std::vector<PairSample> measure(ReplicaPair& pair, std::span<const int> tau_grid) {
    const int m = pair.first.m();
    const int two_m = 2 * m;
    std::vector<int> positions;
    positions.reserve(2 * tau_grid.size());
    for (int tau : tau_grid) {
        if (tau < 0 || tau > m) throw std::out_of_range("measure: tau outside [0, m]");
        positions.push_back(tau);
        positions.push_back(two_m - tau);
    }
    std::sort(positions.begin(), positions.end());
    positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

    static thread_local std::vector<std::vector<std::int8_t>> cfg_a, cfg_b;
    pair.first.propagated_configs(positions, cfg_a);
    pair.second.propagated_configs(positions, cfg_b);
    auto pos_index = [&](int p) {
        return static_cast<std::size_t>(
            std::lower_bound(positions.begin(), positions.end(), p) - positions.begin());
    };

    std::vector<PairSample> out;
    out.reserve(tau_grid.size());
    for (int tau : tau_grid) {
        PairSample smp;
        smp.tau = tau;
        double q2 = 0.0, q4 = 0.0, mz2 = 0.0;
        int mirrors = 0;
        for (int p : {tau, two_m - tau}) {
            const std::size_t k = pos_index(p);
            const double q = overlap_q(cfg_a[k], cfg_b[k]);
            const double ma = magnetization(cfg_a[k]);
            const double mb = magnetization(cfg_b[k]);
            q2 += q * q;
            q4 += q * q * q * q;
            mz2 += 0.5 * (ma * ma + mb * mb);
            ++mirrors;
            if (p == two_m - p) break;  // center slot has no distinct mirror
        }
        smp.q2 = q2 / mirrors;
        smp.q4 = q4 / mirrors;
        smp.mz2 = mz2 / mirrors;
        out.push_back(smp);
    }
    return out;
}

ObservableSeries run_quench(const ModelSpec& model, const QuenchProtocol& protocol,
                            const SamplingPlan& plan, std::uint64_t seed, UpdateKind update) {
    if (protocol.mode != QuenchProtocol::Mode::hamiltonian)
        throw std::invalid_argument("run_quench: protocol mode must be hamiltonian");
    ReplicaPair pair(model, protocol, seed);
    const long therm = plan.resolve_therm(model.graph.n);
    for (long t = 0; t < therm; ++t) {
        pair.first.sweep(update);
        pair.second.sweep(update);
    }
    const std::size_t npts = protocol.tau_grid.size();
    std::vector<BinnedAccumulator> acc_q2(npts), acc_q4(npts), acc_mz2(npts);
    for (long k = 0; k < plan.sweeps; ++k) {
        pair.first.sweep(update);
        pair.second.sweep(update);
        auto samples = measure(pair, protocol.tau_grid);
        for (std::size_t t = 0; t < npts; ++t) {
            acc_q2[t].add(samples[t].q2);
            acc_q4[t].add(samples[t].q4);
            acc_mz2[t].add(samples[t].mz2);
        }
    }

    ObservableSeries series;
    series.protocol_kind = "hamiltonian";
    series.graph_hash = graph_hash(model.graph);
    series.n_sites = model.graph.n;
    series.velocity = protocol.velocity;
    series.m = protocol.m;
    series.power = protocol.power;
    series.update_kind = to_string(update);
    series.seed = seed;
    series.points.resize(npts);
    double max_tau_int = 0.0;
    for (std::size_t t = 0; t < npts; ++t) {
        SeriesPoint& p = series.points[t];
        p.tau = protocol.tau_grid[t];
        p.s_or_t = protocol.s_at(p.tau);
        p.q2 = acc_q2[t].mean();
        p.q2_err = acc_q2[t].error();
        p.q4 = acc_q4[t].mean();
        p.q4_err = acc_q4[t].error();
        p.mz2 = acc_mz2[t].mean();
        p.mz2_err = acc_mz2[t].error();
        p.n_samples = acc_q2[t].count();
        max_tau_int = std::max({max_tau_int, acc_q2[t].tau_int(), acc_mz2[t].tau_int()});
    }
    series.max_tau_int = max_tau_int;
    series.autocorr_flagged = max_tau_int > plan.autocorr_threshold;
    return series;
}

SimulationTimeSample run_simulation_time_quench(const ModelSpec& model, double s_target,
                                                double v_sim, UpdateKind update,
                                                std::uint64_t seed) {
    QuenchProtocol protocol = QuenchProtocol::simulation_time(model.graph.n, s_target, v_sim);
    ReplicaPair pair(model, protocol, seed);
    SimulationTimeSample out;
    double s = 0.0;
    while (s < s_target) {
        s = std::min(s + v_sim, s_target);
        pair.first.set_uniform_s(s);
        pair.second.set_uniform_s(s);
        pair.first.sweep(update);
        pair.second.sweep(update);
        ++out.sweeps_used;
    }
    const int center[] = {protocol.m};
    auto samples = measure(pair, center);
    out.q2 = samples[0].q2;
    out.q4 = samples[0].q4;
    out.mz2 = samples[0].mz2;
    out.s_final = s;
    return out;
}

}  // namespace anneal
