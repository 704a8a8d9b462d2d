#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "anneal/model.hpp"
#include "anneal/observables.hpp"
#include "anneal/schedule.hpp"

namespace anneal {

enum class UpdateKind { cluster, local };

const char* to_string(UpdateKind k);

struct SamplingPlan {
    long sweeps = 2000;
    long therm_sweeps = -1;        // -1: default max(100, 10*N)
    double autocorr_threshold = 50.0;  // tau_int above this flags the run
    int tau_points = 64;

    long resolve_therm(int n_sites) const {
        return therm_sweeps >= 0 ? therm_sweeps : std::max(100L, 10L * n_sites);
    }
};

// Sampled configuration of the length-2m operator string
//   <Psi0| G(s_1)...G(s_m) G(s_m)...G(s_1) |Psi0>,
// with free boundary spin states on both ends. Every slot holds one
// elementary operator (diagonal bond, site constant, or site flip); all
// sampled weights are strictly positive by construction.
class OperatorString {
public:
    struct Slot {
        enum class Kind : std::uint8_t { bond, site_const, site_flip };
        Kind kind = Kind::site_const;
        std::int32_t index = 0;  // edge index (bond) or site index
    };

    OperatorString(const ModelSpec& model, const QuenchProtocol& protocol, std::uint64_t seed);

    int n_sites() const { return n_; }
    int m() const { return protocol_.m; }
    int string_length() const { return static_cast<int>(ops_.size()); }
    const QuenchProtocol& protocol() const { return protocol_; }
    const ModelSpec& model() const { return model_; }

    // Heat-bath resampling of every diagonal slot among bond/site-constant
    // operators, proportional to the matrix element at the propagated spins.
    void diagonal_sweep();
    // Swendsen-Wang style multi-cluster update: site operators terminate
    // clusters, bonds join both legs, every cluster flips with p = 1/2.
    void cluster_sweep();
    // Metropolis pass flipping single world-line segments (accepted only
    // when no bond operator is attached, with p = 1/2).
    void local_sweep();
    void sweep(UpdateKind kind);

    // simulation-time mode: one s shared by all slots
    void set_uniform_s(double s);

    // Propagated spin configurations at the given string positions
    // (0..2m, ascending). out[k] aliases an internal buffer row.
    void propagated_configs(std::span<const int> positions,
                            std::vector<std::vector<std::int8_t>>& out);

    const std::vector<std::int8_t>& right_boundary() const { return z_right_; }
    std::vector<std::int8_t> left_boundary() const;
    const Slot& slot(int p) const { return ops_[p]; }  // p in 0..2m-1

    // Invariant checks (test/diagnostic use)
    bool legal_configuration() const;  // every slot weight > 0
    double log_weight() const;         // throws on illegal configuration

    std::mt19937_64& rng() { return rng_; }

private:
    double slot_s(int p) const {  // p in 0..2m-1
        return uniform_mode_ ? uniform_s_ : slot_s_[p];
    }
    double u01() { return (rng_() >> 11) * (1.0 / 9007199254740992.0); }
    // uniform integer in [0, bound) without the 64-bit modulo
    std::uint64_t bounded(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(rng_()) * bound) >> 64);
    }
    void rebuild_satisfied();
    void apply_flip_tracking(int site);
    int pick_satisfied_edge();
    void build_segments();  // fills segment scratch shared by cluster/local passes

    ModelSpec model_;
    OperatorTable table_;
    QuenchProtocol protocol_;
    int n_ = 0;
    bool uniform_mode_ = false;
    double uniform_s_ = 0.0;
    std::vector<double> slot_s_;
    std::vector<Slot> ops_;
    std::vector<std::int8_t> z_right_;
    std::mt19937_64 rng_;
    bool uniform_couplings_ = true;

    // flattened incidence
    std::vector<std::int32_t> edge_i_, edge_j_;
    std::vector<std::int32_t> inc_offset_, inc_edge_;

    // diagonal-sweep scratch: satisfied-edge bookkeeping
    std::vector<std::int8_t> spins_;
    std::vector<std::int32_t> sat_list_;
    std::vector<std::int32_t> sat_pos_;
    double sat_abs_sum_ = 0.0;

    // segment scratch
    std::vector<std::int32_t> parent_, uf_size_;
    std::vector<std::int32_t> site_seg_;
    std::vector<std::int32_t> seg_bonds_;  // attached bond count per segment (local update)
    std::vector<std::uint8_t> seg_flip_;
    int n_segments_ = 0;
    int find_root(int x);
};

// Union of two replicas sharing model and protocol, independent streams.
struct ReplicaPair {
    OperatorString first;
    OperatorString second;

    ReplicaPair(const ModelSpec& model, const QuenchProtocol& protocol, std::uint64_t seed);
};

struct PairSample {
    int tau = 0;
    double q2 = 0.0;
    double q4 = 0.0;
    double mz2 = 0.0;
};

// Diagonal observables on the propagated configurations of both replicas at
// each tau (mirror positions averaged). Throws on tau outside [0, m].
std::vector<PairSample> measure(ReplicaPair& pair, std::span<const int> tau_grid);

// Full quench: thermalize, then alternate sweeps and measurements.
ObservableSeries run_quench(const ModelSpec& model, const QuenchProtocol& protocol,
                            const SamplingPlan& plan, std::uint64_t seed,
                            UpdateKind update = UpdateKind::cluster);

struct SimulationTimeSample {
    double q2 = 0.0;
    double q4 = 0.0;
    double mz2 = 0.0;
    double s_final = 0.0;
    int sweeps_used = 0;
};

// Uniform-s string (m = 4N^2) equilibrated at s = 0, then s stepped by
// v_sim per sweep up to s_target; observables sampled at the string center
// at the end. One stochastic sample per call.
SimulationTimeSample run_simulation_time_quench(const ModelSpec& model, double s_target,
                                                double v_sim, UpdateKind update,
                                                std::uint64_t seed);

}  // namespace anneal
