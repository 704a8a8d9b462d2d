#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "anneal/graph.hpp"
#include "anneal/observables.hpp"
#include "anneal/schedule.hpp"

namespace anneal {

// N attempted single-spin flips, each accepted with min(1, exp(-dE/T)).
// When `energy` is non-null it is updated incrementally.
void metropolis_sweep(std::span<std::int8_t> spins, const CouplingGraph& graph, double temperature,
                      std::mt19937_64& rng, double* energy = nullptr);

// Satisfied edges activated with p = 1 - exp(-2|J|/T); clusters flipped
// independently with p = 1/2. Valid on frustrated graphs too (bonds only
// activate on satisfied edges).
void swendsen_wang_sweep(std::span<std::int8_t> spins, const CouplingGraph& graph,
                         double temperature, std::mt19937_64& rng);

struct ThermalPlan {
    long equilibration_sweeps = -1;  // -1: default max(100, 10*N) at T_start
    int repeats = 1;                 // independent quench repetitions per call
};

// Two replicas equilibrated at T_start, then cooled by v_T per sweep to
// T_end; q^2, q^4, m_z^2 recorded on the protocol's measurement schedule.
// With repeats > 1, repeated quenches of the same graph are averaged.
ObservableSeries run_thermal_quench(const CouplingGraph& graph, const ThermalProtocol& protocol,
                                    const ThermalPlan& plan, std::uint64_t seed);

}  // namespace anneal
