#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsnnc/network.hpp"

namespace tsnnc {

// How frame release phases are chosen per run.
//   Zero:   every flow releases its first frame at t = 0 (one run).
//   Random: phases uniform on [0, period), `runs` independent draws.
//   Grid:   phases on multiples of grid_step; the full product when it has at
//           most max_runs points, otherwise max_runs seeded samples of it.
enum class PhasePolicy { Zero, Random, Grid };

struct SimParams {
    Rational duration = Rational(1, 100);  // frames are released on [0, duration)
    CreditMode mode = CreditMode::Frozen;
    PhasePolicy phases = PhasePolicy::Zero;
    Rational grid_step = Rational(1, 10000);
    std::size_t runs = 1;       // Random
    std::size_t max_runs = 64;  // Grid
    unsigned seed = 1;
    // Best-effort load as a fraction of the link rate; 1 keeps a max-size
    // frame ready at all times, 0 disables best effort.
    Rational be_load = 1;
    // Positive credit of an emptied queue resets to 0 even while the gate is
    // closed; when false the reset waits for the gate to open.
    bool reset_when_closed = true;
    std::ostream* trace = nullptr;  // CSV: time_us,port,event,class,credit
};

// Parses "zero", "random" or "grid:<step_us>".
void parse_phase_policy(const std::string& text, SimParams& params);

struct SimRoute {
    std::string destination;  // last port of the route
    Rational max_delay;
};

struct SimFlowResult {
    std::string id;
    std::size_t cls = 0;
    std::vector<SimRoute> routes;
    std::size_t frames = 0;  // delivered frame copies

    Rational worst() const;
};

struct SimPortClass {
    std::size_t port = 0;
    std::string port_id;
    std::size_t cls = 0;
    Rational credit_min;
    Rational credit_max;
    Rational max_hop_delay;  // queueing plus transmission at this port
    std::size_t frames = 0;
};

struct SimReport {
    CreditMode mode = CreditMode::Frozen;
    std::size_t runs = 0;
    std::size_t events = 0;
    // AVB or BE frames found overlapping an ST window; always 0 unless the
    // gate logic is broken.
    std::size_t window_violations = 0;
    std::vector<SimFlowResult> flows;
    std::vector<SimPortClass> port_classes;  // every (port, class) pair
    std::vector<std::string> warnings;

    const SimFlowResult& flow(const std::string& id) const;
    const SimPortClass& at(const std::string& port_id, std::size_t cls) const;
};

// One run with explicit first-release phases (one per flow, seconds).
SimReport simulate_once(const Network& net, const SimParams& params, const std::vector<Rational>& phases);

// All runs of the phase policy, merged by maximum delay and credit extrema.
SimReport simulate(const Network& net, const SimParams& params);

void write_csv(std::ostream& out, const SimReport& report);
nlohmann::json to_json(const SimReport& report);

}  // namespace tsnnc
