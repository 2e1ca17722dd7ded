#include "fixtures.hpp"

#include "oracles.hpp"

#include <cmath>
#include <numbers>

namespace fixture {

using namespace harmflow;

SystemBasis table1_basis() { return SystemBasis{}; }

FilterBank designed_bank() {
    const auto& q = oracle::frozen::kTable2Q;
    auto designed = design_bank_six_pulse(table1_basis(), kTable2C, q, oracle::frozen::kPrintedHpCorner,
                                          oracle::frozen::kPrintedHpQ);
    return designed.value;
}

FilterBank printed_bank() {
    std::vector<FilterBranch> branches;
    for (int i = 0; i < 4; ++i) {
        SingleTunedFilter f;
        f.order = kSixPulseOrders[i];
        f.capacitance_f = kTable2C;
        f.inductance_h = oracle::frozen::kPrintedL[i];
        f.resistance_ohm = oracle::frozen::kPrintedR[i];
        f.quality_factor = std::sqrt(f.inductance_h / f.capacitance_f) / f.resistance_ohm;
        branches.emplace_back(f);
    }
    HighPassFilter hp;
    hp.capacitance_f = kTable2C;
    hp.inductance_h = oracle::frozen::kPrintedHpL;
    hp.resistance_ohm = oracle::frozen::kPrintedHpR;
    hp.corner_hz = 1.0 / (2.0 * std::numbers::pi * std::sqrt(hp.inductance_h * hp.capacitance_f));
    hp.quality_factor = hp.resistance_ohm / (2.0 * std::numbers::pi * hp.corner_hz * hp.inductance_h);
    branches.emplace_back(hp);
    return FilterBank(50.0, std::move(branches));
}

Scenario baseline_scenario() {
    Scenario s;
    s.basis = table1_basis();
    return s;
}

Scenario filtered_scenario() {
    Scenario s = baseline_scenario();
    s.bank = designed_bank();
    return s;
}

const WaveformSet& baseline_run() {
    static const WaveformSet w = run(baseline_scenario());
    return w;
}

const WaveformSet& filtered_run() {
    static const WaveformSet w = run(filtered_scenario());
    return w;
}

const WaveformSet& settled_filtered_run() {
    static const WaveformSet w = [] {
        Scenario s = filtered_scenario();
        s.solver.duration_s = kSettledDuration;
        return run(s);
    }();
    return w;
}

std::string scenario_path(const std::string& file) { return std::string(HARMFLOW_SCENARIO_DIR) + "/" + file; }

}  // namespace fixture
