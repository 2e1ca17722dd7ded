#pragma once

#include <harmflow/harmflow.hpp>

#include <string>

namespace fixture {

inline constexpr double kTable2C = 11.09e-6;

// 50 Hz, 220 V per phase, Ls = 1.6 mH.
harmflow::SystemBasis table1_basis();

// Bank designed from C = 11.09 uF, the tabulated q values and the tabulated high-pass branch.
harmflow::FilterBank designed_bank();

// The tabulated R, L, C values as printed.
harmflow::FilterBank printed_bank();

harmflow::Scenario baseline_scenario();
harmflow::Scenario filtered_scenario();

// Runs cached for the lifetime of the process.
const harmflow::WaveformSet& baseline_run();
const harmflow::WaveformSet& filtered_run();

// Filtered plant run long enough for the tuned branches' start-up transient to die out.
inline constexpr double kSettledDuration = 1.5;
const harmflow::WaveformSet& settled_filtered_run();

std::string scenario_path(const std::string& file);

}  // namespace fixture
