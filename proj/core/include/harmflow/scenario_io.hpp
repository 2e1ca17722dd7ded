#pragma once

#include "harmflow/simulator.hpp"

#include <string>
#include <string_view>

namespace harmflow {

// Scenario document:
//   basis:  fundamental_hz, source_vrms, source_inductance_h, [voltage_reference]
//   load:   dc_inductance_h, load_resistance_ohm, load_capacitance_f, [placement]
//   bank:   optional, filter-bank document
//   solver: dt_s, duration_s, diode_on_ohm, diode_off_ohm, max_switch_iterations
// Unknown keys and invariant violations raise ValidationError naming the field path.
Scenario scenario_from_json(std::string_view text);
Scenario read_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

}  // namespace harmflow
