#include "harmflow/scenario_io.hpp"

#include "harmflow/error.hpp"
#include "json_support.hpp"

#include <fstream>
#include <sstream>

namespace harmflow {

using detail::json;

namespace {

SystemBasis basis_from_json(const json& j) {
    const std::string path = "basis";
    detail::require_object(j, path);
    detail::reject_unknown_keys(j, path, {"fundamental_hz", "source_vrms", "source_inductance_h", "voltage_reference"});
    SystemBasis b;
    b.fundamental_hz = detail::require_positive(j, path, "fundamental_hz");
    b.source_vrms = detail::require_positive(j, path, "source_vrms");
    b.source_inductance_h = detail::require_number(j, path, "source_inductance_h");
    if (b.source_inductance_h < 0.0) throw ValidationError("basis.source_inductance_h", "must be >= 0");
    if (j.contains("voltage_reference")) {
        const auto ref = detail::require_string(j, path, "voltage_reference");
        if (ref == "phase_to_neutral") {
            b.reference = VoltageReference::phase_to_neutral;
        } else if (ref == "line_to_line") {
            b.reference = VoltageReference::line_to_line;
        } else {
            throw ValidationError("basis.voltage_reference", "expected \"phase_to_neutral\" or \"line_to_line\"");
        }
    }
    return b;
}

RectifierLoad load_from_json(const json& j) {
    const std::string path = "load";
    detail::require_object(j, path);
    detail::reject_unknown_keys(j, path, {"dc_inductance_h", "load_resistance_ohm", "load_capacitance_f", "placement"});
    RectifierLoad l;
    l.dc_inductance_h = detail::require_positive(j, path, "dc_inductance_h");
    l.load_resistance_ohm = detail::require_positive(j, path, "load_resistance_ohm");
    l.load_capacitance_f = detail::require_positive(j, path, "load_capacitance_f");
    if (j.contains("placement")) {
        const auto placement = detail::require_string(j, path, "placement");
        if (placement == "ac_front_end") {
            l.placement = SmoothingPlacement::ac_front_end;
        } else if (placement == "dc_link") {
            l.placement = SmoothingPlacement::dc_link;
        } else {
            throw ValidationError("load.placement", "expected \"ac_front_end\" or \"dc_link\"");
        }
    }
    return l;
}

SolverConfig solver_from_json(const json& j, double fundamental_hz) {
    const std::string path = "solver";
    detail::require_object(j, path);
    detail::reject_unknown_keys(j, path,
                                {"dt_s", "duration_s", "diode_on_ohm", "diode_off_ohm", "max_switch_iterations"});
    SolverConfig s;
    s.dt_s = detail::require_positive(j, path, "dt_s");
    s.duration_s = detail::require_positive(j, path, "duration_s");
    s.diode_on_ohm = detail::require_positive(j, path, "diode_on_ohm");
    s.diode_off_ohm = detail::require_positive(j, path, "diode_off_ohm");
    s.max_switch_iterations = detail::require_integer(j, path, "max_switch_iterations");
    if (s.duration_s < 10.0 / fundamental_hz * (1.0 - 1e-12)) {
        throw ValidationError("solver.duration_s", "must cover at least 10 fundamental periods");
    }
    if (s.diode_off_ohm / s.diode_on_ohm < 1e6) {
        throw ValidationError("solver.diode_off_ohm", "must be at least 1e6 times diode_on_ohm");
    }
    if (s.max_switch_iterations < 1) throw ValidationError("solver.max_switch_iterations", "must be >= 1");
    return s;
}

json require_member(const json& root, const char* key) {
    const auto it = root.find(key);
    if (it == root.end()) throw ValidationError(key, "missing required field");
    return *it;
}

}  // namespace

Scenario scenario_from_json(std::string_view text) {
    const json root = detail::parse_document(text);
    detail::require_object(root, "");
    detail::reject_unknown_keys(root, "", {"basis", "load", "bank", "solver"});
    Scenario s;
    s.basis = basis_from_json(require_member(root, "basis"));
    s.load = load_from_json(require_member(root, "load"));
    if (const auto it = root.find("bank"); it != root.end() && !it->is_null()) {
        s.bank = detail::bank_from_json(*it, "bank");
    }
    s.solver = solver_from_json(require_member(root, "solver"), s.basis.fundamental_hz);
    return s;
}

Scenario read_scenario(const std::string& path) { return scenario_from_json(read_text_file(path)); }

std::string scenario_to_json(const Scenario& s, int indent) {
    json root = json::object();
    root["basis"] = {
        {"fundamental_hz", s.basis.fundamental_hz},
        {"source_vrms", s.basis.source_vrms},
        {"source_inductance_h", s.basis.source_inductance_h},
        {"voltage_reference",
         s.basis.reference == VoltageReference::line_to_line ? "line_to_line" : "phase_to_neutral"},
    };
    root["load"] = {
        {"dc_inductance_h", s.load.dc_inductance_h},
        {"load_resistance_ohm", s.load.load_resistance_ohm},
        {"load_capacitance_f", s.load.load_capacitance_f},
        {"placement", s.load.placement == SmoothingPlacement::dc_link ? "dc_link" : "ac_front_end"},
    };
    if (s.bank) root["bank"] = detail::bank_to_json(*s.bank);
    root["solver"] = {
        {"dt_s", s.solver.dt_s},
        {"duration_s", s.solver.duration_s},
        {"diode_on_ohm", s.solver.diode_on_ohm},
        {"diode_off_ohm", s.solver.diode_off_ohm},
        {"max_switch_iterations", s.solver.max_switch_iterations},
    };
    return root.dump(indent);
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError(path, "cannot open file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error("failed writing '" + path + "'");
}

}  // namespace harmflow
