#include "harmflow/simulator.hpp"

#include "harmflow/circuit.hpp"
#include "harmflow/error.hpp"
#include "number_format.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace harmflow {

void RectifierLoad::validate() const {
    if (!(dc_inductance_h > 0.0)) throw DomainError("dc_inductance_h must be > 0");
    if (!(load_resistance_ohm > 0.0)) throw DomainError("load_resistance_ohm must be > 0");
    if (!(load_capacitance_f > 0.0)) throw DomainError("load_capacitance_f must be > 0");
}

void SolverConfig::validate(double fundamental_hz) const {
    if (!(dt_s > 0.0)) throw DomainError("dt_s must be > 0");
    if (!(duration_s >= 10.0 / fundamental_hz * (1.0 - 1e-12))) {
        throw DomainError("duration_s must cover at least 10 fundamental periods");
    }
    if (!(diode_on_ohm > 0.0)) throw DomainError("diode_on_ohm must be > 0");
    if (!(diode_off_ohm / diode_on_ohm >= 1e6)) throw DomainError("diode_off_ohm / diode_on_ohm must be >= 1e6");
    if (max_switch_iterations < 1) throw DomainError("max_switch_iterations must be >= 1");
}

std::size_t SolverConfig::sample_count() const {
    return static_cast<std::size_t>(std::llround(duration_s / dt_s));
}

void Scenario::validate() const {
    // source_vrms == 0 is accepted: an unexcited run.
    SystemBasis excited = basis;
    if (excited.source_vrms == 0.0) excited.source_vrms = 1.0;
    excited.validate();
    load.validate();
    solver.validate(basis.fundamental_hz);
}

WaveformSet::WaveformSet(double sample_rate_hz, double start_time_s)
    : sample_rate_hz_(sample_rate_hz), start_time_s_(start_time_s) {
    if (!(sample_rate_hz > 0.0)) throw DomainError("sample rate must be > 0");
}

double WaveformSet::time_of(std::size_t sample) const noexcept {
    return start_time_s_ + static_cast<double>(sample) / sample_rate_hz_;
}

bool WaveformSet::has_channel(std::string_view name) const noexcept {
    for (const auto& n : names_) {
        if (n == name) return true;
    }
    return false;
}

const std::vector<double>& WaveformSet::channel(std::string_view name) const {
    for (std::size_t k = 0; k < names_.size(); ++k) {
        if (names_[k] == name) return channels_[k];
    }
    std::string available;
    for (const auto& n : names_) available += (available.empty() ? "" : ", ") + n;
    throw DomainError("unknown channel '" + std::string(name) + "'; available: " + available);
}

void WaveformSet::add_channel(std::string name, std::vector<double> samples) {
    if (has_channel(name)) throw DomainError("duplicate channel '" + name + "'");
    if (!channels_.empty() && samples.size() != channels_.front().size()) {
        throw DomainError("channel '" + name + "' length differs from existing channels");
    }
    names_.push_back(std::move(name));
    channels_.push_back(std::move(samples));
}

const std::vector<std::string>& standard_channels() {
    static const std::vector<std::string> names = {
        "v_src_a",    "v_src_b",    "v_src_c",    "v_pcc_a",    "v_pcc_b",    "v_pcc_c",
        "i_src_a",    "i_src_b",    "i_src_c",    "i_bridge_a", "i_bridge_b", "i_bridge_c",
        "i_filter_a", "i_filter_b", "i_filter_c", "v_dc",       "i_dc",
    };
    return names;
}

namespace {

// Element indices of one phase's shunt branch inside the circuit.
struct BranchHandles {
    bool single_tuned = true;
    std::size_t resistor = 0;   // series R (single tuned) or damping R (high pass)
    std::size_t inductor = 0;
    std::size_t capacitor = 0;  // the PCC-side element of a high-pass branch
};

struct Plant {
    Circuit circuit;
    std::array<Circuit::Node, 3> pcc{};
    std::array<std::size_t, 3> source{};
    std::array<std::optional<std::size_t>, 3> line_inductor{};
    std::array<std::size_t, 3> upper_diode{};
    std::array<std::size_t, 3> lower_diode{};
    std::array<std::vector<BranchHandles>, 3> branches;
    Circuit::Node dc_pos = 0;
    Circuit::Node dc_neg = 0;
    Circuit::Node dc_load = 0;
    std::optional<std::size_t> dc_inductor;
    std::array<std::optional<std::size_t>, 3> front_inductor{};
    std::size_t dc_capacitor = 0;
    std::size_t load_resistor = 0;
};

Plant build_plant(const Scenario& s) {
    Plant p;
    auto& c = p.circuit;
    const double peak = std::numbers::sqrt2 * s.basis.phase_vrms();
    const double w = s.basis.omega();
    constexpr std::array<const char*, 3> phase = {"a", "b", "c"};

    p.dc_pos = c.add_node("dc_pos");
    p.dc_neg = c.add_node("dc_neg");
    if (s.load.placement == SmoothingPlacement::dc_link) p.dc_load = c.add_node("dc_load");

    for (std::size_t k = 0; k < 3; ++k) {
        const double shift = -2.0 * std::numbers::pi / 3.0 * static_cast<double>(k);
        auto wave = [peak, w, shift](double t) { return peak * std::sin(w * t + shift); };
        p.pcc[k] = c.add_node(std::string("pcc_") + phase[k]);
        if (s.basis.source_inductance_h > 0.0) {
            const auto src = c.add_node(std::string("src_") + phase[k]);
            p.source[k] = c.add_voltage_source(src, Circuit::ground, wave);
            p.line_inductor[k] = c.add_inductor(src, p.pcc[k], s.basis.source_inductance_h);
        } else {
            p.source[k] = c.add_voltage_source(p.pcc[k], Circuit::ground, wave);
        }

        if (s.bank) {
            for (const auto& branch : s.bank->branches()) {
                BranchHandles h;
                const std::string tag = std::string("_") + phase[k] + std::to_string(p.branches[k].size());
                if (const auto* st = std::get_if<SingleTunedFilter>(&branch)) {
                    const auto n1 = c.add_node("st_rl" + tag);
                    const auto n2 = c.add_node("st_lc" + tag);
                    h.resistor = c.add_resistor(p.pcc[k], n1, st->resistance_ohm);
                    h.inductor = c.add_inductor(n1, n2, st->inductance_h);
                    h.capacitor = c.add_capacitor(n2, Circuit::ground, st->capacitance_f);
                } else {
                    const auto& hp = std::get<HighPassFilter>(branch);
                    h.single_tuned = false;
                    const auto n1 = c.add_node("hp_c" + tag);
                    h.capacitor = c.add_capacitor(p.pcc[k], n1, hp.capacitance_f);
                    h.resistor = c.add_resistor(n1, Circuit::ground, hp.resistance_ohm);
                    h.inductor = c.add_inductor(n1, Circuit::ground, hp.inductance_h);
                }
                p.branches[k].push_back(h);
            }
        }

        Circuit::Node bridge_in = p.pcc[k];
        if (s.load.placement == SmoothingPlacement::ac_front_end) {
            bridge_in = c.add_node(std::string("bridge_") + phase[k]);
            p.front_inductor[k] = c.add_inductor(p.pcc[k], bridge_in, s.load.dc_inductance_h);
        }
        p.upper_diode[k] = c.add_diode(bridge_in, p.dc_pos, s.solver.diode_on_ohm, s.solver.diode_off_ohm);
        p.lower_diode[k] = c.add_diode(p.dc_neg, bridge_in, s.solver.diode_on_ohm, s.solver.diode_off_ohm);
    }

    if (s.load.placement == SmoothingPlacement::dc_link) {
        p.dc_inductor = c.add_inductor(p.dc_pos, p.dc_load, s.load.dc_inductance_h);
    } else {
        p.dc_load = p.dc_pos;
    }
    p.dc_capacitor = c.add_capacitor(p.dc_load, p.dc_neg, s.load.load_capacitance_f);
    p.load_resistor = c.add_resistor(p.dc_load, p.dc_neg, s.load.load_resistance_ohm);
    return p;
}

}  // namespace

WaveformSet run(const Scenario& scenario) {
    scenario.validate();
    const Plant plant = build_plant(scenario);
    const auto& circuit = plant.circuit;
    TransientSolver solver(circuit, {.dt = scenario.solver.dt_s,
                                     .max_switch_iterations = scenario.solver.max_switch_iterations});

    const std::size_t n = scenario.solver.sample_count();
    const auto& names = standard_channels();
    std::vector<std::vector<double>> ch(names.size(), std::vector<double>(n));
    EnergyTrace energy;
    for (auto* v : {&energy.source_power_w, &energy.load_dissipation_w, &energy.filter_dissipation_w,
                    &energy.diode_dissipation_w, &energy.stored_energy_j}) {
        v->resize(n);
    }
    RunMetadata meta;
    meta.dt_s = scenario.solver.dt_s;
    meta.duration_s = scenario.solver.duration_s;

    for (std::size_t s = 0; s < n; ++s) {
        solver.step();
        if (solver.last_step_unconverged()) meta.unconverged_steps.push_back(s);

        double p_src = 0.0;
        double p_filter = 0.0;
        double p_diode = 0.0;
        for (std::size_t k = 0; k < 3; ++k) {
            const double vs = solver.source_value(plant.source[k]);
            const double is = solver.source_current(plant.source[k]);
            double i_filter = 0.0;
            for (const auto& h : plant.branches[k]) {
                i_filter += h.single_tuned ? solver.resistor_current(h.resistor) : solver.capacitor_current(h.capacitor);
                const double ir = solver.resistor_current(h.resistor);
                p_filter += ir * ir * circuit.resistors()[h.resistor].ohms;
            }
            const double iu = solver.diode_current(plant.upper_diode[k]);
            const double il = solver.diode_current(plant.lower_diode[k]);
            p_diode += iu * iu * solver.diode_resistance(plant.upper_diode[k]) +
                       il * il * solver.diode_resistance(plant.lower_diode[k]);
            p_src += vs * is;

            ch[0 + k][s] = vs;
            ch[3 + k][s] = solver.node_voltage(plant.pcc[k]);
            ch[6 + k][s] = is;
            ch[9 + k][s] = iu - il;
            ch[12 + k][s] = i_filter;
        }
        const double v_dc = solver.voltage(plant.dc_load, plant.dc_neg);
        ch[15][s] = v_dc;
        ch[16][s] = plant.dc_inductor ? solver.inductor_current(*plant.dc_inductor)
                                      : solver.diode_current(plant.upper_diode[0]) +
                                            solver.diode_current(plant.upper_diode[1]) +
                                            solver.diode_current(plant.upper_diode[2]);

        double stored = 0.0;
        for (std::size_t k = 0; k < circuit.inductors().size(); ++k) {
            const double i = solver.inductor_current(k);
            stored += 0.5 * circuit.inductors()[k].henries * i * i;
        }
        for (std::size_t k = 0; k < circuit.capacitors().size(); ++k) {
            const double v = solver.capacitor_voltage(k);
            stored += 0.5 * circuit.capacitors()[k].farads * v * v;
        }
        energy.source_power_w[s] = p_src;
        energy.load_dissipation_w[s] = v_dc * v_dc / scenario.load.load_resistance_ohm;
        energy.filter_dissipation_w[s] = p_filter;
        energy.diode_dissipation_w[s] = p_diode;
        energy.stored_energy_j[s] = stored;
    }

    meta.steps = solver.steps_taken();
    meta.factorizations = solver.factorizations();

    WaveformSet w(1.0 / scenario.solver.dt_s, scenario.solver.dt_s);
    for (std::size_t k = 0; k < names.size(); ++k) w.add_channel(names[k], std::move(ch[k]));
    w.metadata = std::move(meta);
    w.energy = std::move(energy);
    return w;
}

std::size_t samples_per_period(double sample_rate_hz, double fundamental_hz) {
    if (!(sample_rate_hz > 0.0) || !(fundamental_hz > 0.0)) {
        throw DomainError("sample rate and fundamental must be > 0");
    }
    const double spp = sample_rate_hz / fundamental_hz;
    const double rounded = std::round(spp);
    if (rounded < 1.0 || std::abs(spp - rounded) > 1e-9 * spp) {
        std::ostringstream msg;
        msg << "fundamental period spans " << spp << " samples; choose dt = T1/k for an integer k";
        throw ConfigError(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

SampleRange steady_state_window(const WaveformSet& w, const SystemBasis& basis, std::size_t n_cycles) {
    const std::size_t spp = samples_per_period(w.sample_rate_hz(), basis.fundamental_hz);
    if (n_cycles == 0) throw RangeError("window needs at least one cycle");
    if (w.size() < (n_cycles + 2) * spp) {
        throw RangeError("record of " + std::to_string(w.size()) + " samples cannot hold " + std::to_string(n_cycles) +
                         " steady-state cycles plus two lead-in cycles");
    }
    return {w.size() - n_cycles * spp, w.size()};
}

EnergyAudit energy_audit(const WaveformSet& w, const Scenario& scenario, SampleRange window) {
    if (!w.energy) throw DomainError("energy audit needs a simulator-produced record");
    if (window.begin == 0 || window.end > w.size() || window.begin >= window.end) {
        throw RangeError("audit window must lie inside the record and start after sample 0");
    }
    (void)scenario;
    const auto& e = *w.energy;
    const double dt = 1.0 / w.sample_rate_hz();
    auto integrate = [&](const std::vector<double>& p) {
        double sum = 0.0;
        for (std::size_t k = window.begin; k < window.end; ++k) sum += 0.5 * (p[k - 1] + p[k]) * dt;
        return sum;
    };
    EnergyAudit a;
    a.source_j = integrate(e.source_power_w);
    a.load_dissipation_j = integrate(e.load_dissipation_w);
    a.filter_dissipation_j = integrate(e.filter_dissipation_w);
    a.diode_dissipation_j = integrate(e.diode_dissipation_w);
    a.stored_change_j = e.stored_energy_j[window.end - 1] - e.stored_energy_j[window.begin - 1];
    a.imbalance_j =
        a.source_j - a.load_dissipation_j - a.filter_dissipation_j - a.diode_dissipation_j - a.stored_change_j;
    a.relative_imbalance = a.source_j != 0.0 ? a.imbalance_j / std::abs(a.source_j) : 0.0;
    return a;
}

std::string waveform_to_csv(const WaveformSet& w) {
    std::string out = "t_s";
    for (const auto& name : w.channel_names()) out += "," + name;
    out += "\n";
    std::vector<const std::vector<double>*> cols;
    for (const auto& name : w.channel_names()) cols.push_back(&w.channel(name));
    out.reserve(out.size() + w.size() * (cols.size() + 1) * 22);
    for (std::size_t s = 0; s < w.size(); ++s) {
        detail::append_double(out, w.time_of(s));
        for (const auto* c : cols) {
            out += ',';
            detail::append_double(out, (*c)[s]);
        }
        out += '\n';
    }
    return out;
}

void write_waveform_csv(const WaveformSet& w, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << waveform_to_csv(w);
    if (!f) throw Error("failed writing '" + path + "'");
}

WaveformSet waveform_from_csv(std::string_view text) {
    auto next_line = [&text](std::string_view& line) {
        if (text.empty()) return false;
        const auto pos = text.find('\n');
        line = text.substr(0, pos);
        text = pos == std::string_view::npos ? std::string_view{} : text.substr(pos + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return true;
    };
    auto split = [](std::string_view line) {
        std::vector<std::string_view> cells;
        std::size_t start = 0;
        while (true) {
            const auto pos = line.find(',', start);
            cells.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        return cells;
    };

    std::string_view line;
    if (!next_line(line)) throw ValidationError("", "empty waveform CSV");
    const auto header = split(line);
    if (header.empty() || header[0] != "t_s") throw ValidationError("header", "first column must be t_s");

    std::vector<double> t;
    std::vector<std::vector<double>> cols(header.size() - 1);
    std::size_t row = 1;
    while (next_line(line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw ValidationError("line " + std::to_string(row), "expected " + std::to_string(header.size()) + " fields");
        }
        double v = 0.0;
        for (std::size_t k = 0; k < cells.size(); ++k) {
            if (!detail::parse_double(cells[k], v)) {
                throw ValidationError("line " + std::to_string(row), "bad number '" + std::string(cells[k]) + "'");
            }
            if (k == 0) {
                t.push_back(v);
            } else {
                cols[k - 1].push_back(v);
            }
        }
    }
    if (t.size() < 2) throw ValidationError("", "waveform needs at least two samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(dt > 0.0)) throw ValidationError("t_s", "time must increase");
    WaveformSet w(1.0 / dt, t.front());
    for (std::size_t k = 1; k < header.size(); ++k) w.add_channel(std::string(header[k]), std::move(cols[k - 1]));
    return w;
}

WaveformSet read_waveform_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError(path, "cannot open file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return waveform_from_csv(ss.str());
}

}  // namespace harmflow
