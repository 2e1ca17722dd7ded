#pragma once

#include "harmflow/filter_design.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace harmflow {

enum class SmoothingPlacement {
    ac_front_end,    // one inductor per phase between the PCC and the bridge
    dc_link,         // one inductor between the bridge and the DC capacitor
};

// Six-pulse diode bridge feeding a capacitor in parallel with a resistor through the rectifier
// smoothing inductance. Defaults are the reference industrial load.
struct RectifierLoad {
    double dc_inductance_h = 0.023;
    SmoothingPlacement placement = SmoothingPlacement::ac_front_end;
    double load_resistance_ohm = 78.0;
    double load_capacitance_f = 50e-6;

    void validate() const;
};

struct SolverConfig {
    double dt_s = 1e-5;
    double duration_s = 0.5;
    double diode_on_ohm = 1e-3;
    double diode_off_ohm = 1e6;
    int max_switch_iterations = 10;

    // Needs the fundamental to check the ten-period minimum duration.
    void validate(double fundamental_hz) const;
    std::size_t sample_count() const;
};

struct Scenario {
    SystemBasis basis;
    RectifierLoad load;
    std::optional<FilterBank> bank;
    SolverConfig solver;

    // As SystemBasis::validate, except that source_vrms may be 0.
    void validate() const;
};

// Per-sample power and stored-energy totals used by energy_audit. Present only on simulator output.
struct EnergyTrace {
    std::vector<double> source_power_w;
    std::vector<double> load_dissipation_w;
    std::vector<double> filter_dissipation_w;
    std::vector<double> diode_dissipation_w;
    std::vector<double> stored_energy_j;
};

struct RunMetadata {
    double dt_s = 0.0;
    double duration_s = 0.0;
    std::size_t steps = 0;
    std::vector<std::size_t> unconverged_steps;
    std::size_t factorizations = 0;
};

// Fixed-rate multichannel record. Sample k is taken at time start_time_s + k / sample_rate_hz.
class WaveformSet {
public:
    WaveformSet() = default;
    WaveformSet(double sample_rate_hz, double start_time_s);

    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    double start_time_s() const noexcept { return start_time_s_; }
    double time_of(std::size_t sample) const noexcept;
    std::size_t size() const noexcept { return channels_.empty() ? 0 : channels_.front().size(); }

    const std::vector<std::string>& channel_names() const noexcept { return names_; }
    bool has_channel(std::string_view name) const noexcept;
    // Throws DomainError listing the available channels.
    const std::vector<double>& channel(std::string_view name) const;

    // Appends a channel; all channels must end up the same length.
    void add_channel(std::string name, std::vector<double> samples);

    RunMetadata metadata;
    std::optional<EnergyTrace> energy;

private:
    double sample_rate_hz_ = 0.0;
    double start_time_s_ = 0.0;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> channels_;
};

// Channel ids written by run(), in export order.
const std::vector<std::string>& standard_channels();

// Simulates the source, optional shunt bank and diode bridge. Samples are recorded at
// t = dt, 2 dt, ..., duration. Throws SolverError on a singular step.
WaveformSet run(const Scenario& scenario);

struct SampleRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const noexcept { return end - begin; }
    friend bool operator==(const SampleRange&, const SampleRange&) = default;
};

// Samples per fundamental period; ConfigError unless it is an integer.
std::size_t samples_per_period(double sample_rate_hz, double fundamental_hz);

// The last n_cycles whole fundamental periods of the record.
SampleRange steady_state_window(const WaveformSet& w, const SystemBasis& basis, std::size_t n_cycles);

struct EnergyAudit {
    double source_j = 0.0;
    double load_dissipation_j = 0.0;
    double filter_dissipation_j = 0.0;
    double diode_dissipation_j = 0.0;
    double stored_change_j = 0.0;
    // source - dissipation - stored change
    double imbalance_j = 0.0;
    double relative_imbalance = 0.0;
};

// Energy balance over the time span covered by `window` (the interval ending at each sample in it).
EnergyAudit energy_audit(const WaveformSet& w, const Scenario& scenario, SampleRange window);

// CSV with a leading t_s column, one column per channel, full round-trip precision.
std::string waveform_to_csv(const WaveformSet& w);
void write_waveform_csv(const WaveformSet& w, const std::string& path);
// Reads CSV written by waveform_to_csv. Throws ValidationError on malformed input.
WaveformSet waveform_from_csv(std::string_view text);
WaveformSet read_waveform_csv(const std::string& path);

}  // namespace harmflow
