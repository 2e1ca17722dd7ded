#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace harmflow {

enum class VoltageReference {
    phase_to_neutral,  // source_vrms is the per-phase (wye) RMS voltage
    line_to_line,      // source_vrms is the line-to-line RMS voltage
};

// Electrical context shared by filter design and simulation. Defaults are the 220 V / 1.6 mH
// supply of the reference industrial system at 50 Hz.
struct SystemBasis {
    double fundamental_hz = 50.0;
    double source_vrms = 220.0;
    double source_inductance_h = 0.0016;
    VoltageReference reference = VoltageReference::phase_to_neutral;

    // Per-phase RMS voltage seen by a wye-connected shunt branch.
    double phase_vrms() const noexcept;
    double omega() const noexcept;
    // Throws DomainError naming the offending field.
    void validate() const;
};

// Series R-L-C shunt branch tuned to one harmonic order.
struct SingleTunedFilter {
    int order = 0;
    double capacitance_f = 0.0;
    double inductance_h = 0.0;
    double resistance_ohm = 0.0;
    double quality_factor = 0.0;

    double resonant_hz() const noexcept;
    void validate() const;

    friend bool operator==(const SingleTunedFilter&, const SingleTunedFilter&) = default;
};

// Second-order high-pass branch: C in series with R parallel L.
struct HighPassFilter {
    double capacitance_f = 0.0;
    double inductance_h = 0.0;
    double resistance_ohm = 0.0;
    double quality_factor = 0.0;
    double corner_hz = 0.0;

    void validate() const;

    friend bool operator==(const HighPassFilter&, const HighPassFilter&) = default;
};

using FilterBranch = std::variant<SingleTunedFilter, HighPassFilter>;

// Shunt filter bank installed per phase at the point of common coupling.
//
// Tuned orders are strictly increasing and at most one high-pass branch is allowed, with its
// corner above the highest tuned resonance.
class FilterBank {
public:
    FilterBank(double fundamental_hz, std::vector<FilterBranch> branches);

    double fundamental_hz() const noexcept { return fundamental_hz_; }
    const std::vector<FilterBranch>& branches() const noexcept { return branches_; }
    std::size_t size() const noexcept { return branches_.size(); }
    bool empty() const noexcept { return branches_.empty(); }

    std::vector<SingleTunedFilter> single_tuned() const;
    std::optional<HighPassFilter> high_pass() const;

    friend bool operator==(const FilterBank&, const FilterBank&) = default;

private:
    double fundamental_hz_;
    std::vector<FilterBranch> branches_;
};

// Recommended tuning-sharpness window. Values outside produce a warning, never an error.
struct QualityRange {
    double low;
    double high;
    bool contains(double q) const noexcept { return q >= low && q <= high; }
};

inline constexpr QualityRange kSingleTunedQualityRange{20.0, 100.0};
inline constexpr QualityRange kHighPassQualityRange{0.5, 5.0};

template <class T>
struct Designed {
    T value;
    std::vector<std::string> warnings;
};

// Capacitive reactance 1 / (2 pi f C).
double capacitive_reactance(double c_farads, double f_hz);

// Reactive power V^2 / Xc of a capacitor at the basis phase voltage and fundamental.
double reactive_power_of_capacitor(double c_farads, const SystemBasis& basis);
// Same, for an explicit voltage (v_rms >= 0).
double reactive_power_of_capacitor(double c_farads, double v_rms, double f_hz);

// Capacitance that delivers `q_var` at the basis phase voltage; inverse of the above.
double capacitor_from_reactive_power(double q_var, const SystemBasis& basis);

// Inductance resonating with `c_farads` at order * fundamental.
double tune_inductor(double c_farads, int order, const SystemBasis& basis);

// Series resistance giving quality factor q = sqrt(L/C) / R.
double resistor_from_quality(double l_henries, double c_farads, double q);

Designed<SingleTunedFilter> design_single_tuned(const SystemBasis& basis, int order, double c_farads, double q,
                                                QualityRange range = kSingleTunedQualityRange);

Designed<HighPassFilter> design_high_pass(const SystemBasis& basis, double corner_hz, double c_farads, double q,
                                          QualityRange range = kHighPassQualityRange);

struct HighPassSpec {
    double corner_hz;
    double q;
};

// General bank: one single-tuned branch per order (q given once or per order), optional high pass.
Designed<FilterBank> design_bank(const SystemBasis& basis, std::span<const int> orders, double c_per_branch,
                                 std::span<const double> st_q, std::optional<HighPassSpec> high_pass);

// Characteristic six-pulse bank: single-tuned at 5, 7, 11, 13 plus one high-pass branch.
// `st_q` holds one shared value or one value per tuned order.
Designed<FilterBank> design_bank_six_pulse(const SystemBasis& basis, double c_per_branch,
                                           std::span<const double> st_q, double hp_corner_hz, double hp_q);

inline constexpr int kSixPulseOrders[] = {5, 7, 11, 13};

// JSON document: {"fundamental_hz", "branches": [{"kind", "order"|"corner_hz", "c_farads",
// "l_henries", "r_ohms", "q"}]}. Doubles are written in shortest round-trip form.
std::string to_json(const FilterBank& bank, int indent = 2);
// Throws ValidationError with a field path on malformed or inconsistent documents.
FilterBank filter_bank_from_json(std::string_view text);

}  // namespace harmflow
