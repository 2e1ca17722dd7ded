#include "harmflow/filter_design.hpp"

#include "harmflow/error.hpp"
#include "json_support.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace harmflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

std::string range_warning(const char* kind, double q, QualityRange range) {
    std::ostringstream msg;
    msg << kind << " quality factor " << q << " is outside the recommended range [" << range.low << ", " << range.high
        << "]";
    return msg.str();
}

}  // namespace

double SystemBasis::phase_vrms() const noexcept {
    return reference == VoltageReference::line_to_line ? source_vrms / std::numbers::sqrt3 : source_vrms;
}

double SystemBasis::omega() const noexcept { return kTwoPi * fundamental_hz; }

void SystemBasis::validate() const {
    if (!(fundamental_hz > 0.0) || !std::isfinite(fundamental_hz)) throw DomainError("fundamental_hz must be > 0");
    if (!(source_vrms > 0.0) || !std::isfinite(source_vrms)) throw DomainError("source_vrms must be > 0");
    if (!(source_inductance_h >= 0.0) || !std::isfinite(source_inductance_h)) {
        throw DomainError("source_inductance_h must be >= 0");
    }
}

double SingleTunedFilter::resonant_hz() const noexcept {
    return 1.0 / (kTwoPi * std::sqrt(inductance_h * capacitance_f));
}

void SingleTunedFilter::validate() const {
    if (order < 2) throw DomainError("single-tuned order must be >= 2");
    require_positive(capacitance_f, "capacitance");
    require_positive(inductance_h, "inductance");
    require_positive(resistance_ohm, "resistance");
    require_positive(quality_factor, "quality factor");
}

void HighPassFilter::validate() const {
    require_positive(capacitance_f, "capacitance");
    require_positive(inductance_h, "inductance");
    require_positive(resistance_ohm, "resistance");
    require_positive(quality_factor, "quality factor");
    require_positive(corner_hz, "corner frequency");
}

FilterBank::FilterBank(double fundamental_hz, std::vector<FilterBranch> branches)
    : fundamental_hz_(fundamental_hz), branches_(std::move(branches)) {
    require_positive(fundamental_hz_, "fundamental_hz");
    int last_order = 0;
    double highest_tuned_hz = 0.0;
    int high_pass_count = 0;
    for (const auto& branch : branches_) {
        if (const auto* st = std::get_if<SingleTunedFilter>(&branch)) {
            st->validate();
            if (st->order <= last_order) throw DomainError("tuned orders must be strictly increasing");
            last_order = st->order;
            highest_tuned_hz = std::max(highest_tuned_hz, st->resonant_hz());
        } else {
            std::get<HighPassFilter>(branch).validate();
            ++high_pass_count;
        }
    }
    if (high_pass_count > 1) throw DomainError("a bank holds at most one high-pass branch");
    if (const auto hp = high_pass(); hp && !(hp->corner_hz > highest_tuned_hz)) {
        throw DomainError("high-pass corner must lie above the highest tuned frequency");
    }
}

std::vector<SingleTunedFilter> FilterBank::single_tuned() const {
    std::vector<SingleTunedFilter> out;
    for (const auto& branch : branches_) {
        if (const auto* st = std::get_if<SingleTunedFilter>(&branch)) out.push_back(*st);
    }
    return out;
}

std::optional<HighPassFilter> FilterBank::high_pass() const {
    for (const auto& branch : branches_) {
        if (const auto* hp = std::get_if<HighPassFilter>(&branch)) return *hp;
    }
    return std::nullopt;
}

double capacitive_reactance(double c_farads, double f_hz) {
    require_positive(c_farads, "capacitance");
    require_positive(f_hz, "frequency");
    return 1.0 / (kTwoPi * f_hz * c_farads);
}

double reactive_power_of_capacitor(double c_farads, double v_rms, double f_hz) {
    if (!(v_rms >= 0.0)) throw DomainError("voltage must be >= 0");
    return v_rms * v_rms / capacitive_reactance(c_farads, f_hz);
}

double reactive_power_of_capacitor(double c_farads, const SystemBasis& basis) {
    basis.validate();
    return reactive_power_of_capacitor(c_farads, basis.phase_vrms(), basis.fundamental_hz);
}

double capacitor_from_reactive_power(double q_var, const SystemBasis& basis) {
    require_positive(q_var, "reactive power");
    basis.validate();
    const double v = basis.phase_vrms();
    const double xc = v * v / q_var;
    return 1.0 / (basis.omega() * xc);
}

double tune_inductor(double c_farads, int order, const SystemBasis& basis) {
    require_positive(c_farads, "capacitance");
    if (order < 1) throw DomainError("harmonic order must be >= 1");
    basis.validate();
    const double w = basis.omega() * order;
    return 1.0 / (w * w * c_farads);
}

double resistor_from_quality(double l_henries, double c_farads, double q) {
    require_positive(l_henries, "inductance");
    require_positive(c_farads, "capacitance");
    require_positive(q, "quality factor");
    return std::sqrt(l_henries / c_farads) / q;
}

Designed<SingleTunedFilter> design_single_tuned(const SystemBasis& basis, int order, double c_farads, double q,
                                                QualityRange range) {
    if (order < 2) throw DomainError("single-tuned order must be >= 2");
    Designed<SingleTunedFilter> out{};
    auto& f = out.value;
    f.order = order;
    f.capacitance_f = c_farads;
    f.inductance_h = tune_inductor(c_farads, order, basis);
    f.resistance_ohm = resistor_from_quality(f.inductance_h, c_farads, q);
    f.quality_factor = q;
    if (!range.contains(q)) out.warnings.push_back(range_warning("single-tuned", q, range));
    return out;
}

Designed<HighPassFilter> design_high_pass(const SystemBasis& basis, double corner_hz, double c_farads, double q,
                                          QualityRange range) {
    basis.validate();
    require_positive(corner_hz, "corner frequency");
    require_positive(c_farads, "capacitance");
    require_positive(q, "quality factor");
    Designed<HighPassFilter> out{};
    auto& f = out.value;
    const double w = kTwoPi * corner_hz;
    f.capacitance_f = c_farads;
    f.inductance_h = 1.0 / (w * w * c_farads);
    f.resistance_ohm = q * w * f.inductance_h;
    f.quality_factor = q;
    f.corner_hz = corner_hz;
    if (!range.contains(q)) out.warnings.push_back(range_warning("high-pass", q, range));
    return out;
}

Designed<FilterBank> design_bank(const SystemBasis& basis, std::span<const int> orders, double c_per_branch,
                                 std::span<const double> st_q, std::optional<HighPassSpec> high_pass) {
    if (!orders.empty() && st_q.size() != 1 && st_q.size() != orders.size()) {
        throw DomainError("expected one single-tuned quality factor or one per order");
    }
    std::vector<FilterBranch> branches;
    std::vector<std::string> warnings;
    for (std::size_t k = 0; k < orders.size(); ++k) {
        auto d = design_single_tuned(basis, orders[k], c_per_branch, st_q.size() == 1 ? st_q[0] : st_q[k]);
        branches.emplace_back(d.value);
        warnings.insert(warnings.end(), d.warnings.begin(), d.warnings.end());
    }
    if (high_pass) {
        auto d = design_high_pass(basis, high_pass->corner_hz, c_per_branch, high_pass->q);
        branches.emplace_back(d.value);
        warnings.insert(warnings.end(), d.warnings.begin(), d.warnings.end());
    }
    return {FilterBank(basis.fundamental_hz, std::move(branches)), std::move(warnings)};
}

Designed<FilterBank> design_bank_six_pulse(const SystemBasis& basis, double c_per_branch,
                                           std::span<const double> st_q, double hp_corner_hz, double hp_q) {
    return design_bank(basis, kSixPulseOrders, c_per_branch, st_q, HighPassSpec{hp_corner_hz, hp_q});
}

std::string to_json(const FilterBank& bank, int indent) { return detail::bank_to_json(bank).dump(indent); }

FilterBank filter_bank_from_json(std::string_view text) {
    return detail::bank_from_json(detail::parse_document(text), "");
}

}  // namespace harmflow
