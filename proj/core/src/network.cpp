#include "harmflow/network.hpp"

#include "harmflow/error.hpp"
#include "number_format.hpp"

#include <cmath>
#include <numbers>

namespace harmflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kJ{0.0, 1.0};

void require_frequency(double f_hz) {
    if (!(f_hz > 0.0) || !std::isfinite(f_hz)) throw DomainError("frequency must be positive and finite");
}

}  // namespace

void ImpedanceCurve::validate() const {
    if (frequencies_hz.size() < 2) throw DomainError("impedance curve needs at least two points");
    if (frequencies_hz.size() != impedances.size()) throw DomainError("frequency and impedance lists differ in length");
    if (!(frequencies_hz.front() > 0.0)) throw DomainError("frequencies must be positive");
    for (std::size_t k = 1; k < frequencies_hz.size(); ++k) {
        if (!(frequencies_hz[k] > frequencies_hz[k - 1])) throw DomainError("frequencies must be strictly increasing");
    }
}

Complex st_impedance(const SingleTunedFilter& filter, double f_hz) {
    require_frequency(f_hz);
    const double w = kTwoPi * f_hz;
    return {filter.resistance_ohm, w * filter.inductance_h - 1.0 / (w * filter.capacitance_f)};
}

Complex hp_impedance(const HighPassFilter& filter, double f_hz) {
    require_frequency(f_hz);
    const double w = kTwoPi * f_hz;
    const Complex zc = 1.0 / (kJ * w * filter.capacitance_f);
    const Complex y_parallel = 1.0 / filter.resistance_ohm + 1.0 / (kJ * w * filter.inductance_h);
    return zc + 1.0 / y_parallel;
}

Complex branch_impedance(const FilterBranch& branch, double f_hz) {
    if (const auto* st = std::get_if<SingleTunedFilter>(&branch)) return st_impedance(*st, f_hz);
    return hp_impedance(std::get<HighPassFilter>(branch), f_hz);
}

Complex bank_admittance(const FilterBank& bank, double f_hz) {
    if (bank.empty()) throw DomainError("filter bank is empty");
    Complex y{0.0, 0.0};
    for (const auto& branch : bank.branches()) y += 1.0 / branch_impedance(branch, f_hz);
    return y;
}

Complex bank_impedance(const FilterBank& bank, double f_hz) { return 1.0 / bank_admittance(bank, f_hz); }

ImpedanceCurve scan(const FilterBank& bank, double source_inductance_h, double f_start_hz, double f_end_hz,
                    std::size_t n_points) {
    if (!(f_start_hz > 0.0) || !(f_end_hz > f_start_hz) || !std::isfinite(f_end_hz)) {
        throw DomainError("scan range must satisfy 0 < f_start < f_end");
    }
    if (n_points < 2) throw DomainError("scan needs at least two points");
    if (!(source_inductance_h >= 0.0)) throw DomainError("source inductance must be >= 0");
    if (bank.empty() && source_inductance_h == 0.0) throw DomainError("nothing to scan: empty bank and no source");

    ImpedanceCurve curve;
    curve.frequencies_hz.reserve(n_points);
    curve.impedances.reserve(n_points);
    const double step = (f_end_hz - f_start_hz) / static_cast<double>(n_points - 1);
    for (std::size_t k = 0; k < n_points; ++k) {
        const double f = k + 1 == n_points ? f_end_hz : f_start_hz + step * static_cast<double>(k);
        Complex y = bank.empty() ? Complex{} : bank_admittance(bank, f);
        if (source_inductance_h > 0.0) y += 1.0 / (kJ * kTwoPi * f * source_inductance_h);
        curve.frequencies_hz.push_back(f);
        curve.impedances.push_back(bank.empty() || source_inductance_h > 0.0 ? 1.0 / y : bank_impedance(bank, f));
    }
    return curve;
}

ResonanceReport find_resonances(const ImpedanceCurve& curve) {
    curve.validate();
    const std::size_t n = curve.impedances.size();
    std::vector<double> mag(n);
    for (std::size_t k = 0; k < n; ++k) mag[k] = std::abs(curve.impedances[k]);

    ResonanceReport report;
    std::size_t k = 1;
    while (k + 1 < n) {
        std::size_t last = k;
        while (last + 1 < n && mag[last + 1] == mag[k]) ++last;
        if (last + 1 == n) break;
        const double left = mag[k - 1];
        const double right = mag[last + 1];
        if (mag[k] < left && mag[k] < right) {
            report.series_resonances_hz.push_back(curve.frequencies_hz[k]);
        } else if (mag[k] > left && mag[k] > right) {
            report.parallel_resonances_hz.push_back(curve.frequencies_hz[k]);
        }
        k = last + 1;
    }
    return report;
}

std::string impedance_curve_to_csv(const ImpedanceCurve& curve) {
    curve.validate();
    std::string out = "frequency_hz,re_ohms,im_ohms,abs_ohms\n";
    for (std::size_t k = 0; k < curve.frequencies_hz.size(); ++k) {
        const auto z = curve.impedances[k];
        detail::append_fixed(out, curve.frequencies_hz[k]);
        out += ',';
        detail::append_fixed(out, z.real());
        out += ',';
        detail::append_fixed(out, z.imag());
        out += ',';
        detail::append_fixed(out, std::abs(z));
        out += '\n';
    }
    return out;
}

}  // namespace harmflow
