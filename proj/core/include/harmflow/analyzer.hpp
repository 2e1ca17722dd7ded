#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace harmflow {

inline constexpr int kDefaultMaxOrder = 50;
inline constexpr double kIeee519ThdLimit = 0.05;

// Harmonic content of one channel over a synchronous window.
struct HarmonicSpectrum {
    double fundamental_hz = 0.0;
    std::vector<int> orders;          // 1..H
    std::vector<double> magnitudes;   // RMS, same unit as the input
    std::vector<double> phases_rad;   // cosine reference, relative to the first sample
    double dc = 0.0;                  // mean value, excluded from THD
    double thd = 0.0;                 // 0 when the fundamental is zero
    double rms_total = 0.0;

    double magnitude(int order) const { return magnitudes.at(static_cast<std::size_t>(order - 1)); }
    double phase(int order) const { return phases_rad.at(static_cast<std::size_t>(order - 1)); }
    int max_order() const noexcept { return static_cast<int>(orders.size()); }
};

// Fourier coefficients at h * f1, h = 1..max_order, over a window holding an integer number of
// fundamental periods (WindowError otherwise). DomainError if a period holds fewer than
// 2 * max_order samples.
HarmonicSpectrum spectrum(std::span<const double> samples, double sample_rate_hz, double fundamental_hz,
                          int max_order = kDefaultMaxOrder);

// sqrt(sum_{h>=2} mag_h^2) / mag_1. DomainError on a zero fundamental.
double thd_of(const HarmonicSpectrum& s);

struct PowerReport {
    double active_power_w = 0.0;
    double apparent_power_va = 0.0;
    double true_power_factor = 0.0;
    double displacement_power_factor = 0.0;
};

// P = mean(v i), S = rms(v) rms(i), displacement factor from the fundamental phasors.
PowerReport power_report(std::span<const double> v, std::span<const double> i, double sample_rate_hz,
                         double fundamental_hz);

struct Ieee519Check {
    double thd = 0.0;
    double limit = kIeee519ThdLimit;
    bool pass = false;
};

// Passes only when THD is strictly below the limit.
Ieee519Check ieee519_check(const HarmonicSpectrum& s, double thd_limit = kIeee519ThdLimit);

// Rows: order,frequency_hz,magnitude_rms,phase_rad. Order 0 carries the DC level.
std::string spectrum_to_csv(const HarmonicSpectrum& s);

struct SpectrumSeries {
    std::string label;
    const HarmonicSpectrum* spectrum;
};

// Bar chart of magnitude per order, each series normalized to its own fundamental (= 100 %).
// Several series are drawn side by side within each order.
std::string spectrum_svg(std::span<const SpectrumSeries> series, const std::string& title);

}  // namespace harmflow
