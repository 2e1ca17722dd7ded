#include "harmflow/analyzer.hpp"

#include "harmflow/error.hpp"
#include "harmflow/simulator.hpp"
#include "number_format.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

namespace harmflow {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan_s* p) const {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(p);
    }
};

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// Real-input DFT of the whole window.
std::vector<std::complex<double>> real_dft(std::span<const double> x) {
    const int n = static_cast<int>(x.size());
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * x.size())));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (x.size() / 2 + 1))));
    std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
    {
        std::lock_guard lock(planner_mutex());
        plan.reset(fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE));
    }
    if (!plan) throw Error("fftw: could not create a plan");
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan.get());
    std::vector<std::complex<double>> result(x.size() / 2 + 1);
    for (std::size_t k = 0; k < result.size(); ++k) result[k] = {out.get()[k][0], out.get()[k][1]};
    return result;
}

std::size_t window_periods(std::size_t n, double sample_rate_hz, double fundamental_hz, std::size_t& spp) {
    try {
        spp = samples_per_period(sample_rate_hz, fundamental_hz);
    } catch (const ConfigError& e) {
        throw WindowError(e.what());
    }
    if (n == 0 || n % spp != 0) {
        throw WindowError("window of " + std::to_string(n) + " samples is not a whole number of " +
                          std::to_string(spp) + "-sample periods");
    }
    return n / spp;
}

double rms(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x) sum += v * v;
    return std::sqrt(sum / static_cast<double>(x.size()));
}

}  // namespace

HarmonicSpectrum spectrum(std::span<const double> samples, double sample_rate_hz, double fundamental_hz,
                          int max_order) {
    if (max_order < 1) throw DomainError("max_order must be >= 1");
    std::size_t spp = 0;
    const std::size_t periods = window_periods(samples.size(), sample_rate_hz, fundamental_hz, spp);
    if (spp < 2 * static_cast<std::size_t>(max_order)) {
        throw DomainError("order " + std::to_string(max_order) + " exceeds Nyquist at " + std::to_string(spp) +
                          " samples per period");
    }

    const auto bins = real_dft(samples);
    const double n = static_cast<double>(samples.size());
    HarmonicSpectrum s;
    s.fundamental_hz = fundamental_hz;
    s.dc = bins[0].real() / n;
    for (int h = 1; h <= max_order; ++h) {
        const auto& x = bins[static_cast<std::size_t>(h) * periods];
        s.orders.push_back(h);
        // The Nyquist bin is real and unfolded; its RMS is |X| / N.
        const bool nyquist = 2 * static_cast<std::size_t>(h) * periods == samples.size();
        s.magnitudes.push_back(std::abs(x) * (nyquist ? 1.0 : std::numbers::sqrt2) / n);
        s.phases_rad.push_back(std::arg(x));
    }
    s.rms_total = rms(samples);
    s.thd = s.magnitudes[0] > 0.0 ? thd_of(s) : 0.0;
    return s;
}

double thd_of(const HarmonicSpectrum& s) {
    if (s.magnitudes.empty() || !(s.magnitudes[0] > 0.0)) throw DomainError("THD undefined for a zero fundamental");
    double sum = 0.0;
    for (std::size_t k = 1; k < s.magnitudes.size(); ++k) sum += s.magnitudes[k] * s.magnitudes[k];
    return std::sqrt(sum) / s.magnitudes[0];
}

PowerReport power_report(std::span<const double> v, std::span<const double> i, double sample_rate_hz,
                         double fundamental_hz) {
    if (v.size() != i.size()) throw DomainError("voltage and current windows differ in length");
    std::size_t spp = 0;
    window_periods(v.size(), sample_rate_hz, fundamental_hz, spp);

    PowerReport r;
    double p = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) p += v[k] * i[k];
    r.active_power_w = p / static_cast<double>(v.size());
    r.apparent_power_va = rms(v) * rms(i);
    if (!(r.apparent_power_va > 0.0)) throw DomainError("apparent power is zero");
    r.true_power_factor = r.active_power_w / r.apparent_power_va;

    const auto sv = spectrum(v, sample_rate_hz, fundamental_hz, 1);
    const auto si = spectrum(i, sample_rate_hz, fundamental_hz, 1);
    if (!(sv.magnitudes[0] > 0.0) || !(si.magnitudes[0] > 0.0)) {
        throw DomainError("displacement factor undefined without fundamental voltage and current");
    }
    r.displacement_power_factor = std::cos(sv.phases_rad[0] - si.phases_rad[0]);
    return r;
}

Ieee519Check ieee519_check(const HarmonicSpectrum& s, double thd_limit) {
    Ieee519Check c;
    c.thd = thd_of(s);
    c.limit = thd_limit;
    c.pass = c.thd < thd_limit;
    return c;
}

std::string spectrum_to_csv(const HarmonicSpectrum& s) {
    std::string out = "order,frequency_hz,magnitude_rms,phase_rad\n";
    auto row = [&out](int order, double f, double mag, double phase) {
        out += std::to_string(order);
        out += ',';
        detail::append_double(out, f);
        out += ',';
        detail::append_double(out, mag);
        out += ',';
        detail::append_double(out, phase);
        out += '\n';
    };
    row(0, 0.0, std::abs(s.dc), s.dc < 0.0 ? std::numbers::pi : 0.0);
    for (std::size_t k = 0; k < s.orders.size(); ++k) {
        row(s.orders[k], s.orders[k] * s.fundamental_hz, s.magnitudes[k], s.phases_rad[k]);
    }
    return out;
}

}  // namespace harmflow
