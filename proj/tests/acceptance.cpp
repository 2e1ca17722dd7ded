// Acceptance report: one PASS/FAIL line per criterion. `--only <name>` runs a single criterion.
#include "fixtures.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace harmflow;
namespace frozen = oracle::frozen;

namespace {

// Pinned tolerances.
constexpr double kHpQualityLow = 2.9;
constexpr double kHpQualityHigh = 3.1;
constexpr double kHpCornerHz = 858.0;
constexpr double kHpCornerTolHz = 1.0;
constexpr double kBaselineThdTarget = 0.2077;
constexpr double kBaselineThdBand = 0.03;
constexpr double kFilteredThdLimit = 0.05;
constexpr double kFilteredThdTarget = 0.0432;
constexpr double kFilteredThdBand = 0.015;
constexpr double kRuntimeLimitS = 10.0;
constexpr double kNonCharacteristicLimit = 0.01;
constexpr double kDpfTarget = 0.95;
constexpr double kOracleTol = 1e-9;
constexpr double kResonanceTol = 1e-9;
constexpr double kRoundTripTol = 1e-12;
constexpr double kEnergyTol = 1e-3;
constexpr double kShrinkLow = 3.0;
constexpr double kShrinkHigh = 5.0;
constexpr double kKclTol = 1e-6;
constexpr double kThdGridTol = 1e-3;
constexpr double kSymmetryTol = 5e-3;
constexpr double kGridStepHz = 1.0;

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Timed {
    WaveformSet w;
    double seconds;
};

Timed timed_run(const Scenario& s) {
    const auto t0 = std::chrono::steady_clock::now();
    WaveformSet w = run(s);
    return {std::move(w), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

std::span<const double> window_of(const WaveformSet& w, const std::string& ch, std::size_t cycles = 5) {
    const auto win = steady_state_window(w, fixture::table1_basis(), cycles);
    return std::span(w.channel(ch)).subspan(win.begin, win.size());
}

HarmonicSpectrum phase_a_spectrum(const WaveformSet& w) {
    return spectrum(window_of(w, "i_src_a"), w.sample_rate_hz(), 50.0);
}

PowerReport phase_a_power(const WaveformSet& w) {
    return power_report(window_of(w, "v_src_a"), window_of(w, "i_src_a"), w.sample_rate_hz(), 50.0);
}

Scenario with_bank(const FilterBank& bank) {
    Scenario s = fixture::baseline_scenario();
    s.bank = bank;
    return s;
}

// ---------------------------------------------------------------- criteria

Outcome table2_inductors() {
    bool ok = true;
    std::string detail;
    for (int i = 0; i < 4; ++i) {
        const double l = tune_inductor(fixture::kTable2C, kSixPulseOrders[i], fixture::table1_basis());
        const double shown = oracle::truncate(l, 4);
        ok = ok && shown == frozen::kPrintedL[i] && std::abs(l - frozen::kTunedL[i]) <= 1e-12 * l;
        detail += fmt("h%d %.6f->%.4f (table %.4f) ", kSixPulseOrders[i], l, shown, frozen::kPrintedL[i]);
    }
    return {ok, detail};
}

Outcome high_pass_consistency() {
    const double l = frozen::kPrintedHpL;
    const double c = fixture::kTable2C;
    const double corner = 1.0 / (2.0 * std::numbers::pi * std::sqrt(l * c));
    const double q = frozen::kPrintedHpR / (2.0 * std::numbers::pi * corner * l);
    const bool ok = q >= kHpQualityLow && q <= kHpQualityHigh && std::abs(corner - kHpCornerHz) <= kHpCornerTolHz &&
                    kHighPassQualityRange.contains(q);
    return {ok, fmt("corner %.2f Hz, q %.4f", corner, q)};
}

Outcome baseline_thd() {
    const auto r = timed_run(fixture::baseline_scenario());
    const double thd = phase_a_spectrum(r.w).thd;
    const bool ok = std::abs(thd - kBaselineThdTarget) <= kBaselineThdBand && r.seconds < kRuntimeLimitS;
    return {ok, fmt("THD %.2f %% (target 20.77 +/- 3), %.2f s", 100.0 * thd, r.seconds)};
}

Outcome filtered_thd() {
    bool ok = true;
    std::string detail;
    for (const auto& [label, bank] : {std::pair{"designed", fixture::designed_bank()},
                                      std::pair{"printed", fixture::printed_bank()}}) {
        const auto r = timed_run(with_bank(bank));
        const double thd = phase_a_spectrum(r.w).thd;
        ok = ok && thd < kFilteredThdLimit && std::abs(thd - kFilteredThdTarget) <= kFilteredThdBand &&
             r.seconds < kRuntimeLimitS;
        detail += fmt("%s bank THD %.3f %% (%.2f s) ", label, 100.0 * thd, r.seconds);
    }
    const double settled = phase_a_spectrum(fixture::settled_filtered_run()).thd;
    detail += fmt("[designed bank after %.1f s: %.3f %%] ", fixture::kSettledDuration, 100.0 * settled);
    return {ok, detail + "(limit 5, target 4.32 +/- 1.5)"};
}

Outcome spectral_shape() {
    const auto s = phase_a_spectrum(fixture::baseline_run());
    std::vector<int> orders;
    for (int h = 2; h <= s.max_order(); ++h) orders.push_back(h);
    std::sort(orders.begin(), orders.end(), [&](int a, int b) { return s.magnitude(a) > s.magnitude(b); });
    const bool top_two = (orders[0] == 5 && orders[1] == 7) || (orders[0] == 7 && orders[1] == 5);
    double worst = 0.0;
    int worst_order = 0;
    for (int h = 2; h <= s.max_order(); ++h) {
        if (h % 2 != 0 && h % 3 != 0) continue;
        const double ratio = s.magnitude(h) / s.magnitude(1);
        if (ratio > worst) {
            worst = ratio;
            worst_order = h;
        }
    }
    return {top_two && worst < kNonCharacteristicLimit,
            fmt("largest h%d %.2f %%, h%d %.2f %%; worst even/triplen h%d %.2e %%", orders[0],
                100.0 * s.magnitude(orders[0]) / s.magnitude(1), orders[1],
                100.0 * s.magnitude(orders[1]) / s.magnitude(1), worst_order, 100.0 * worst)};
}

Outcome power_factor() {
    const auto base = phase_a_power(fixture::baseline_run());
    bool ok = true;
    std::string detail = fmt("baseline DPF %.4f PF %.4f; ", base.displacement_power_factor, base.true_power_factor);
    for (const auto& [label, bank] : {std::pair{"designed", fixture::designed_bank()},
                                      std::pair{"printed", fixture::printed_bank()}}) {
        const auto p = phase_a_power(run(with_bank(bank)));
        ok = ok && p.displacement_power_factor >= kDpfTarget &&
             p.displacement_power_factor > base.displacement_power_factor;
        detail += fmt("%s bank DPF %.4f PF %.4f; ", label, p.displacement_power_factor, p.true_power_factor);
    }
    return {ok, detail + "(need DPF >= 0.95 and above baseline)"};
}

double max_kcl_ratio(const WaveformSet& w) {
    double worst = 0.0;
    for (const char* ph : {"a", "b", "c"}) {
        const auto& src = w.channel(std::string("i_src_") + ph);
        const auto& flt = w.channel(std::string("i_filter_") + ph);
        const auto& brg = w.channel(std::string("i_bridge_") + ph);
        double peak = 0.0;
        double residual = 0.0;
        for (std::size_t k = 0; k < src.size(); ++k) {
            peak = std::max(peak, std::abs(src[k]));
            residual = std::max(residual, std::abs(src[k] - flt[k] - brg[k]));
        }
        worst = std::max(worst, residual / peak);
    }
    return worst;
}

double rms(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s / static_cast<double>(x.size()));
}

Outcome property_suite() {
    std::vector<std::string> failed;
    std::string detail;
    auto check = [&](const char* name, bool ok, const std::string& value) {
        if (!ok) failed.push_back(name);
        detail += fmt("%s %s; ", name, value.c_str());
    };

    // Spectrum against direct correlation.
    {
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> amp(0.01, 1.0);
        std::uniform_real_distribution<double> ph(-std::numbers::pi, std::numbers::pi);
        const double fs = 1e5;
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(2000, amp(rng));
            for (int h = 1; h <= 50; ++h) {
                const double a = amp(rng) * std::numbers::sqrt2;
                const double p = ph(rng);
                for (std::size_t k = 0; k < x.size(); ++k) {
                    x[k] += a * std::cos(2.0 * std::numbers::pi * h * 50.0 * static_cast<double>(k) / fs + p);
                }
            }
            const auto s = spectrum(x, fs, 50.0);
            const auto ref = oracle::correlate(x, fs, 50.0, 50);
            for (int h = 1; h <= 50; ++h) {
                const auto& r = ref[static_cast<std::size_t>(h - 1)];
                worst = std::max(worst, std::abs(s.magnitude(h) - r.rms) / r.rms);
            }
        }
        check("dft_oracle", worst <= kOracleTol, fmt("%.1e", worst));
    }
    // |Z| = R at the tuned frequency.
    {
        double worst = 0.0;
        for (const auto& f : fixture::designed_bank().single_tuned()) {
            worst = std::max(worst, std::abs(std::abs(st_impedance(f, f.resonant_hz())) - f.resistance_ohm) /
                                        f.resistance_ohm);
        }
        check("tuned_impedance", worst <= kResonanceTol, fmt("%.1e", worst));
    }
    // Capacitor / VAR round trip.
    {
        std::mt19937_64 rng(103);
        std::uniform_real_distribution<double> e(std::log(1e-9), std::log(1e-2));
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const double c = std::exp(e(rng));
            const auto basis = fixture::table1_basis();
            worst = std::max(worst, std::abs(capacitor_from_reactive_power(reactive_power_of_capacitor(c, basis), basis) - c) / c);
        }
        check("var_round_trip", worst <= kRoundTripTol, fmt("%.1e", worst));
    }
    // Energy audit, KCL, THD grid independence.
    for (bool banked : {false, true}) {
        Scenario s = banked ? fixture::filtered_scenario() : fixture::baseline_scenario();
        const char* tag = banked ? "filtered" : "baseline";
        std::vector<double> imbalance;
        std::vector<double> thd;
        double kcl = 0.0;
        for (double dt : {1e-5, 5e-6, 2.5e-6}) {
            s.solver.dt_s = dt;
            const auto w = run(s);
            imbalance.push_back(std::abs(energy_audit(w, s, steady_state_window(w, s.basis, 5)).relative_imbalance));
            thd.push_back(phase_a_spectrum(w).thd);
            kcl = std::max(kcl, max_kcl_ratio(w));
        }
        const double r1 = imbalance[0] / imbalance[1];
        const double r2 = imbalance[1] / imbalance[2];
        const bool shrink = r1 >= kShrinkLow && r1 <= kShrinkHigh && r2 >= kShrinkLow && r2 <= kShrinkHigh;
        check(fmt("energy_%s", tag).c_str(), imbalance[0] < kEnergyTol && shrink,
              fmt("%.2e, shrink %.2fx %.2fx", imbalance[0], r1, r2));
        check(fmt("kcl_%s", tag).c_str(), kcl < kKclTol, fmt("%.1e", kcl));
        check(fmt("thd_dt_%s", tag).c_str(), std::abs(thd[0] - thd[1]) < kThdGridTol,
              fmt("%.4f pp", 100.0 * std::abs(thd[0] - thd[1])));
    }
    // Three-phase shift symmetry at 2400 samples per period.
    for (bool banked : {false, true}) {
        Scenario s = banked ? fixture::filtered_scenario() : fixture::baseline_scenario();
        s.solver.dt_s = 1.0 / 120000.0;
        s.solver.duration_s = fixture::kSettledDuration;
        const auto w = run(s);
        const auto win = steady_state_window(w, s.basis, 3);
        const std::size_t third = 800;
        const auto& a = w.channel("i_src_a");
        const auto& b = w.channel("i_src_b");
        const auto& c = w.channel("i_src_c");
        std::vector<double> ref;
        std::vector<double> db;
        std::vector<double> dc;
        for (std::size_t k = win.begin; k < win.end; ++k) {
            ref.push_back(a[k]);
            db.push_back(b[k] - a[k - third]);
            dc.push_back(c[k] - a[k - 2 * third]);
        }
        const double worst = std::max(rms(db), rms(dc)) / rms(ref);
        check(banked ? "symmetry_filtered" : "symmetry_baseline", worst < kSymmetryTol, fmt("%.1e", worst));
    }
    if (!failed.empty()) {
        std::string names;
        for (const auto& f : failed) names += f + " ";
        detail = "failed: " + names + "| " + detail;
    }
    return {failed.empty(), detail};
}

Outcome frequency_scan() {
    const auto bank = fixture::designed_bank();
    const auto no_source = find_resonances(scan(bank, 0.0, 50.0, 1000.0, 951));
    bool ok = true;
    std::string detail = "series";
    for (int h : kSixPulseOrders) {
        const double target = 50.0 * h;
        double nearest = 0.0;
        for (double f : no_source.series_resonances_hz) {
            if (nearest == 0.0 || std::abs(f - target) < std::abs(nearest - target)) nearest = f;
        }
        ok = ok && nearest != 0.0 && std::abs(nearest - target) <= kGridStepHz;
        detail += fmt(" %.0f", nearest);
    }
    const auto with_source = find_resonances(scan(bank, 0.0016, 50.0, 1000.0, 951));
    const bool below = !with_source.parallel_resonances_hz.empty() && with_source.parallel_resonances_hz.front() < 250.0;
    ok = ok && below;
    detail += fmt("; first parallel with Ls %.0f Hz", below ? with_source.parallel_resonances_hz.front() : 0.0);
    const auto printed = find_resonances(scan(fixture::printed_bank(), 0.0, 50.0, 1000.0, 951));
    detail += "; printed-L bank series";
    for (double f : printed.series_resonances_hz) detail += fmt(" %.0f", f);
    return {ok, detail};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> check;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {"table2_inductors", table2_inductors},
        {"high_pass_consistency", high_pass_consistency},
        {"baseline_thd", baseline_thd},
        {"filtered_thd", filtered_thd},
        {"spectral_shape", spectral_shape},
        {"power_factor", power_factor},
        {"property_suite", property_suite},
        {"frequency_scan", frequency_scan},
    };
    std::string only;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--only" && i + 1 < argc) {
            only = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--only <criterion>]\n");
            return 2;
        }
    }
    int failures = 0;
    int ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.name) continue;
        ++ran;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
        if (!o.pass) ++failures;
    }
    if (ran == 0) {
        std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
        return 2;
    }
    return failures == 0 ? 0 : 1;
}
