#include "cli.hpp"

#include "harmflow/harmflow.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

namespace harmflow::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

// Human-facing numbers carry four significant figures.
std::string sig4(double v) {
    std::ostringstream s;
    s << std::setprecision(4) << v;
    return s.str();
}

std::string with_suffix(const std::string& prefix, const std::string& suffix) { return prefix + suffix; }

std::span<const double> window_of(const std::vector<double>& samples, SampleRange r) {
    return std::span<const double>(samples).subspan(r.begin, r.size());
}

// ---------------------------------------------------------------- design

struct DesignArgs {
    double c = 0.0;
    double f1 = 50.0;
    double vrms = 220.0;
    bool line_to_line = false;
    std::vector<int> orders{5, 7, 11, 13};
    std::vector<double> st_q;
    double hp_corner = 0.0;
    double hp_q = 0.0;
    bool no_high_pass = false;
    std::string out;
};

int cmd_design(const DesignArgs& a) {
    SystemBasis basis;
    basis.fundamental_hz = a.f1;
    basis.source_vrms = a.vrms;
    basis.reference = a.line_to_line ? VoltageReference::line_to_line : VoltageReference::phase_to_neutral;
    std::optional<HighPassSpec> hp;
    if (!a.no_high_pass) {
        if (a.hp_corner <= 0.0 || a.hp_q <= 0.0) {
            std::cerr << "error: --hp-corner and --hp-q are required unless --no-high-pass is given\n";
            return kInputError;
        }
        hp = HighPassSpec{a.hp_corner, a.hp_q};
    }
    const auto designed = design_bank(basis, a.orders, a.c, a.st_q, hp);
    for (const auto& w : designed.warnings) std::cerr << "warning: " << w << "\n";
    const std::string text = to_json(designed.value) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        write_text_file(a.out, text);
    }
    return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::vector<std::string> scenarios;
    std::string out;
    std::string meta;
    std::string out_dir;
    bool wall_time = false;
};

json metadata_json(const Scenario& scenario, const WaveformSet& w, std::optional<double> wall_s) {
    json m = json::object();
    m["dt_s"] = w.metadata.dt_s;
    m["duration_s"] = w.metadata.duration_s;
    m["samples"] = w.size();
    m["steps"] = w.metadata.steps;
    m["sample_rate_hz"] = w.sample_rate_hz();
    m["fundamental_hz"] = scenario.basis.fundamental_hz;
    m["filter_bank"] = scenario.bank.has_value();
    m["channels"] = w.channel_names();
    m["flagged_steps"] = w.metadata.unconverged_steps;
    m["flagged_step_count"] = w.metadata.unconverged_steps.size();
    m["factorizations"] = w.metadata.factorizations;
    if (wall_s) m["wall_time_s"] = *wall_s;
    return m;
}

void simulate_one(const std::string& scenario_path, const std::string& csv_path, const std::string& meta_path,
                  bool wall_time) {
    const Scenario scenario = read_scenario(scenario_path);
    const auto t0 = std::chrono::steady_clock::now();
    const WaveformSet w = run(scenario);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_waveform_csv(w, csv_path);
    write_text_file(meta_path, metadata_json(scenario, w, wall_time ? std::optional(wall) : std::nullopt).dump(2) + "\n");
    std::cerr << scenario_path << ": " << w.size() << " samples, " << w.metadata.unconverged_steps.size()
              << " flagged steps, " << sig4(wall) << " s\n";
}

std::string default_meta_path(const std::string& csv) {
    fs::path p(csv);
    p.replace_extension(".meta.json");
    return p.string();
}

int cmd_simulate(const SimulateArgs& a) {
    if (a.scenarios.size() == 1 && a.out_dir.empty()) {
        if (a.out.empty()) {
            std::cerr << "error: --out is required\n";
            return kInputError;
        }
        simulate_one(a.scenarios[0], a.out, a.meta.empty() ? default_meta_path(a.out) : a.meta, a.wall_time);
        return kOk;
    }
    if (a.out_dir.empty()) {
        std::cerr << "error: --out-dir is required with several scenarios\n";
        return kInputError;
    }
    fs::create_directories(a.out_dir);

    // Scenarios are independent; run them on up to HARMFLOW_THREADS workers.
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t k = next++; k < a.scenarios.size(); k = next++) {
            try {
                const auto stem = fs::path(a.scenarios[k]).stem().string();
                const auto csv = (fs::path(a.out_dir) / (stem + ".csv")).string();
                simulate_one(a.scenarios[k], csv, default_meta_path(csv), a.wall_time);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const unsigned threads = std::min<unsigned>(thread_cap_from_env(), static_cast<unsigned>(a.scenarios.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    if (failure) std::rethrow_exception(failure);
    return kOk;
}

// ---------------------------------------------------------------- analyze

struct AnalysisOptions {
    std::string channel = "i_src_a";
    std::string v_channel;
    double f1 = 50.0;
    int max_order = kDefaultMaxOrder;
    std::size_t cycles = 5;
    double thd_limit = kIeee519ThdLimit;
};

struct Analysis {
    SampleRange window;
    HarmonicSpectrum spectrum;
    Ieee519Check check;
    std::optional<PowerReport> power;
};

Analysis analyze_waveform(const WaveformSet& w, const AnalysisOptions& o) {
    SystemBasis basis;
    basis.fundamental_hz = o.f1;
    Analysis a;
    const auto& samples = w.channel(o.channel);
    a.window = steady_state_window(w, basis, o.cycles);
    a.spectrum = spectrum(window_of(samples, a.window), w.sample_rate_hz(), o.f1, o.max_order);
    a.check = ieee519_check(a.spectrum, o.thd_limit);
    if (!o.v_channel.empty()) {
        a.power = power_report(window_of(w.channel(o.v_channel), a.window), window_of(samples, a.window),
                               w.sample_rate_hz(), o.f1);
    }
    return a;
}

json analysis_json(const Analysis& a, const AnalysisOptions& o) {
    json j = json::object();
    j["channel"] = o.channel;
    j["fundamental_hz"] = o.f1;
    j["max_order"] = o.max_order;
    j["window"] = {{"begin", a.window.begin}, {"end", a.window.end}, {"cycles", o.cycles}};
    j["thd"] = a.spectrum.thd;
    j["rms"] = a.spectrum.rms_total;
    j["dc"] = a.spectrum.dc;
    j["fundamental_rms"] = a.spectrum.magnitudes[0];
    j["ieee519"] = {{"thd", a.check.thd}, {"limit", a.check.limit}, {"pass", a.check.pass}};
    if (a.power) {
        j["voltage_channel"] = o.v_channel;
        j["power"] = {
            {"active_power_w", a.power->active_power_w},
            {"apparent_power_va", a.power->apparent_power_va},
            {"true_power_factor", a.power->true_power_factor},
            {"displacement_power_factor", a.power->displacement_power_factor},
        };
    }
    return j;
}

void print_analysis(const std::string& label, const Analysis& a) {
    std::cout << label << ": THD " << sig4(100.0 * a.spectrum.thd) << " %, I1 " << sig4(a.spectrum.magnitudes[0])
              << " rms, IEEE-519 " << (a.check.pass ? "pass" : "fail");
    if (a.power) {
        std::cout << ", PF " << sig4(a.power->true_power_factor) << ", DPF " << sig4(a.power->displacement_power_factor);
    }
    std::cout << "\n";
}

struct AnalyzeArgs {
    std::string waveform;
    std::string out_prefix;
    AnalysisOptions options;
};

int cmd_analyze(const AnalyzeArgs& a) {
    const WaveformSet w = read_waveform_csv(a.waveform);
    if (!w.has_channel(a.options.channel) || (!a.options.v_channel.empty() && !w.has_channel(a.options.v_channel))) {
        std::string available;
        for (const auto& n : w.channel_names()) available += " " + n;
        const auto& missing = w.has_channel(a.options.channel) ? a.options.v_channel : a.options.channel;
        std::cerr << "error: unknown channel '" << missing << "'; available:" << available << "\n";
        return kInputError;
    }
    const Analysis result = analyze_waveform(w, a.options);
    write_text_file(with_suffix(a.out_prefix, ".spectrum.csv"), spectrum_to_csv(result.spectrum));
    const SpectrumSeries series[] = {{a.options.channel, &result.spectrum}};
    write_text_file(with_suffix(a.out_prefix, ".svg"),
                    spectrum_svg(series, "Harmonic spectrum of " + a.options.channel));
    write_text_file(with_suffix(a.out_prefix, ".summary.json"), analysis_json(result, a.options).dump(2) + "\n");
    print_analysis(a.options.channel, result);
    return kOk;
}

// ---------------------------------------------------------------- scan

struct ScanArgs {
    std::string bank;
    double f_start = 50.0;
    double f_end = 1000.0;
    std::size_t points = 951;
    double ls = 0.0;
    std::string out_prefix;
};

int cmd_scan(const ScanArgs& a) {
    if (!(a.f_start > 0.0) || !(a.f_end > a.f_start)) {
        std::cerr << "error: scan range must satisfy 0 < --f-start < --f-end\n";
        return kInputError;
    }
    const FilterBank bank = filter_bank_from_json(read_text_file(a.bank));
    const ImpedanceCurve curve = scan(bank, a.ls, a.f_start, a.f_end, a.points);
    const ResonanceReport report = find_resonances(curve);
    write_text_file(with_suffix(a.out_prefix, ".csv"), impedance_curve_to_csv(curve));
    json j = json::object();
    j["f_start_hz"] = a.f_start;
    j["f_end_hz"] = a.f_end;
    j["points"] = a.points;
    j["source_inductance_h"] = a.ls;
    j["series_resonances_hz"] = report.series_resonances_hz;
    j["parallel_resonances_hz"] = report.parallel_resonances_hz;
    j["abs_ohms_at_f_end"] = std::abs(curve.impedances.back());
    write_text_file(with_suffix(a.out_prefix, ".resonances.json"), j.dump(2) + "\n");
    std::cout << "series resonances (Hz):";
    for (double f : report.series_resonances_hz) std::cout << " " << sig4(f);
    std::cout << "\nparallel resonances (Hz):";
    for (double f : report.parallel_resonances_hz) std::cout << " " << sig4(f);
    std::cout << "\n";
    return kOk;
}

// ---------------------------------------------------------------- report

struct ReportArgs {
    std::string baseline;
    std::string filtered;
    std::string out_prefix;
    AnalysisOptions options;
};

int cmd_report(ReportArgs a) {
    const WaveformSet base = read_waveform_csv(a.baseline);
    const WaveformSet filt = read_waveform_csv(a.filtered);
    if (std::abs(base.sample_rate_hz() - filt.sample_rate_hz()) > 1e-9 * base.sample_rate_hz()) {
        std::cerr << "error: sample rates differ (" << base.sample_rate_hz() << " Hz vs " << filt.sample_rate_hz()
                  << " Hz)\n";
        return kInputError;
    }
    if (a.options.v_channel.empty()) a.options.v_channel = "v_src_a";
    for (const auto* w : {&base, &filt}) {
        for (const auto& name : {a.options.channel, a.options.v_channel}) {
            if (!w->has_channel(name)) {
                std::cerr << "error: unknown channel '" << name << "'\n";
                return kInputError;
            }
        }
    }
    const Analysis b = analyze_waveform(base, a.options);
    const Analysis f = analyze_waveform(filt, a.options);

    json j = json::object();
    j["baseline"] = analysis_json(b, a.options);
    j["filtered"] = analysis_json(f, a.options);
    j["delta"] = {
        {"thd", f.spectrum.thd - b.spectrum.thd},
        {"fundamental_rms", f.spectrum.magnitudes[0] - b.spectrum.magnitudes[0]},
        {"true_power_factor", f.power->true_power_factor - b.power->true_power_factor},
        {"displacement_power_factor", f.power->displacement_power_factor - b.power->displacement_power_factor},
    };
    j["thd_reduction_ratio"] = f.spectrum.thd / b.spectrum.thd;
    j["ieee519_flip"] = !b.check.pass && f.check.pass;
    write_text_file(with_suffix(a.out_prefix, ".json"), j.dump(2) + "\n");

    const SpectrumSeries series[] = {{"baseline", &b.spectrum}, {"filtered", &f.spectrum}};
    write_text_file(with_suffix(a.out_prefix, ".svg"),
                    spectrum_svg(series, "Supply current spectrum, " + a.options.channel));
    print_analysis("baseline", b);
    print_analysis("filtered", f);
    std::cout << "THD " << sig4(100.0 * b.spectrum.thd) << " % -> " << sig4(100.0 * f.spectrum.thd) << " %\n";
    return kOk;
}

void add_analysis_flags(CLI::App* cmd, AnalysisOptions& o) {
    cmd->add_option("--f1", o.f1, "Fundamental frequency in Hz")->capture_default_str();
    cmd->add_option("--max-order,-H", o.max_order, "Highest harmonic order")->capture_default_str();
    cmd->add_option("--cycles", o.cycles, "Steady-state cycles at the end of the record")->capture_default_str();
    cmd->add_option("--thd-limit", o.thd_limit, "THD pass threshold (ratio)")->capture_default_str();
}

}  // namespace

unsigned thread_cap_from_env() {
    const char* value = std::getenv("HARMFLOW_THREADS");
    if (value == nullptr) return 1;
    char* end = nullptr;
    const long n = std::strtol(value, &end, 10);
    if (end == value || *end != '\0' || n < 1) return 1;
    return static_cast<unsigned>(n);
}

int run(const std::vector<std::string>& args) {
    CLI::App app{"Passive harmonic filter design and six-pulse rectifier harmonic simulation"};
    app.require_subcommand(1);

    DesignArgs design;
    auto* d = app.add_subcommand("design", "Size single-tuned and high-pass shunt filters");
    d->add_option("--c", design.c, "Capacitance per branch in farads")->required();
    d->add_option("--f1", design.f1, "Fundamental frequency in Hz")->capture_default_str();
    d->add_option("--vrms", design.vrms, "Source RMS voltage")->capture_default_str();
    d->add_flag("--line-to-line", design.line_to_line, "Interpret --vrms as line-to-line");
    d->add_option("--orders", design.orders, "Tuned harmonic orders")->delimiter(',')->capture_default_str();
    d->add_option("--q", design.st_q, "Single-tuned quality factor, one value or one per order")
        ->required()
        ->delimiter(',');
    d->add_option("--hp-corner", design.hp_corner, "High-pass corner frequency in Hz");
    d->add_option("--hp-q", design.hp_q, "High-pass quality factor R/X at the corner");
    d->add_flag("--no-high-pass", design.no_high_pass, "Omit the high-pass branch");
    d->add_option("--out,-o", design.out, "Output file (default: stdout)");

    SimulateArgs simulate;
    auto* s = app.add_subcommand("simulate", "Run a scenario and write waveforms");
    s->add_option("scenario", simulate.scenarios, "Scenario JSON file(s)")->required()->check(CLI::ExistingFile);
    s->add_option("--out,-o", simulate.out, "Waveform CSV path (single scenario)");
    s->add_option("--meta", simulate.meta, "Metadata JSON path (default: <out>.meta.json)");
    s->add_option("--out-dir", simulate.out_dir, "Directory for several scenarios");
    s->add_flag("--wall-time", simulate.wall_time, "Record wall time in the metadata");

    AnalyzeArgs analyze;
    auto* a = app.add_subcommand("analyze", "Harmonic spectrum, THD, power factor of one channel");
    a->add_option("waveform", analyze.waveform, "Waveform CSV")->required()->check(CLI::ExistingFile);
    a->add_option("--channel", analyze.options.channel, "Channel to analyze")->capture_default_str();
    a->add_option("--v-channel", analyze.options.v_channel, "Voltage channel for power factor");
    a->add_option("--out-prefix,-o", analyze.out_prefix, "Prefix for .spectrum.csv, .svg, .summary.json")->required();
    add_analysis_flags(a, analyze.options);

    ScanArgs scan_args;
    auto* sc = app.add_subcommand("scan", "Impedance-frequency scan of a filter bank");
    sc->add_option("bank", scan_args.bank, "Filter bank JSON")->required()->check(CLI::ExistingFile);
    sc->add_option("--f-start", scan_args.f_start, "First frequency in Hz")->capture_default_str();
    sc->add_option("--f-end", scan_args.f_end, "Last frequency in Hz")->capture_default_str();
    sc->add_option("--points", scan_args.points, "Grid points")->capture_default_str();
    sc->add_option("--ls", scan_args.ls, "Source inductance in parallel, henries")->capture_default_str();
    sc->add_option("--out-prefix,-o", scan_args.out_prefix, "Prefix for .csv and .resonances.json")->required();

    ReportArgs report;
    auto* r = app.add_subcommand("report", "Compare baseline and filtered waveforms");
    r->add_option("baseline", report.baseline, "Baseline waveform CSV")->required()->check(CLI::ExistingFile);
    r->add_option("filtered", report.filtered, "Filtered waveform CSV")->required()->check(CLI::ExistingFile);
    r->add_option("--channel", report.options.channel, "Current channel")->capture_default_str();
    r->add_option("--v-channel", report.options.v_channel, "Voltage channel (default v_src_a)");
    r->add_option("--out-prefix,-o", report.out_prefix, "Prefix for .json and .svg")->required();
    add_analysis_flags(r, report.options);

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("harmflow");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& arg : argv_storage) argv.push_back(arg.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (d->parsed()) return cmd_design(design);
        if (s->parsed()) return cmd_simulate(simulate);
        if (a->parsed()) return cmd_analyze(analyze);
        if (sc->parsed()) return cmd_scan(scan_args);
        if (r->parsed()) return cmd_report(report);
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace harmflow::cli
