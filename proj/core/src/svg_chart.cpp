#include "harmflow/analyzer.hpp"

#include "harmflow/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace harmflow {

namespace {

constexpr double kWidth = 900.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 4> kColors = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string spectrum_svg(std::span<const SpectrumSeries> series, const std::string& title) {
    if (series.empty()) throw DomainError("spectrum chart needs at least one series");
    int orders = 0;
    double peak_percent = 100.0;
    for (const auto& s : series) {
        if (s.spectrum == nullptr || s.spectrum->magnitudes.empty() || !(s.spectrum->magnitudes[0] > 0.0)) {
            throw DomainError("spectrum chart needs a nonzero fundamental in every series");
        }
        orders = std::max(orders, s.spectrum->max_order());
        for (double m : s.spectrum->magnitudes) peak_percent = std::max(peak_percent, 100.0 * m / s.spectrum->magnitudes[0]);
    }
    const double y_max = std::ceil(peak_percent / 20.0) * 20.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const double slot = plot_w / orders;
    const double bar = slot * 0.8 / static_cast<double>(series.size());
    auto y_of = [&](double percent) { return kTop + plot_h * (1.0 - percent / y_max); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) + "\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
           escape(title) + "</text>\n";

    // Grid and y axis in percent of fundamental.
    for (double p = 0.0; p <= y_max + 1e-9; p += 20.0) {
        const double y = y_of(p);
        out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" + num(y) +
               "\" stroke=\"#dddddd\"/>\n";
        out += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(p) + "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto& sp = *series[s].spectrum;
        const char* color = kColors[s % kColors.size()];
        for (int h = 1; h <= sp.max_order(); ++h) {
            const double percent = 100.0 * sp.magnitude(h) / sp.magnitudes[0];
            const double x = kLeft + slot * (h - 1) + slot * 0.1 + bar * static_cast<double>(s);
            const double y = y_of(percent);
            out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(bar) + "\" height=\"" +
                   num(kTop + plot_h - y) + "\" fill=\"" + color + "\"/>\n";
        }
        const double ly = kTop + 14.0 * static_cast<double>(s);
        out += "<rect x=\"" + num(kLeft + plot_w - 160) + "\" y=\"" + num(ly) + "\" width=\"10\" height=\"10\" fill=\"" +
               color + "\"/>\n";
        out += "<text x=\"" + num(kLeft + plot_w - 145) + "\" y=\"" + num(ly + 9) +
               "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(series[s].label) + " (THD " +
               num(100.0 * sp.thd) + "%)</text>\n";
    }
    // x axis labels every fifth order plus the fundamental.
    for (int h = 1; h <= orders; ++h) {
        if (h != 1 && h % 5 != 0) continue;
        const double x = kLeft + slot * (h - 0.5);
        out += "<text x=\"" + num(x) + "\" y=\"" + num(kTop + plot_h + 16) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + std::to_string(h) + "</text>\n";
    }
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop + plot_h) + "\" x2=\"" + num(kLeft + plot_w) + "\" y2=\"" +
           num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
           num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">harmonic order</text>\n";
    out += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"12\" transform=\"rotate(-90 16 " + num(kTop + plot_h / 2) + ")\">% of fundamental</text>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace harmflow
