#include "json_support.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace harmflow::detail {

namespace {

// Line and column of a byte offset, both 1-based.
std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t offset) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
        if (text[k] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

bool close_relative(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

}  // namespace

json parse_document(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
        std::ostringstream msg;
        msg << "malformed JSON at line " << line << ", column " << column;
        throw ValidationError("", msg.str());
    }
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) throw ValidationError(path, "expected an object");
}

void reject_unknown_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (auto key : allowed) known = known || item.key() == key;
        if (!known) throw ValidationError(join_path(path, item.key()), "unknown key");
    }
}

double require_number(const json& j, const std::string& path, std::string_view key) {
    const std::string field = join_path(path, key);
    const auto it = j.find(std::string(key));
    if (it == j.end()) throw ValidationError(field, "missing required field");
    if (!it->is_number()) throw ValidationError(field, "expected a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ValidationError(field, "must be finite");
    return v;
}

double require_positive(const json& j, const std::string& path, std::string_view key) {
    const double v = require_number(j, path, key);
    if (!(v > 0.0)) throw ValidationError(join_path(path, key), "must be > 0");
    return v;
}

int require_integer(const json& j, const std::string& path, std::string_view key) {
    const std::string field = join_path(path, key);
    const auto it = j.find(std::string(key));
    if (it == j.end()) throw ValidationError(field, "missing required field");
    if (!it->is_number_integer()) throw ValidationError(field, "expected an integer");
    return it->get<int>();
}

std::string require_string(const json& j, const std::string& path, std::string_view key) {
    const std::string field = join_path(path, key);
    const auto it = j.find(std::string(key));
    if (it == j.end()) throw ValidationError(field, "missing required field");
    if (!it->is_string()) throw ValidationError(field, "expected a string");
    return it->get<std::string>();
}

json bank_to_json(const FilterBank& bank) {
    json branches = json::array();
    for (const auto& branch : bank.branches()) {
        json b = json::object();
        if (const auto* st = std::get_if<SingleTunedFilter>(&branch)) {
            b["kind"] = "single_tuned";
            b["order"] = st->order;
            b["c_farads"] = st->capacitance_f;
            b["l_henries"] = st->inductance_h;
            b["r_ohms"] = st->resistance_ohm;
            b["q"] = st->quality_factor;
        } else {
            const auto& hp = std::get<HighPassFilter>(branch);
            b["kind"] = "high_pass";
            b["corner_hz"] = hp.corner_hz;
            b["c_farads"] = hp.capacitance_f;
            b["l_henries"] = hp.inductance_h;
            b["r_ohms"] = hp.resistance_ohm;
            b["q"] = hp.quality_factor;
        }
        branches.push_back(std::move(b));
    }
    json out = json::object();
    out["fundamental_hz"] = bank.fundamental_hz();
    out["branches"] = std::move(branches);
    return out;
}

FilterBank bank_from_json(const json& j, const std::string& path) {
    // Stored quality factors and corners must agree with R, L, C to this relative tolerance.
    constexpr double kConsistency = 1e-9;

    require_object(j, path);
    reject_unknown_keys(j, path, {"fundamental_hz", "branches"});
    const double f1 = require_positive(j, path, "fundamental_hz");
    const std::string branches_path = join_path(path, "branches");
    const auto it = j.find("branches");
    if (it == j.end()) throw ValidationError(branches_path, "missing required field");
    if (!it->is_array()) throw ValidationError(branches_path, "expected an array");

    std::vector<FilterBranch> branches;
    for (std::size_t k = 0; k < it->size(); ++k) {
        const json& b = (*it)[k];
        const std::string bp = branches_path + "[" + std::to_string(k) + "]";
        require_object(b, bp);
        const std::string kind = require_string(b, bp, "kind");
        if (kind == "single_tuned") {
            reject_unknown_keys(b, bp, {"kind", "order", "c_farads", "l_henries", "r_ohms", "q"});
            SingleTunedFilter st;
            st.order = require_integer(b, bp, "order");
            if (st.order < 2) throw ValidationError(join_path(bp, "order"), "must be >= 2");
            st.capacitance_f = require_positive(b, bp, "c_farads");
            st.inductance_h = require_positive(b, bp, "l_henries");
            st.resistance_ohm = require_positive(b, bp, "r_ohms");
            st.quality_factor = require_positive(b, bp, "q");
            const double q = std::sqrt(st.inductance_h / st.capacitance_f) / st.resistance_ohm;
            if (!close_relative(q, st.quality_factor, kConsistency)) {
                throw ValidationError(join_path(bp, "q"), "inconsistent with sqrt(L/C)/R = " + std::to_string(q));
            }
            branches.emplace_back(st);
        } else if (kind == "high_pass") {
            reject_unknown_keys(b, bp, {"kind", "corner_hz", "c_farads", "l_henries", "r_ohms", "q"});
            HighPassFilter hp;
            hp.corner_hz = require_positive(b, bp, "corner_hz");
            hp.capacitance_f = require_positive(b, bp, "c_farads");
            hp.inductance_h = require_positive(b, bp, "l_henries");
            hp.resistance_ohm = require_positive(b, bp, "r_ohms");
            hp.quality_factor = require_positive(b, bp, "q");
            const double corner = 1.0 / (2.0 * std::numbers::pi * std::sqrt(hp.inductance_h * hp.capacitance_f));
            if (!close_relative(corner, hp.corner_hz, kConsistency)) {
                throw ValidationError(join_path(bp, "corner_hz"),
                                      "inconsistent with 1/(2 pi sqrt(LC)) = " + std::to_string(corner));
            }
            const double q = hp.resistance_ohm / (2.0 * std::numbers::pi * corner * hp.inductance_h);
            if (!close_relative(q, hp.quality_factor, kConsistency)) {
                throw ValidationError(join_path(bp, "q"), "inconsistent with R/X_L at corner = " + std::to_string(q));
            }
            branches.emplace_back(hp);
        } else {
            throw ValidationError(join_path(bp, "kind"), "expected \"single_tuned\" or \"high_pass\", got \"" + kind + "\"");
        }
    }
    try {
        return FilterBank(f1, std::move(branches));
    } catch (const DomainError& e) {
        throw ValidationError(branches_path, e.what());
    }
}

}  // namespace harmflow::detail
