#include "harmflow/circuit.hpp"

#include "harmflow/error.hpp"

#include <Eigen/Dense>

#include <unordered_map>
#include <utility>

namespace harmflow {

Circuit::Node Circuit::add_node(std::string name) {
    node_names_.push_back(std::move(name));
    return node_names_.size() - 1;
}

void Circuit::check_node(Node n) const {
    if (n >= node_names_.size()) {
        throw DomainError("circuit: unknown node " + std::to_string(n));
    }
}

std::size_t Circuit::add_resistor(Node a, Node b, double ohms) {
    check_node(a);
    check_node(b);
    if (!(ohms > 0.0)) throw DomainError("circuit: resistance must be positive");
    resistors_.push_back({a, b, ohms});
    return resistors_.size() - 1;
}

std::size_t Circuit::add_inductor(Node a, Node b, double henries) {
    check_node(a);
    check_node(b);
    if (!(henries > 0.0)) throw DomainError("circuit: inductance must be positive");
    inductors_.push_back({a, b, henries});
    return inductors_.size() - 1;
}

std::size_t Circuit::add_capacitor(Node a, Node b, double farads) {
    check_node(a);
    check_node(b);
    if (!(farads > 0.0)) throw DomainError("circuit: capacitance must be positive");
    capacitors_.push_back({a, b, farads});
    return capacitors_.size() - 1;
}

std::size_t Circuit::add_voltage_source(Node a, Node b, std::function<double(double)> value) {
    check_node(a);
    check_node(b);
    if (!value) throw DomainError("circuit: voltage source needs a waveform");
    sources_.push_back({a, b, std::move(value)});
    return sources_.size() - 1;
}

std::size_t Circuit::add_diode(Node anode, Node cathode, double on_ohms, double off_ohms) {
    check_node(anode);
    check_node(cathode);
    if (!(on_ohms > 0.0) || !(off_ohms > on_ohms)) {
        throw DomainError("circuit: diode needs 0 < on resistance < off resistance");
    }
    if (diodes_.size() == 64) throw DomainError("circuit: at most 64 diodes are supported");
    diodes_.push_back({anode, cathode, on_ohms, off_ohms});
    return diodes_.size() - 1;
}

struct TransientSolver::Factorization {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
};

struct TransientSolver::Cache {
    std::unordered_map<std::uint64_t, Factorization> by_pattern;
    Eigen::VectorXd rhs;
    Eigen::VectorXd x;
};

namespace {

// Row index of a node in the reduced system, or -1 for ground.
inline long row_of(Circuit::Node n) { return static_cast<long>(n) - 1; }

void stamp_conductance(Eigen::MatrixXd& m, Circuit::Node a, Circuit::Node b, double g) {
    const long ra = row_of(a);
    const long rb = row_of(b);
    if (ra >= 0) m(ra, ra) += g;
    if (rb >= 0) m(rb, rb) += g;
    if (ra >= 0 && rb >= 0) {
        m(ra, rb) -= g;
        m(rb, ra) -= g;
    }
}

// Current `j` flowing from a to b through a companion source.
void stamp_current(Eigen::VectorXd& rhs, Circuit::Node a, Circuit::Node b, double j) {
    const long ra = row_of(a);
    const long rb = row_of(b);
    if (ra >= 0) rhs(ra) -= j;
    if (rb >= 0) rhs(rb) += j;
}

}  // namespace

TransientSolver::TransientSolver(const Circuit& circuit, Options options)
    : circuit_(&circuit), options_(options), cache_(std::make_unique<Cache>()) {
    if (!(options_.dt > 0.0)) throw DomainError("solver: dt must be positive");
    if (options_.max_switch_iterations < 1) throw DomainError("solver: max_switch_iterations must be >= 1");
    unknowns_ = circuit.node_count() - 1 + circuit.voltage_sources().size();
    solution_.assign(unknowns_, 0.0);
    for (const auto& l : circuit.inductors()) {
        ind_current_.push_back(l.initial_current);
        ind_voltage_.push_back(0.0);
    }
    for (const auto& c : circuit.capacitors()) {
        cap_voltage_.push_back(c.initial_voltage);
        cap_current_.push_back(0.0);
    }
    source_value_.assign(circuit.voltage_sources().size(), 0.0);
    diode_on_.assign(circuit.diodes().size(), false);
    cache_->rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(unknowns_));
}

TransientSolver::~TransientSolver() = default;
TransientSolver::TransientSolver(TransientSolver&&) noexcept = default;
TransientSolver& TransientSolver::operator=(TransientSolver&&) noexcept = default;

std::size_t TransientSolver::factorizations() const noexcept { return cache_->by_pattern.size(); }

std::uint64_t TransientSolver::pattern_key(const std::vector<bool>& pattern) const {
    std::uint64_t key = 0;
    for (std::size_t k = 0; k < pattern.size(); ++k) {
        if (pattern[k]) key |= (std::uint64_t{1} << k);
    }
    return key;
}

TransientSolver::Factorization& TransientSolver::factorization_for(const std::vector<bool>& pattern) {
    const auto key = pattern_key(pattern);
    if (auto it = cache_->by_pattern.find(key); it != cache_->by_pattern.end()) return it->second;

    const auto n = static_cast<Eigen::Index>(unknowns_);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const double dt = options_.dt;
    for (const auto& r : circuit_->resistors()) stamp_conductance(m, r.a, r.b, 1.0 / r.ohms);
    // Trapezoidal over dt and backward Euler over dt/2 share these conductances.
    for (const auto& l : circuit_->inductors()) stamp_conductance(m, l.a, l.b, dt / (2.0 * l.henries));
    for (const auto& c : circuit_->capacitors()) stamp_conductance(m, c.a, c.b, 2.0 * c.farads / dt);
    for (std::size_t k = 0; k < circuit_->diodes().size(); ++k) {
        const auto& d = circuit_->diodes()[k];
        stamp_conductance(m, d.a, d.b, 1.0 / (pattern[k] ? d.on_ohms : d.off_ohms));
    }
    const long first_source_row = static_cast<long>(circuit_->node_count()) - 1;
    for (std::size_t k = 0; k < circuit_->voltage_sources().size(); ++k) {
        const auto& s = circuit_->voltage_sources()[k];
        const long row = first_source_row + static_cast<long>(k);
        if (row_of(s.a) >= 0) {
            m(row_of(s.a), row) += 1.0;
            m(row, row_of(s.a)) += 1.0;
        }
        if (row_of(s.b) >= 0) {
            m(row_of(s.b), row) -= 1.0;
            m(row, row_of(s.b)) -= 1.0;
        }
    }

    Factorization f{Eigen::PartialPivLU<Eigen::MatrixXd>(m)};
    const auto pivots = f.lu.matrixLU().diagonal().cwiseAbs();
    const double pivot_ratio = pivots.minCoeff() / pivots.maxCoeff();
    const double rcond = pivot_ratio > 0.0 ? f.lu.rcond() : 0.0;
    if (!(rcond > options_.singular_rcond) || !(pivot_ratio > options_.singular_rcond)) {
        throw SolverError(steps_, "singular system matrix (rcond " + std::to_string(rcond) + ")");
    }
    return cache_->by_pattern.emplace(key, std::move(f)).first->second;
}

bool TransientSolver::solve_substep(Scheme scheme, double t_end) {
    auto& rhs = cache_->rhs;
    rhs.setZero();
    const double dt = options_.dt;
    const bool trap = scheme == Scheme::trapezoidal;

    for (std::size_t k = 0; k < circuit_->inductors().size(); ++k) {
        const auto& l = circuit_->inductors()[k];
        const double g = dt / (2.0 * l.henries);
        const double j = trap ? ind_current_[k] + g * ind_voltage_[k] : ind_current_[k];
        stamp_current(rhs, l.a, l.b, j);
    }
    for (std::size_t k = 0; k < circuit_->capacitors().size(); ++k) {
        const auto& c = circuit_->capacitors()[k];
        const double g = 2.0 * c.farads / dt;
        const double j = trap ? -(g * cap_voltage_[k] + cap_current_[k]) : -g * cap_voltage_[k];
        stamp_current(rhs, c.a, c.b, j);
    }
    const long first_source_row = static_cast<long>(circuit_->node_count()) - 1;
    for (std::size_t k = 0; k < circuit_->voltage_sources().size(); ++k) {
        source_value_[k] = circuit_->voltage_sources()[k].value(t_end);
        rhs(first_source_row + static_cast<long>(k)) = source_value_[k];
    }

    const std::vector<bool> initial = diode_on_;
    for (int iteration = 0; iteration < options_.max_switch_iterations; ++iteration) {
        cache_->x = factorization_for(diode_on_).lu.solve(rhs);
        for (std::size_t k = 0; k < unknowns_; ++k) solution_[k] = cache_->x(static_cast<Eigen::Index>(k));

        bool changed = false;
        std::vector<bool> next = diode_on_;
        for (std::size_t k = 0; k < circuit_->diodes().size(); ++k) {
            const auto& d = circuit_->diodes()[k];
            const double v = voltage(d.a, d.b);
            if (diode_on_[k] && v / d.on_ohms < 0.0) {
                next[k] = false;
                changed = true;
            } else if (!diode_on_[k] && v > 0.0) {
                next[k] = true;
                changed = true;
            }
        }
        if (!changed) return diode_on_ != initial;
        if (iteration + 1 == options_.max_switch_iterations) {
            last_unconverged_ = true;
            break;
        }
        diode_on_ = std::move(next);
    }
    return diode_on_ != initial;
}

void TransientSolver::commit(Scheme scheme, double h) {
    const double dt = options_.dt;
    const bool trap = scheme == Scheme::trapezoidal;
    for (std::size_t k = 0; k < circuit_->inductors().size(); ++k) {
        const auto& l = circuit_->inductors()[k];
        const double g = dt / (2.0 * l.henries);
        const double j = trap ? ind_current_[k] + g * ind_voltage_[k] : ind_current_[k];
        const double v = voltage(l.a, l.b);
        ind_voltage_[k] = v;
        ind_current_[k] = g * v + j;
    }
    for (std::size_t k = 0; k < circuit_->capacitors().size(); ++k) {
        const auto& c = circuit_->capacitors()[k];
        const double g = 2.0 * c.farads / dt;
        const double j = trap ? -(g * cap_voltage_[k] + cap_current_[k]) : -g * cap_voltage_[k];
        const double v = voltage(c.a, c.b);
        cap_voltage_[k] = v;
        cap_current_[k] = g * v + j;
    }
    time_ += h;
}

void TransientSolver::step() {
    last_unconverged_ = false;
    const double dt = options_.dt;
    const double t0 = static_cast<double>(steps_) * dt;

    bool switched = true;
    if (!first_step_) {
        switched = solve_substep(Scheme::trapezoidal, t0 + dt);
        if (!switched) commit(Scheme::trapezoidal, dt);
    }
    if (switched) {
        last_unconverged_ = false;
        solve_substep(Scheme::backward_euler_half, t0 + 0.5 * dt);
        commit(Scheme::backward_euler_half, 0.5 * dt);
        solve_substep(Scheme::backward_euler_half, t0 + dt);
        commit(Scheme::backward_euler_half, 0.5 * dt);
    }
    first_step_ = false;
    ++steps_;
    // Re-anchor to the grid so long runs do not accumulate rounding in the clock.
    time_ = static_cast<double>(steps_) * dt;
    if (last_unconverged_) ++unconverged_total_;
}

double TransientSolver::node_voltage(Circuit::Node n) const {
    return n == Circuit::ground ? 0.0 : solution_[n - 1];
}

double TransientSolver::resistor_current(std::size_t k) const {
    const auto& r = circuit_->resistors()[k];
    return voltage(r.a, r.b) / r.ohms;
}

double TransientSolver::source_current(std::size_t k) const {
    return -solution_[circuit_->node_count() - 1 + k];
}

double TransientSolver::diode_resistance(std::size_t k) const {
    const auto& d = circuit_->diodes()[k];
    return diode_on_[k] ? d.on_ohms : d.off_ohms;
}

double TransientSolver::diode_current(std::size_t k) const {
    const auto& d = circuit_->diodes()[k];
    return voltage(d.a, d.b) / diode_resistance(k);
}

}  // namespace harmflow
