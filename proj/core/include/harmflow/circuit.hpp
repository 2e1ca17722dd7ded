#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace harmflow {

// Lumped-element netlist for transient analysis. Node 0 is ground.
//
// Element handles are plain indices into the per-kind element lists; they stay valid for the
// lifetime of the circuit. Inductor and capacitor current direction is from terminal `a` to `b`.
class Circuit {
public:
    using Node = std::size_t;
    static constexpr Node ground = 0;

    struct Resistor { Node a, b; double ohms; };
    struct Inductor { Node a, b; double henries; double initial_current = 0.0; };
    struct Capacitor { Node a, b; double farads; double initial_voltage = 0.0; };
    // Ideal voltage source, v(a) - v(b) = value(t).
    struct VoltageSource { Node a, b; std::function<double(double)> value; };
    // Two-state resistive diode from anode `a` to cathode `b`.
    struct Diode { Node a, b; double on_ohms; double off_ohms; };

    Node add_node(std::string name);

    std::size_t add_resistor(Node a, Node b, double ohms);
    std::size_t add_inductor(Node a, Node b, double henries);
    std::size_t add_capacitor(Node a, Node b, double farads);
    std::size_t add_voltage_source(Node a, Node b, std::function<double(double)> value);
    std::size_t add_diode(Node anode, Node cathode, double on_ohms, double off_ohms);

    std::size_t node_count() const noexcept { return node_names_.size(); }
    const std::string& node_name(Node n) const { return node_names_.at(n); }

    const std::vector<Resistor>& resistors() const noexcept { return resistors_; }
    const std::vector<Inductor>& inductors() const noexcept { return inductors_; }
    const std::vector<Capacitor>& capacitors() const noexcept { return capacitors_; }
    const std::vector<VoltageSource>& voltage_sources() const noexcept { return sources_; }
    const std::vector<Diode>& diodes() const noexcept { return diodes_; }

private:
    void check_node(Node n) const;

    std::vector<std::string> node_names_{"gnd"};
    std::vector<Resistor> resistors_;
    std::vector<Inductor> inductors_;
    std::vector<Capacitor> capacitors_;
    std::vector<VoltageSource> sources_;
    std::vector<Diode> diodes_;
};

// Fixed-step companion-model integrator for a Circuit.
//
// Steps use the trapezoidal rule. A step in which any diode changes state is recomputed as two
// backward-Euler half steps, which damps the numerical chatter the trapezoidal rule otherwise
// leaves on inductor voltages after a current interruption. Both schemes share one system matrix
// per diode-state pattern, so factorizations are cached by pattern.
//
// The first step after construction is also taken as two backward-Euler half steps, since the
// all-zero initial state does not carry consistent element voltages.
class TransientSolver {
public:
    struct Options {
        double dt = 1e-5;
        int max_switch_iterations = 10;
        // Reciprocal condition estimate below which a factorization counts as singular.
        double singular_rcond = 1e-15;
    };

    TransientSolver(const Circuit& circuit, Options options);
    ~TransientSolver();
    TransientSolver(TransientSolver&&) noexcept;
    TransientSolver& operator=(TransientSolver&&) noexcept;

    // Advances one dt. Throws SolverError on a singular system.
    void step();

    double time() const noexcept { return time_; }
    std::size_t steps_taken() const noexcept { return steps_; }
    // True if the last step hit max_switch_iterations without a consistent diode pattern.
    bool last_step_unconverged() const noexcept { return last_unconverged_; }
    std::size_t unconverged_steps() const noexcept { return unconverged_total_; }
    std::size_t factorizations() const noexcept;

    double node_voltage(Circuit::Node n) const;
    double voltage(Circuit::Node a, Circuit::Node b) const { return node_voltage(a) - node_voltage(b); }

    double resistor_current(std::size_t k) const;
    double inductor_current(std::size_t k) const { return ind_current_[k]; }
    double capacitor_voltage(std::size_t k) const { return cap_voltage_[k]; }
    double capacitor_current(std::size_t k) const { return cap_current_[k]; }
    // Current delivered by the source out of its `a` terminal into the circuit.
    double source_current(std::size_t k) const;
    double source_value(std::size_t k) const { return source_value_[k]; }
    double diode_current(std::size_t k) const;
    double diode_resistance(std::size_t k) const;
    bool diode_on(std::size_t k) const { return diode_on_[k]; }

private:
    enum class Scheme { trapezoidal, backward_euler_half };

    struct Factorization;

    Factorization& factorization_for(const std::vector<bool>& pattern);
    // Solves one sub-step of length h ending at time t_end; returns true if the diode pattern changed.
    bool solve_substep(Scheme scheme, double t_end);
    void commit(Scheme scheme, double h);
    std::uint64_t pattern_key(const std::vector<bool>& pattern) const;

    const Circuit* circuit_;
    Options options_;
    std::size_t unknowns_ = 0;
    double time_ = 0.0;
    std::size_t steps_ = 0;
    bool last_unconverged_ = false;
    std::size_t unconverged_total_ = 0;
    bool first_step_ = true;

    std::vector<double> solution_;     // node voltages 1..N-1 followed by source currents
    std::vector<double> ind_current_;
    std::vector<double> ind_voltage_;
    std::vector<double> cap_voltage_;
    std::vector<double> cap_current_;
    std::vector<double> source_value_;
    std::vector<bool> diode_on_;

    struct Cache;
    std::unique_ptr<Cache> cache_;
};

}  // namespace harmflow
