#pragma once

#include "harmflow/filter_design.hpp"

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace harmflow {

using Complex = std::complex<double>;

// Driving-point impedance sampled on an increasing frequency grid.
struct ImpedanceCurve {
    std::vector<double> frequencies_hz;
    std::vector<Complex> impedances;

    // DomainError unless frequencies are positive and strictly increasing, with >= 2 matching points.
    void validate() const;
};

struct ResonanceReport {
    std::vector<double> series_resonances_hz;    // interior local minima of |Z|
    std::vector<double> parallel_resonances_hz;  // interior local maxima of |Z|
};

// R + j(wL - 1/(wC)).
Complex st_impedance(const SingleTunedFilter& filter, double f_hz);
// 1/(jwC) + (R || jwL).
Complex hp_impedance(const HighPassFilter& filter, double f_hz);
Complex branch_impedance(const FilterBranch& branch, double f_hz);

// Sum of branch admittances.
Complex bank_admittance(const FilterBank& bank, double f_hz);
Complex bank_impedance(const FilterBank& bank, double f_hz);

// Impedance seen by harmonic current injected at the PCC: the bank in parallel with the source
// inductance (or the bank alone when source_inductance_h is 0). Linear grid including both ends.
ImpedanceCurve scan(const FilterBank& bank, double source_inductance_h, double f_start_hz, double f_end_hz,
                    std::size_t n_points);

// Discrete local extrema of |Z| on the grid, endpoints excluded. A flat run reports its lowest
// frequency.
ResonanceReport find_resonances(const ImpedanceCurve& curve);

// Header frequency_hz,re_ohms,im_ohms,abs_ohms; fixed decimal notation, round-trip precision.
std::string impedance_curve_to_csv(const ImpedanceCurve& curve);

}  // namespace harmflow
