#pragma once

#include <string>
#include <utility>

namespace pbitrc {

/// Device and circuit parameters of a single spintronic p-bit node.
struct DeviceParams {
    // metadata only: no formula here consumes the barrier, spin-Hall angle or
    // magnet thickness
    double spm_barrier_kt = 1.0;
    double spm_radius_nm = 50.0;
    double spm_thickness_nm = 1.0;
    double gshe_theta = 0.33;

    double gshe_length_nm = 50.0;
    double gshe_width_nm = 50.0;
    double gshe_thickness_nm = 2.0;
    double gshe_resistivity_uohm_cm = 170.0;
    double mtj_tmr = 1.0;             ///< (R_AP - R_P) / R_P
    double mtj_ra_ohm_um2 = 100.0;
    double r_up_kohm = 15.0;
    double i_write_ua = 15.0;
    double vdd_v = 0.8;
    double buffer_power_uw = 150.0;   ///< dual-inverter buffer, taken as given

    void validate() const;
};

/// Dissipated power per component, in microwatts. Headline entries use the
/// parallel MTJ state; the *_band pairs hold (parallel, antiparallel).
struct PowerBreakdown {
    double mtj_reader = 0.0;
    double gshe_writer = 0.0;
    double spintronic_total = 0.0;
    double r_up = 0.0;
    double buffer = 0.0;
    double silicon_total = 0.0;
    double node_total = 0.0;
    std::pair<double, double> mtj_reader_band;
    std::pair<double, double> r_up_band;
    std::pair<double, double> mtj_resistance_ohm; ///< (R_P, R_AP)
    double gshe_resistance_ohm = 0.0;
};

/// R = rho L / (W t); rho in micro-ohm cm, lengths in nm, result in ohm.
double resistance_from_geometry(double resistivity_uohm_cm, double length_nm, double width_nm,
                                double thickness_nm);

/// (R_P, R_AP) of a circular junction: R_P = RA / (pi r^2), R_AP = R_P (1 + tmr).
std::pair<double, double> mtj_resistance(double ra_ohm_um2, double radius_nm, double tmr);

/// I^2 R budget: GSHE write path at i_write, MTJ / pull-up divider across vdd.
PowerBreakdown power_report(const DeviceParams& params);

/// Plain-text table with one row per component.
std::string format_power_table(const PowerBreakdown& power);

} // namespace pbitrc
