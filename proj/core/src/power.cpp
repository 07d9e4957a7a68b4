#include "pbitrc/power.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "pbitrc/error.hpp"

namespace pbitrc {

namespace {

constexpr double kNm = 1e-9;
constexpr double kUohmCm = 1e-8;  // micro-ohm cm -> ohm m
constexpr double kNm2PerUm2 = 1e6;
constexpr double kMicro = 1e-6;

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(name) + " must be positive and finite");
    }
}

} // namespace

void DeviceParams::validate() const {
    require_positive(spm_barrier_kt, "spm_barrier_kt");
    require_positive(spm_radius_nm, "spm_radius_nm");
    require_positive(spm_thickness_nm, "spm_thickness_nm");
    require_positive(gshe_theta, "gshe_theta");
    require_positive(gshe_length_nm, "gshe_length_nm");
    require_positive(gshe_width_nm, "gshe_width_nm");
    require_positive(gshe_thickness_nm, "gshe_thickness_nm");
    require_positive(gshe_resistivity_uohm_cm, "gshe_resistivity_uohm_cm");
    require_positive(mtj_ra_ohm_um2, "mtj_ra_ohm_um2");
    require_positive(r_up_kohm, "r_up_kohm");
    require_positive(vdd_v, "vdd_v");
    if (!(mtj_tmr >= 0.0) || !std::isfinite(mtj_tmr)) {
        throw DomainError("mtj_tmr must be finite and non-negative");
    }
    if (!(i_write_ua >= 0.0) || !std::isfinite(i_write_ua)) {
        throw DomainError("i_write_ua must be finite and non-negative");
    }
    if (!(buffer_power_uw >= 0.0) || !std::isfinite(buffer_power_uw)) {
        throw DomainError("buffer_power_uw must be finite and non-negative");
    }
}

double resistance_from_geometry(double resistivity_uohm_cm, double length_nm, double width_nm,
                                double thickness_nm) {
    require_positive(resistivity_uohm_cm, "resistivity");
    require_positive(length_nm, "length");
    require_positive(width_nm, "width");
    require_positive(thickness_nm, "thickness");
    return resistivity_uohm_cm * kUohmCm * (length_nm * kNm) / ((width_nm * kNm) * (thickness_nm * kNm));
}

std::pair<double, double> mtj_resistance(double ra_ohm_um2, double radius_nm, double tmr) {
    require_positive(ra_ohm_um2, "MTJ RA product");
    require_positive(radius_nm, "MTJ radius");
    if (!(tmr >= 0.0) || !std::isfinite(tmr)) {
        throw DomainError("TMR must be finite and non-negative");
    }
    const double area_um2 = std::numbers::pi * radius_nm * radius_nm / kNm2PerUm2;
    const double parallel = ra_ohm_um2 / area_um2;
    return {parallel, parallel * (1.0 + tmr)};
}

PowerBreakdown power_report(const DeviceParams& p) {
    p.validate();
    PowerBreakdown out;
    out.gshe_resistance_ohm =
        resistance_from_geometry(p.gshe_resistivity_uohm_cm, p.gshe_length_nm, p.gshe_width_nm, p.gshe_thickness_nm);
    const double i_write = p.i_write_ua * kMicro;
    out.gshe_writer = i_write * i_write * out.gshe_resistance_ohm / kMicro;

    out.mtj_resistance_ohm = mtj_resistance(p.mtj_ra_ohm_um2, p.spm_radius_nm, p.mtj_tmr);
    const double r_up = p.r_up_kohm * 1e3;
    auto divider = [&](double r_mtj) {
        const double current = p.vdd_v / (r_mtj + r_up);
        return std::pair{current * current * r_mtj / kMicro, current * current * r_up / kMicro};
    };
    const auto [mtj_p, up_p] = divider(out.mtj_resistance_ohm.first);
    const auto [mtj_ap, up_ap] = divider(out.mtj_resistance_ohm.second);
    out.mtj_reader_band = {mtj_p, mtj_ap};
    out.r_up_band = {up_p, up_ap};

    out.mtj_reader = mtj_p;
    out.r_up = up_p;
    out.buffer = p.buffer_power_uw;
    out.spintronic_total = out.mtj_reader + out.gshe_writer;
    out.silicon_total = out.r_up + out.buffer;
    out.node_total = out.spintronic_total + out.silicon_total;
    return out;
}

std::string format_power_table(const PowerBreakdown& power) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    auto row = [&os](const char* name, double value, const std::string& note = {}) {
        os << std::left << std::setw(34) << name << std::right << std::setw(12) << value;
        if (!note.empty()) {
            os << "   " << note;
        }
        os << '\n';
    };
    auto band = [](const std::pair<double, double>& b) {
        std::ostringstream s;
        s << std::fixed << std::setprecision(3) << "P " << b.first << " / AP " << b.second;
        return s.str();
    };
    os << std::left << std::setw(34) << "Component" << std::right << std::setw(12) << "Power (uW)" << '\n';
    os << std::string(46, '-') << '\n';
    row("MTJ Reader", power.mtj_reader, band(power.mtj_reader_band));
    row("GSHE Writer", power.gshe_writer);
    row("Spintronic Total", power.spintronic_total);
    row("R_up", power.r_up, band(power.r_up_band));
    row("Buffer (dual inverter design)", power.buffer);
    row("Silicon Total", power.silicon_total);
    row("Node Total", power.node_total);
    return os.str();
}

} // namespace pbitrc
