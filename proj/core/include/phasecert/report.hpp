#pragma once

#include <ostream>
#include <string>

#include "phasecert/criteria.hpp"
#include "phasecert/scenario.hpp"

namespace phasecert {

inline constexpr const char* kReportSchema = "phasecert.report/1";
inline constexpr const char* kSweepSchema = "phasecert.sweep v1";
inline constexpr const char* kEigSchema = "phasecert.eig v1";
inline constexpr const char* kLoopEigSchema = "phasecert.loopeig v1";

inline constexpr const char* kGridCaveat =
    "verified on a finite frequency grid (with adaptive refinement where enabled), not on the continuum";

std::string report_json(const Scenario& sc, const System& sys, const CertifyOptions& opt, const CertificateReport& rep);

// One row per frequency. Non-sectorial intervals are written as the
// [-2pi, 2pi] sentinel so plots shade the full band.
void write_sweep_csv(std::ostream& os, const Scenario& sc, const System& sys, const CertificateReport& rep);

void write_eig_csv(std::ostream& os, const Scenario& sc, const GroundTruth& gt);

// Eigenvalues of J_net^{-1} J_C against the phase sum bound, per frequency.
void write_loop_eig_csv(std::ostream& os, const Scenario& sc, const System& sys, const CertifyOptions& opt,
                        const CertificateReport& rep);

}  // namespace phasecert
