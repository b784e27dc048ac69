#include "resokit/design.hpp"

namespace resokit {

namespace {

// Measured rows: v_p = f_s * lambda of each fabricated device, 40 nm Al
// electrodes, 0.7 um LN. Simulated rows: the two quoted endpoints of the FEM
// sweep (Q set to 200); interior points are not published.
constexpr std::string_view kBuiltinCsv =
    "h_ln_over_lambda,h_elec_over_lambda,duty,v_p_mps,keff2,family,provenance\n"
    "1.75,0.1,0.5,3736,0.16,measured,device F (9.34 GHz x 400 nm)\n"
    "1.94,0.111111111111111,0.5,3690,0.11,measured,device B (10.25 GHz x 360 nm)\n"
    "2.16,0.123456790123457,0.5,3528,0.13,measured,device C (10.89 GHz x 324 nm)\n"
    "2.36,0.135135135135135,0.5,3484,0.09,measured,device D (11.77 GHz x 296 nm)\n"
    "2.92,0.166666666666667,0.5,3209,0.07,measured,device E (13.37 GHz x 240 nm)\n"
    "1.75,0.1,0.7,3620,0.15,measured,device A (9.05 GHz x 400 nm)\n"
    "1.75,0.1,0.5,3664,0.39,simulated,FEM endpoint (9.16 GHz x 400 nm)\n"
    "2.92,0.166666666666667,0.5,3103,0.34,simulated,FEM endpoint (12.93 GHz x 240 nm)\n";

}  // namespace

std::string_view builtin_dispersion_csv() { return kBuiltinCsv; }

DispersionTable builtin_dispersion_table() { return DispersionTable::from_csv(kBuiltinCsv); }

}  // namespace resokit
