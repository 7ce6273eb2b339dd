#pragma once

namespace coexsim::units {

// All model code works in SI base units (W, Hz, m, 1/m, s^2/m).
// Engineering units appear only at ingestion and reporting.

double dbm_to_watt(double dbm);
double watt_to_dbm(double watt);

// Attenuation/Rayleigh: a decay rate. 0.2 dB/km -> 4.605e-5 1/m.
double db_per_km_to_per_m(double db_per_km);
double per_m_to_db_per_km(double per_m);

// Crosstalk: a power ratio accrued per km. -60 dB/km -> 1e-9 1/m.
double crosstalk_db_per_km_to_per_m(double db_per_km);
double crosstalk_per_m_to_db_per_km(double per_m);

double thz_to_hz(double thz);
double hz_to_thz(double hz);
double ghz_to_hz(double ghz);
double hz_to_ghz(double hz);
double km_to_m(double km);
double m_to_km(double m);

// gamma, Raman gain peak: 1/W/km -> 1/(W m)
double per_w_km_to_per_w_m(double v);
double per_w_m_to_per_w_km(double v);

// Raman gain slope: 1/W/km/THz -> 1/(W m Hz)
double raman_slope_to_si(double per_w_km_thz);
double raman_slope_from_si(double si);

// beta2: ps^2/km -> s^2/m
double ps2_per_km_to_si(double v);
double si_to_ps2_per_km(double v);

double per_km_to_per_m(double v);
double per_m_to_per_km(double v);

double um2_to_m2(double v);
double m2_to_um2(double v);

// Power ratio in dB; zero or negative power maps to -inf.
double ratio_db(double num, double den);

// PSD reporting: W/Hz -> mW/GHz
double w_per_hz_to_mw_per_ghz(double v);

}  // namespace coexsim::units
