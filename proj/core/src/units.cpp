#include "coexsim/units.hpp"

#include <cmath>
#include <limits>

namespace coexsim::units {

namespace {
constexpr double kLn10Over10 = 0.23025850929940457;  // ln(10)/10
}

double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
double watt_to_dbm(double watt) {
  if (watt <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(watt / 1e-3);
}

double db_per_km_to_per_m(double db_per_km) { return db_per_km * kLn10Over10 / 1e3; }
double per_m_to_db_per_km(double per_m) { return per_m * 1e3 / kLn10Over10; }

double crosstalk_db_per_km_to_per_m(double db_per_km) {
  return std::pow(10.0, db_per_km / 10.0) / 1e3;
}
double crosstalk_per_m_to_db_per_km(double per_m) {
  if (per_m <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(per_m * 1e3);
}

double thz_to_hz(double thz) { return thz * 1e12; }
double hz_to_thz(double hz) { return hz / 1e12; }
double ghz_to_hz(double ghz) { return ghz * 1e9; }
double hz_to_ghz(double hz) { return hz / 1e9; }
double km_to_m(double km) { return km * 1e3; }
double m_to_km(double m) { return m / 1e3; }

double per_w_km_to_per_w_m(double v) { return v / 1e3; }
double per_w_m_to_per_w_km(double v) { return v * 1e3; }

double raman_slope_to_si(double per_w_km_thz) { return per_w_km_thz / 1e3 / 1e12; }
double raman_slope_from_si(double si) { return si * 1e3 * 1e12; }

double ps2_per_km_to_si(double v) { return v * 1e-24 / 1e3; }
double si_to_ps2_per_km(double v) { return v / 1e-24 * 1e3; }

double per_km_to_per_m(double v) { return v / 1e3; }
double per_m_to_per_km(double v) { return v * 1e3; }

double um2_to_m2(double v) { return v * 1e-12; }
double m2_to_um2(double v) { return v * 1e12; }

double ratio_db(double num, double den) {
  if (num <= 0.0 || den <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(num / den);
}

double w_per_hz_to_mw_per_ghz(double v) { return v * 1e12; }

}  // namespace coexsim::units
