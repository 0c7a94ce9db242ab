// Generated by tests/oracles/generate_oracles.py with mpmath at 40 digits.
// Do not edit by hand.
#pragma once

namespace oracles {

struct Point1 { double x, value; };
struct Hyp { double a, b, c, z, value; };
struct Limit { const char* regime; double a, b, c, value; };
struct Norm { int N; double s, value; };
struct Psi { int N; double s, beta, r, value; };
struct Theta { int N; double s, beta, value; };

inline constexpr Point1 kGamma[] = {
    {0.5, 1.772453850905516},
    {1.0, 1.0},
    {1.5, 0.886226925452758},
    {2.5, 1.329340388179137},
    {7.3, 1271.4236336639087},
    {0.01, 99.4325851191506},
    {-0.5, -3.544907701811032},
    {-0.25, -4.901666809860711},
    {-1.5, 2.363271801207355},
    {-2.7, -0.931082784838964},
    {25.0, 6.204484017332394e+23},
    {171.3, 3.3916736099727207e+307},
};
inline constexpr Point1 kDigamma[] = {
    {0.5, -1.9635100260214235},
    {1.0, -0.5772156649015329},
    {3.7, 1.1671535393615113},
    {12.0, 2.442661679975812},
    {-0.5, 0.03648997397857652},
};
inline constexpr Hyp kHyp2F1[] = {
    {1.0, 1.0, 3.0, 0.5, 1.2274112777602189},
    {1.625, 1.625, 1.5, -4.0, 0.05806023725913424},
    {1.625, 1.475, 1.5, -400.0, 7.26574412278323e-05},
    {-0.25, 1.625, 1.5, 0.8, 0.6277320815902248},
    {-0.25, 1.625, 1.5, 0.999999, -0.520779025368028},
    {0.5, 0.5, 1.0, 0.9, 1.6412644143423707},
    {1.5, 2.0, 2.0, 0.95, 89.44271909999146},
    {2.0, 3.0, 4.0, -0.3, 0.6711890926942962},
    {0.3, 0.7, 1.0, 0.99, 2.1077109177178976},
    {1.0, 2.0, 2.0, 0.97, 33.33333333333331},
    {2.375, 1.875, 1.5, -25.0, -0.0004891550237568842},
};
inline constexpr Limit kLimits[] = {
    {"kFinite", 1.0, 1.0, 3.0, 2.0},
    {"kLogarithmic", 1.0, 1.0, 2.0, 1.0},
    {"kAlgebraic", 1.5, 2.0, 2.0, 1.0},
    {"kFinite", -0.25, 1.625, 1.5, -0.8333821254515309},
};
inline constexpr Norm kNormalization[] = {
    {1, 0.5, 0.3183098861837907},
    {2, 0.25, 0.08324198387542507},
    {3, 0.25, 0.04762022695068073},
    {3, 0.75, 0.11905056737670182},
    {4, 0.5, 0.07599088773175333},
};
inline constexpr Psi kFracLapPsi[] = {
    {3, 0.25, 1.0, 2.0, 0.2617684969185377},
    {3, 0.25, 2.75, 0.0, 1.479250948649763},
    {3, 0.25, 3.2, 8.0, -9.949029399851985e-05},
    {2, 0.5, 1.5, 1.0, 0.3446666553694827},
    {4, 0.75, 3.5, 3.0, -0.001935796688219071},
    {2, 0.25, 1.4, 11.0, 0.003945279974751377},
    {4, 0.25, 4.2, 0.5, 1.0201120461729603},
};
inline constexpr Theta kPowerTheta[] = {
    {3, 0.25, 0.25, 0.4199990323574479},
    {3, 0.5, 1.0, 0.6366197723675814},
    {4, 0.25, 1.5, 1.0460496200531018},
};
inline constexpr Theta kFarConstant[] = {
    {3, 0.25, 2.75, 0.8333821254515309},
    {3, 0.25, 3.0, 0.19672343316934937},
    {3, 0.25, 3.2, 1.8189854754001893},
    {4, 0.5, 3.5, 0.5564178944493822},
};

}  // namespace oracles
