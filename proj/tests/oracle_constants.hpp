// Generated by tests/oracles/gen_constants.py (mpmath, 50 digits). Do not edit.
#pragma once

#include <array>

namespace oracle {

inline constexpr double kRegGammaP_10_20 = 9.9500458769169241283e-1;
inline constexpr double kGaussianQ_3_0902 = 1.0001087832070712701e-3;
inline constexpr double kGaussianQInv_0_001 = 3.0902323061678135415;
inline constexpr double kDefaultPf = 4.9954123083075871662e-3;
inline constexpr double kDefaultPd = 9.2393652485860862685e-1;
inline constexpr double kFbRate_snr3_n990_eps1e3 = 1.8628064454754708574;
inline constexpr double kFbError_snr3_n990_r1_8628 = 9.995112692161562457e-4;
inline constexpr double kEps2_defaults_r2_2 = 1.0;
inline constexpr double kEps2_defaults_r2_0_005 = 2.4224633195750720221e-1;
inline constexpr double kVariableRate_snr200_n990_eps1e3 = 7.5093605509364979153;
inline constexpr double kVariableRateIdle_defaults_eps1e3 = 6.4766279605660884492e-4;
inline constexpr double kEpsMiss_defaults_eps1e3 = 5.7272907062241172925e-2;
inline constexpr double kEpsFalseAlarm_defaults_eps1e3 = 8.6522160958510015436e-3;
inline constexpr double kPhiFixed_theta1e3_n990_r1 = 3.7157669102204569053e-1;

inline constexpr std::array<double, 8> kRowsFixedR1R2OneBusy = {
    0.0,
    3.6957460994344345074e-1,
    0.0,
    3.042539005655654926e-2,
    0.0,
    2.9972473849845522997e-3,
    0.0,
    5.970027526150154477e-1};
inline constexpr std::array<double, 8> kRowsFixedR1R2OneIdle = {
    0.0,
    1.8478730497172172537e-1,
    0.0,
    1.521269502827827463e-2,
    0.0,
    3.996329846646069733e-3,
    0.0,
    7.9600367015335393027e-1};
inline constexpr std::array<double, 8> kRowsFixedSmallRatesBusy = {
    8.570844881001659268e-2,
    2.8386616113342685806e-1,
    1.2741576477761486903e-5,
    3.0412648480078787773e-2,
    1.8574904920754045325e-3,
    1.1397568929091477672e-3,
    3.9019230844873590075e-1,
    2.0681044416627954695e-1};
inline constexpr std::array<double, 8> kRowsFixedSmallRatesIdle = {
    4.285422440500829634e-2,
    1.4193308056671342903e-1,
    6.3707882388807434514e-6,
    1.5206324240039393887e-2,
    2.47665398943387271e-3,
    1.5196758572121970229e-3,
    5.20256411264981201e-1,
    2.7574725888837272926e-1};
inline constexpr std::array<double, 8> kRowsVariableEps1e3Busy = {
    3.6920503533350000729e-1,
    3.6957460994344345074e-4,
    2.868283951951494931e-2,
    1.7425505370415999498e-3,
    2.9713145529169416328e-3,
    2.5932832067610666885e-5,
    5.9640574986240043225e-1,
    5.970027526150154477e-4};
inline constexpr std::array<double, 8> kRowsVariableEps1e3Idle = {
    1.8460251766675000364e-1,
    1.8478730497172172537e-4,
    1.4341419759757474655e-2,
    8.7127526852079997491e-4,
    3.9617527372225888438e-3,
    3.457710942348088918e-5,
    7.9520766648320057634e-1,
    7.9600367015335393027e-4};

}  // namespace oracle
