#pragma once

// Generated by tests/oracles/svm_dual_qp.py; do not edit by hand.

#include <vector>

namespace entrain::testing {

struct SvmDualCase {
  int dims;
  std::vector<double> x;  // row-major
  std::vector<int> y;     // 1 or 0
  double dual_objective;
};

inline const std::vector<SvmDualCase>& svm_dual_cases() {
  static const std::vector<SvmDualCase> cases{
      {2, {1.910131, 1.603587, -1.971725, -3.911217, 2.405773, 1.799625, -2.847371, -2.022783, 0.169846, 1.962907, -2.852605, -1.711625},
       {1, 0, 1, 0, 1, 0}, -0.0883493864374007},
      {2, {1.149549, -0.220756, -1.640275, -2.177144, -0.080583, 1.026521, 0.150164, -0.478307, 0.741906, -0.16034, -0.511337, -1.522796, 0.946736, 0.504513, 0.148911, -0.504636, 2.075932, 0.298892, 0.048838, -0.481946},
       {1, 0, 1, 0, 1, 0, 1, 0, 1, 0}, -2.9197795060076994},
      {3, {1.985231, -1.673379, 1.162933, -1.312327, -1.157322, -0.307038, -1.221884, -0.905906, -0.216867, -0.611159, -2.192354, -1.162306, 0.142762, 0.156748, -0.373633, -0.292764, -0.80205, 0.884824, -0.52046, 0.347779, -0.20092, 0.565887, -1.260224, 0.587927, -0.906627, -1.078322, -0.259794, -0.196548, -1.809699, -0.792865, 0.284705, 0.253117, 1.164241, 0.495598, 0.044156, 0.624758},
       {1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0}, -8.58040979430729},
      {4, {1.689726, -0.359162, 2.935262, 0.701073, -1.355942, -0.149851, -1.238577, -0.122843, -0.451399, 1.475358, -0.513874, 1.125733, -0.963225, -1.251483, -0.596927, -1.325308, -0.021943, 1.144906, 2.681207, -0.247757, 0.405167, 0.331558, -1.87008, -0.559765, 1.274039, -0.160856, 1.829218, 1.62791, 0.948438, -0.360166, 0.19603, 1.062117, 0.952991, 0.249777, -0.700914, 1.036455, -2.017217, 0.347693, -0.602835, 0.061057, 0.912714, 1.988331, 0.293645, 0.800068, 0.650115, -2.008311, -0.557473, 0.225257, -0.313533, 0.050281, -0.499911, 1.930756, -0.93938, -1.065153, -2.162544, -1.813788, 1.676532, 0.560534, 0.349113, 1.541898, -1.65587, 0.863377, -1.118215, -1.263043},
       {1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0}, -2.5534852566037687},
      {2, {-0.053033, 0.249474, 0.489037, -0.910968, -0.611895, 0.250289, 0.126814, 0.665123, -0.264621, 1.179144, -1.232025, 1.173646, -0.87994, 0.125868, -0.016838, 0.801036, 1.6723, 0.261363, 1.683512, -1.031657, 0.539218, -0.024769, 0.360295, -1.16399, -0.885705, 1.495293, 0.851898, 0.348986, -0.490081, 0.804203, 0.235026, 1.021331, 0.445048, -1.402387, -0.428392, -0.239577, 1.004337, -0.035641, -1.270349, 0.93826},
       {1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0}, -19.302816871692997},
      {5, {0.74337, -0.739653, -0.306068, 1.276916, -0.991597, 0.610205, -0.334899, -0.50999, 0.508315, -0.781928, 0.413551, 1.992773, -0.487099, 2.179456, -1.328346, -1.214219, 0.543146, -1.020615, -0.676106, 0.431811, 1.315576, 0.847803, -0.183568, 0.986038, 0.511636, 0.821411, 0.032099, -1.153699, -0.483159, -1.910092, 0.987036, 0.804809, 0.376541, -0.98781, -0.03116, 0.324432, -0.542074, -0.237667, 0.787405, 0.275711, -1.240973, 0.724415, -0.57809, -1.867128, 1.517744, -1.843369, -0.673311, 0.8912, 0.345248, -0.41982, -0.530091, 0.653894, 0.2895, 1.179176, 0.746019, 0.37135, -1.861387, -1.216834, -0.198062, 0.011111, -0.266483, -0.344049, 0.330694, 0.482694, 2.321793, -0.741721, 0.179693, -2.070599, -0.45817, -0.679012, -0.930671, -0.61284, -0.287573, -0.424179, -1.540103, -0.681481, -0.456697, -0.663922, 0.456568, -0.528807, 0.457053, 0.321869, 0.474657, -0.701928, 0.070728, 1.43429, -0.031403, -0.521663, -0.80783, 0.020599, 0.363443, 0.574077, 1.23293, 0.502159, 0.267648, -0.971509, -1.683643, 0.06897, 0.000355, -1.017615},
       {1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0, 1, 0}, -8.84701513340172},
  };
  return cases;
}

}  // namespace entrain::testing
