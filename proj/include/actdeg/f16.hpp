#pragma once

// Linearized longitudinal F-16 model, trimmed for steady level flight at
// 10000 ft and 900 ft/s.
//   states  x = (theta, Vt, alpha, q)
//   inputs  u = (T, delta_e, delta_lef)
//   d enters through the Vt equation.
//   z = Wz [theta - alpha; Vt],  Wz = diag(11.46, 0.1)

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

#include "actdeg/lti.hpp"

namespace actdeg::f16 {

struct Model {
  StateSpace plant;  ///< Cz holds the unweighted output map
  VectorXd Wz;       ///< output weights, applied on load
  VectorXd Wd;       ///< disturbance scaling
  std::vector<std::string> state_labels;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;
  std::vector<std::string> disturbance_labels;
  std::vector<std::pair<std::string, std::string>> trim;

  /// Plant with Cz replaced by diag(Wz) Cz.
  StateSpace weighted() const {
    StateSpace s = plant;
    s.Cz = Wz.asDiagonal() * plant.Cz;
    return s;
  }
};

inline Model model() {
  Model m;
  auto& p = m.plant;
  p.A.resize(4, 4);
  p.A << 0.0, 0.0, 0.0, 1.0,
         -32.1699, -0.0358, -131.646, -3.1099,
         0.0, -0.0002, -1.5333, 0.9281,
         0.0, 0.0003, -4.6719, -1.9076;
  p.Bu.resize(4, 3);
  p.Bu << 0.0, 0.0, 0.0,
          0.0016, 0.0525, 0.1574,
          -0.0, -0.0031, 0.0008,
          0.0, -0.4503, -0.0614;
  p.Bd.resize(4, 1);
  p.Bd << 0, 1, 0, 0;
  p.Cz.resize(2, 4);
  p.Cz << 1, 0, -1, 0,
          0, 1, 0, 0;
  p.Dd = MatrixXd::Zero(2, 1);
  m.Wz.resize(2);
  m.Wz << 11.46, 0.1;
  m.Wd = VectorXd::Constant(1, 0.01);
  m.state_labels = {"theta", "Vt", "alpha", "q"};
  m.input_labels = {"T", "delta_e", "delta_lef"};
  m.output_labels = {"theta-alpha", "Vt"};
  m.disturbance_labels = {"d"};
  m.trim = {{"altitude", "10000 ft"},   {"theta", "5.95 deg"},  {"Vt", "900 ft/s"},
            {"alpha", "5.95 deg"},      {"q", "7.85 deg/s"},    {"T", "10461.84 lb"},
            {"delta_e", "-3.82 deg"},   {"delta_lef", "12.42 deg"}};
  return m;
}

}  // namespace actdeg::f16
