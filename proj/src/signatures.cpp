#include "enose/simulator.hpp"

namespace enose {

// Raw responses on a 10-bit ADC-like scale. Channel order:
// mq2, mq135, mq3, tgs2610, tgs2611.
//
// Each chemical peaks on a different sensor. Floor cleaner, isopropyl alcohol
// and lighter gas lie on a common intensity ladder above the clean-air
// baseline, so the middle rungs cannot be cut out with a single hyperplane.
// Isopropyl alcohol and lighter gas share the most overlapping channels.
std::array<ChemicalSignature, kClasses> default_signatures() {
  return {{
      {ChemicalClass::None,
       {60.0, 70.0, 50.0, 40.0, 45.0},
       {10.0, 10.0, 8.0, 8.0, 8.0},
       {0.4, 0.5, 0.3, 0.3, 0.3},
       {-0.6, -0.5, -0.4, -0.5, -0.5}},
      {ChemicalClass::Acetone,
       {150.0, 420.0, 200.0, 90.0, 80.0},
       {35.0, 55.0, 40.0, 20.0, 20.0},
       {0.8, 1.5, 0.9, 0.4, 0.4},
       {-1.2, -2.5, -1.4, -0.8, -0.7}},
      {ChemicalClass::FloorCleaner,
       {215.0, 180.0, 190.0, 185.0, 150.0},
       {22.0, 20.0, 22.0, 22.0, 65.0},
       {1.0, 0.8, 0.8, 0.8, 0.6},
       {-1.5, -1.2, -1.2, -1.2, -1.0}},
      {ChemicalClass::IsopropylAlcohol,
       {320.0, 280.0, 350.0, 325.0, 240.0},
       {30.0, 28.0, 32.0, 30.0, 25.0},
       {1.2, 1.0, 1.4, 1.2, 0.9},
       {-2.0, -1.6, -2.4, -2.0, -1.5}},
      {ChemicalClass::LighterGas,
       {450.0, 390.0, 460.0, 490.0, 340.0},
       {40.0, 35.0, 40.0, 42.0, 35.0},
       {1.4, 1.2, 1.5, 1.6, 1.1},
       {-2.6, -2.2, -2.7, -3.0, -2.0}},
  }};
}

SimConfig default_sim_config() {
  SimConfig cfg;
  cfg.signatures = default_signatures();
  return cfg;
}

}  // namespace enose
