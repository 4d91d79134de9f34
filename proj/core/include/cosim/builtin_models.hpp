#pragma once

#include <utility>

#include "cosim/ode.hpp"

namespace cosim::models {

// Cruise-controlled car: v' = (k (v_d - v) - c_f v) / m.
inline constexpr double kCarMass = 1576.0;
inline constexpr double kCarGain = 1e3;
inline constexpr double kCarFriction = 0.5;
inline constexpr double kCarTargetSpeed = 40.0;

/// v' = a v + b with a = -(k + c_f)/m, b = k v_d / m.
double car_decay_rate();
double car_drive();

/// The car as a closed 2-state system [v; 1] via affine augmentation.
/// Output is the speed.
LinearSystemModel cruise_car();

/// Mass-spring-damper x'' = (-c x - c_f x' + f_e)/m as a closed linear
/// system with state [x; v], x0 = [1; 0], no external force.
LinearSystemModel mass_spring_damper(double m = 1.0, double c = 1.0, double c_f = 1e-4);

/// Same system in second-order form with the external force as input.
SecondOrderModel msd_second_order(double m = 1.0, double c = 1.0, double c_f = 1e-4);

// Car-with-passenger decomposition: motor -> car -> passenger.
inline constexpr double kMotorStiffness = 1e4;
inline constexpr double kCarBodyMass = 1576.0;
inline constexpr double kCarDamping = 0.5;
inline constexpr double kCarCtrlGain = 1e3;
inline constexpr double kMotorForceGain = 5e4;
inline constexpr double kTorsoMass = 75.0;
inline constexpr double kTorsoStiffness = 1e5;
inline constexpr double kTorsoDamping = 1e5;
inline constexpr double kHeadMass = 5.0;
inline constexpr double kHeadStiffness = 1e6;
inline constexpr double kHeadDamping = 1e4;

/// Total vehicle mass (car body plus passenger).
double total_car_mass();

/// Motor vibrations x'' = -c_m x, x(0) = 1, x'(0) = 0. No inputs.
SecondOrderModel motor();

/// The motor as a closed linear 2-state system, for oracle use.
LinearSystemModel motor_linear();

/// Car block of the chain: state [v; 1], input x_motor, output the car
/// acceleration (feedthrough from the motor position).
LinearSystemModel chain_car();

/// Passenger block: states [x_t, v_t, x_h, v_h], input the car
/// acceleration, outputs all four states.
LinearSystemModel chain_passenger();

/// The full coupled system as one linear IVP with constant forcing;
/// states [x_m, v_m, v_c, x_t, v_t, x_h, v_h].
std::pair<LinearSystemModel, AffineDrive> chain_monolithic();

} // namespace cosim::models
