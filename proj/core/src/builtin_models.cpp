#include "cosim/builtin_models.hpp"

namespace cosim::models {

double car_decay_rate() { return -(kCarGain + kCarFriction) / kCarMass; }

double car_drive() { return kCarGain * kCarTargetSpeed / kCarMass; }

LinearSystemModel cruise_car() {
    const double a = car_decay_rate();
    const double b = car_drive();
    Matrix A{{a, b}, {0.0, 0.0}};
    Matrix C{{1.0, 0.0}};
    return LinearSystemModel(std::move(A), Matrix(2, 0), std::move(C), Matrix(1, 0),
                             Vec{0.0, 1.0});
}

LinearSystemModel mass_spring_damper(double m, double c, double c_f) {
    Matrix A{{0.0, 1.0}, {-c / m, -c_f / m}};
    return LinearSystemModel::autonomous(std::move(A), Vec{1.0, 0.0});
}

SecondOrderModel msd_second_order(double m, double c, double c_f) {
    SecondOrderModel s;
    s.dim = 1;
    s.input_dim = 1;
    s.F2 = [m, c, c_f](const Vec& pos, const Vec& vel, const Vec& input) {
        return Vec{(-c * pos[0] - c_f * vel[0] + input[0]) / m};
    };
    s.x0 = {1.0};
    s.v0 = {0.0};
    return s;
}

double total_car_mass() { return kCarBodyMass + kTorsoMass + kHeadMass; }

SecondOrderModel motor() {
    SecondOrderModel s;
    s.dim = 1;
    s.input_dim = 0;
    s.F2 = [](const Vec& pos, const Vec&, const Vec&) { return Vec{-kMotorStiffness * pos[0]}; };
    s.x0 = {1.0};
    s.v0 = {0.0};
    return s;
}

LinearSystemModel motor_linear() {
    Matrix A{{0.0, 1.0}, {-kMotorStiffness, 0.0}};
    return LinearSystemModel::autonomous(std::move(A), Vec{1.0, 0.0});
}

LinearSystemModel chain_car() {
    const double M = total_car_mass();
    const double a = -(kCarCtrlGain + kCarDamping) / M;
    const double b = kCarCtrlGain * kCarTargetSpeed / M;
    const double feed = kMotorForceGain / M;
    Matrix A{{a, b}, {0.0, 0.0}};
    Matrix B{{feed}, {0.0}};
    // output is the car acceleration v' = a v + b + feed * x_motor
    Matrix C{{a, b}};
    Matrix D{{feed}};
    return LinearSystemModel(std::move(A), std::move(B), std::move(C), std::move(D),
                             Vec{0.0, 1.0});
}

LinearSystemModel chain_passenger() {
    const double mt = kTorsoMass, ct = kTorsoStiffness, dt = kTorsoDamping;
    const double mh = kHeadMass, ch = kHeadStiffness, dh = kHeadDamping;
    // states [x_t, v_t, x_h, v_h]; F_h = ch (x_h - x_t) + dh (v_h - v_t)
    Matrix A{{0.0, 1.0, 0.0, 0.0},
             {(-ch - ct) / mt, (-dh - dt) / mt, ch / mt, dh / mt},
             {0.0, 0.0, 0.0, 1.0},
             {ch / mh, dh / mh, -ch / mh, -dh / mh}};
    Matrix B{{0.0}, {-1.0}, {0.0}, {-1.0}};
    return LinearSystemModel(std::move(A), std::move(B), Matrix::identity(4), Matrix(4, 1),
                             Vec{0.0, 0.0, 0.0, 0.0});
}

std::pair<LinearSystemModel, AffineDrive> chain_monolithic() {
    const double M = total_car_mass();
    const double cm = kMotorStiffness;
    const double kc = kCarCtrlGain, dc = kCarDamping, ac = kMotorForceGain;
    const double vd = kCarTargetSpeed;
    const double mt = kTorsoMass, ct = kTorsoStiffness, dt = kTorsoDamping;
    const double mh = kHeadMass, ch = kHeadStiffness, dh = kHeadDamping;

    // states [x_m, v_m, v_c, x_t, v_t, x_h, v_h]
    // car acceleration: v_c' = (-(kc+dc) v_c + ac x_m + kc vd) / M, and the
    // torso/head rows subtract it.
    const double acc_xm = ac / M;
    const double acc_vc = -(kc + dc) / M;
    const double acc_b = kc * vd / M;

    Matrix A(7, 7);
    A(0, 1) = 1.0;
    A(1, 0) = -cm;
    A(2, 0) = acc_xm;
    A(2, 2) = acc_vc;
    // torso
    A(3, 4) = 1.0;
    A(4, 0) = -acc_xm;
    A(4, 2) = -acc_vc;
    A(4, 3) = (-ch - ct) / mt;
    A(4, 4) = (-dh - dt) / mt;
    A(4, 5) = ch / mt;
    A(4, 6) = dh / mt;
    // head
    A(5, 6) = 1.0;
    A(6, 0) = -acc_xm;
    A(6, 2) = -acc_vc;
    A(6, 3) = ch / mh;
    A(6, 4) = dh / mh;
    A(6, 5) = -ch / mh;
    A(6, 6) = -dh / mh;

    Vec b(7, 0.0);
    b[2] = acc_b;
    b[4] = -acc_b;
    b[6] = -acc_b;

    Vec x0{1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    return {LinearSystemModel::autonomous(std::move(A), std::move(x0)), AffineDrive{std::move(b)}};
}

} // namespace cosim::models
