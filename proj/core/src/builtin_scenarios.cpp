#include "cosim/builtin_scenarios.hpp"

#include "cosim/builtin_models.hpp"

namespace cosim::scenarios {

Scenario car(StepperKind solver) {
    Scenario s;
    UnitOptions opts;
    opts.model_tag = "car";
    s.units.emplace("car", SimulationUnit("car", models::cruise_car(), solver, 0.2,
                                          ApproximationKind::ZeroOrderHold, Reactivity{}, opts));
    s.H = 0.2;
    s.T = 10.0;
    s.orchestrator.kind = OrchestratorKind::GaussSeidel;
    return s;
}

Scenario msd(StepperKind solver, double h, double H, double T) {
    Scenario s;
    UnitOptions opts;
    opts.model_tag = "msd";
    s.units.emplace("msd", SimulationUnit("msd", models::mass_spring_damper(), solver, h,
                                          ApproximationKind::ZeroOrderHold, Reactivity{}, opts));
    s.H = H;
    s.T = T;
    s.orchestrator.kind = OrchestratorKind::GaussSeidel;
    return s;
}

Scenario car_passenger() {
    Scenario s;
    {
        UnitOptions opts;
        opts.model_tag = "motor";
        s.units.emplace("motor",
                        SimulationUnit("motor", models::motor(), StepperKind::Godunov, 1e-3,
                                       ApproximationKind::ZeroOrderHold, Reactivity{}, opts));
    }
    {
        UnitOptions opts;
        opts.model_tag = "chain_car";
        s.units.emplace(
            "car", SimulationUnit("car", models::chain_car(), StepperKind::ExplicitEuler, 0.01,
                                  ApproximationKind::ZeroOrderHold,
                                  Reactivity{InputContract::Delayed, OutputContract::Reactive},
                                  opts));
    }
    {
        UnitOptions opts;
        opts.model_tag = "chain_passenger";
        s.units.emplace(
            "passenger",
            SimulationUnit("passenger", models::chain_passenger(), StepperKind::ExplicitEuler,
                           1e-4, ApproximationKind::ZeroOrderHold, Reactivity{}, opts));
    }
    s.couplings.push_back({"motor", 0, "car", 0});      // motor position drives the car
    s.couplings.push_back({"car", 0, "passenger", 0});  // car acceleration shakes the passenger
    s.H = 0.01;
    s.T = 1.0;
    s.orchestrator.kind = OrchestratorKind::GaussSeidel;
    return s;
}

Scenario split_msd(double c_f, double H, StepperKind solver, OrchestratorKind kind, double T) {
    Scenario s;
    {
        // position integrator: x' = v_in, output x
        LinearSystemModel m(Matrix{{0.0}}, Matrix{{1.0}}, Matrix{{1.0}}, Matrix{{0.0}},
                            Vec{1.0});
        s.units.emplace(
            "pos", SimulationUnit("pos", std::move(m), solver, H,
                                  ApproximationKind::ZeroOrderHold,
                                  Reactivity{InputContract::Delayed, OutputContract::Reactive}));
    }
    {
        // velocity: v' = -x_in - c_f v, output v
        LinearSystemModel m(Matrix{{-c_f}}, Matrix{{-1.0}}, Matrix{{1.0}}, Matrix{{0.0}},
                            Vec{0.0});
        s.units.emplace(
            "vel", SimulationUnit("vel", std::move(m), solver, H,
                                  ApproximationKind::ZeroOrderHold,
                                  Reactivity{InputContract::Delayed, OutputContract::Reactive}));
    }
    s.couplings.push_back({"vel", 0, "pos", 0});
    s.couplings.push_back({"pos", 0, "vel", 0});
    s.H = H;
    s.T = T;
    s.orchestrator.kind = kind;
    return s;
}

} // namespace cosim::scenarios
