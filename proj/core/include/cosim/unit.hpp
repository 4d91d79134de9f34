#pragma once

#include <optional>
#include <string>

#include "cosim/approximation.hpp"
#include "cosim/ode.hpp"
#include "cosim/solvers.hpp"

namespace cosim {

enum class InputContract { Reactive, Delayed };
enum class OutputContract { Reactive, Delayed };

/// The four doStep/getOutput contracts: whether the step needs the input
/// at the end of the interval, and whether the output does.
struct Reactivity {
    InputContract input = InputContract::Delayed;
    OutputContract output = OutputContract::Delayed;
};

/// Inputs handed to a step. uc is the current input: the interval
/// endpoint for input-reactive units, the interval-start sample under a
/// Jacobi orchestrator. up is the previous input (Gauss-Seidel only) and,
/// when present, is the sample at the interval start.
struct StepArguments {
    double H = 0.0;
    Vec uc;
    std::optional<Vec> up;
};

struct UnitOptions {
    bool rollbackable = true;
    IterationConfig iteration{};
    GuessMode guess = GuessMode::ExplicitPredictor;
    std::optional<Vec> godunov_bootstrap;  ///< exact x(h) override for the first step
    std::size_t buffer_capacity = 2;
    std::string model_tag;  ///< built-in model name, kept for serialization
};

/// Black-box simulation unit: a model, a solver with a fixed internal
/// step, an input approximation, the reactivity contracts, and a one-deep
/// snapshot for rollback.
class SimulationUnit {
public:
    SimulationUnit(std::string reference, AnyModel model, StepperKind stepper,
                   double internal_step, ApproximationKind approximation, Reactivity reactivity,
                   UnitOptions options = {});

    const std::string& reference() const { return reference_; }
    const AnyModel& model() const { return model_; }
    /// Non-null when the unit wraps a linear model (analysis needs this).
    const LinearSystemModel* linear_model() const;
    StepperKind stepper() const { return stepper_; }
    double internal_step() const { return internal_step_; }
    ApproximationKind approximation() const { return approximation_; }
    Reactivity reactivity() const { return reactivity_; }
    const UnitOptions& options() const { return options_; }

    std::size_t state_dim() const { return state_dim_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t output_dim() const { return output_dim_; }

    double time() const { return time_; }
    const Vec& state() const { return state_; }
    const InputBuffer& input_buffer() const { return buffer_; }

    /// Number of internal steps for a communication step H; throws unless
    /// the internal step divides H to 1e-9 relative.
    unsigned long internal_steps_for(double H) const;

    /// Advance the state by args.H. A snapshot is taken on entry, so the
    /// step can always be rolled back.
    void do_step(const StepArguments& args);

    /// Output at the current time. Output-reactive units evaluate with uc;
    /// output-delayed units evaluate with the buffered approximation at
    /// the current time (before the first step, uc is all there is).
    Vec get_output(const Vec& uc) const;

    /// Restore the state, buffer, and solver history saved by the most
    /// recent do_step. Calling twice without a step in between is an error.
    void rollback();

    /// Record (t, u) as a past input sample; time must strictly increase.
    void push_input_sample(double t, Vec u);

    void enable_internal_log(bool on);
    const std::vector<Sample>& internal_log() const { return internal_log_; }

private:
    struct Snapshot {
        Vec state;
        double time;
        InputBuffer buffer;
        std::optional<Vec> godunov_prev;
        bool bootstrapped;
        Interval last_interval;
        std::size_t log_size;
    };

    InputFn make_input_fn(const StepArguments& args, Interval interval) const;
    void advance(const StepArguments& args, Interval interval, unsigned long k);
    void advance_godunov(const InputFn& u, Interval interval, unsigned long k);
    void log_internal(double t);

    std::string reference_;
    AnyModel model_;
    StepperKind stepper_;
    double internal_step_;
    ApproximationKind approximation_;
    Reactivity reactivity_;
    UnitOptions options_;

    std::size_t state_dim_, input_dim_, output_dim_;

    Vec state_;
    double time_ = 0.0;
    InputBuffer buffer_;
    std::optional<Vec> godunov_prev_;  ///< position one internal step back
    bool bootstrapped_ = false;
    Interval last_interval_{0.0, 0.0};

    std::optional<Snapshot> snapshot_;
    bool log_enabled_ = false;
    std::vector<Sample> internal_log_;
};

} // namespace cosim
