#include "cosim/unit.hpp"

#include <cmath>
#include <sstream>

#include "cosim/errors.hpp"

namespace cosim {

SimulationUnit::SimulationUnit(std::string reference, AnyModel model, StepperKind stepper,
                               double internal_step, ApproximationKind approximation,
                               Reactivity reactivity, UnitOptions options)
    : reference_(std::move(reference)),
      model_(std::move(model)),
      stepper_(stepper),
      internal_step_(internal_step),
      approximation_(approximation),
      reactivity_(reactivity),
      options_(std::move(options)),
      state_dim_(cosim::state_dim(model_)),
      input_dim_(cosim::input_dim(model_)),
      output_dim_(cosim::output_dim(model_)),
      buffer_(options_.buffer_capacity) {
    if (reference_.empty()) throw ValidationError("unit: reference must not be empty");
    if (!(internal_step_ > 0.0))
        throw ValidationError("unit '" + reference_ + "': internal step must be positive");
    if (stepper_ == StepperKind::Godunov && !std::holds_alternative<SecondOrderModel>(model_))
        throw ValidationError("unit '" + reference_ +
                              "': the godunov solver applies to second-order models only");
    const bool interpolating = approximation_ == ApproximationKind::LinearInterpolation;
    const bool reactive = reactivity_.input == InputContract::Reactive;
    if (input_dim_ > 0 && reactive != interpolating)
        throw ValidationError("unit '" + reference_ +
                              "': input-reactive units use linear interpolation and "
                              "input-delayed units must not");
    if (options_.godunov_bootstrap) {
        const auto* so = std::get_if<SecondOrderModel>(&model_);
        if (!so || options_.godunov_bootstrap->size() != so->dim)
            throw ValidationError("unit '" + reference_ + "': bootstrap override has wrong shape");
    }
    state_ = initial_state(model_);
    if (state_.size() != state_dim_ || !all_finite(state_))
        throw ValidationError("unit '" + reference_ + "': bad initial state");
}

const LinearSystemModel* SimulationUnit::linear_model() const {
    return std::get_if<LinearSystemModel>(&model_);
}

unsigned long SimulationUnit::internal_steps_for(double H) const {
    if (!(H > 0.0)) throw ValidationError("unit '" + reference_ + "': step must be positive");
    const double ratio = H / internal_step_;
    const auto k = static_cast<unsigned long>(std::llround(ratio));
    if (k < 1 || std::abs(k * internal_step_ - H) > 1e-9 * H) {
        std::ostringstream os;
        os << "unit '" << reference_ << "': internal step " << internal_step_
           << " does not divide the communication step " << H;
        throw ValidationError(os.str());
    }
    return k;
}

InputFn SimulationUnit::make_input_fn(const StepArguments& args, Interval interval) const {
    if (input_dim_ == 0) {
        return [](double) { return Vec{}; };
    }
    if (reactivity_.input == InputContract::Reactive) {
        return [this, interval, uc = args.uc](double t) {
            return evaluate(buffer_, ApproximationKind::LinearInterpolation, t, interval, uc);
        };
    }
    return [this, interval](double t) { return evaluate(buffer_, approximation_, t, interval); };
}

void SimulationUnit::log_internal(double t) {
    if (log_enabled_) internal_log_.push_back(Sample{t, state_});
}

void SimulationUnit::do_step(const StepArguments& args) {
    const unsigned long k = internal_steps_for(args.H);
    if (args.uc.size() != input_dim_)
        throw ValidationError("unit '" + reference_ + "': uc dimension mismatch");
    if (args.up && args.up->size() != input_dim_)
        throw ValidationError("unit '" + reference_ + "': up dimension mismatch");

    snapshot_ = Snapshot{state_,       time_,         buffer_,       godunov_prev_,
                         bootstrapped_, last_interval_, internal_log_.size()};

    const Interval interval{time_, time_ + args.H};
    if (input_dim_ > 0) {
        // The sample at the interval start: up under Gauss-Seidel, uc when
        // the orchestrator provides only the current input (Jacobi).
        push_input_sample(interval.begin, args.up ? *args.up : args.uc);
    }
    if (internal_log_.empty() && log_enabled_) log_internal(time_);

    try {
        advance(args, interval, k);
    } catch (const SimulationError& e) {
        std::ostringstream os;
        os << "unit '" << reference_ << "': " << e.what();
        throw SimulationError(os.str());
    }

    if (!all_finite(state_)) {
        std::ostringstream os;
        os << "unit '" << reference_ << "': non-finite state at t=" << interval.end;
        throw SimulationError(os.str());
    }
    time_ = interval.end;
    last_interval_ = interval;
}

void SimulationUnit::advance(const StepArguments& args, Interval interval, unsigned long k) {
    const InputFn u = make_input_fn(args, interval);
    const double h = internal_step_;

    if (stepper_ == StepperKind::Godunov) {
        advance_godunov(u, interval, k);
        return;
    }

    DerivFn f = [this](const Vec& x, const Vec& in) { return model_derivative(model_, x, in); };
    for (unsigned long j = 0; j < k; ++j) {
        const double tau = interval.begin + static_cast<double>(j) * h;
        switch (stepper_) {
            case StepperKind::ExplicitEuler:
                state_ = explicit_euler_step(f, state_, u, tau, h);
                break;
            case StepperKind::Midpoint:
                state_ = midpoint_step(f, state_, u, tau, h);
                break;
            case StepperKind::ImplicitEuler:
                state_ = implicit_euler_step(f, state_, u, tau, h, options_.iteration,
                                             options_.guess);
                break;
            case StepperKind::Godunov:
                break;  // handled above
        }
        log_internal(tau + h);
    }
}

void SimulationUnit::advance_godunov(const InputFn& u, Interval interval, unsigned long k) {
    const auto& so = std::get<SecondOrderModel>(model_);
    const std::size_t dim = so.dim;
    const double h = internal_step_;

    Vec pos(state_.begin(), state_.begin() + dim);
    Vec vel(state_.begin() + dim, state_.end());

    for (unsigned long j = 0; j < k; ++j) {
        const double tau = interval.begin + static_cast<double>(j) * h;
        if (!bootstrapped_) {
            // x(h) is not reachable by the two-step formula; one explicit
            // Euler step on the first-order form (or the supplied value).
            Vec new_pos, new_vel;
            if (options_.godunov_bootstrap) {
                new_pos = *options_.godunov_bootstrap;
                new_vel.resize(dim);
                for (std::size_t i = 0; i < dim; ++i) new_vel[i] = (new_pos[i] - pos[i]) / h;
            } else {
                Vec acc = so.F2(pos, vel, u(tau));
                if (!all_finite(acc)) throw SimulationError("non-finite acceleration");
                new_pos = add_scaled(pos, h, vel);
                new_vel = add_scaled(vel, h, acc);
            }
            godunov_prev_ = pos;
            pos = std::move(new_pos);
            vel = std::move(new_vel);
            bootstrapped_ = true;
        } else {
            GodunovResult r = godunov_step(so.F2, pos, *godunov_prev_, u, tau, h);
            godunov_prev_ = pos;
            pos = std::move(r.position);
            vel = std::move(r.velocity);
        }
        for (std::size_t i = 0; i < dim; ++i) {
            state_[i] = pos[i];
            state_[dim + i] = vel[i];
        }
        log_internal(tau + h);
    }
}

Vec SimulationUnit::get_output(const Vec& uc) const {
    if (uc.size() != input_dim_)
        throw ValidationError("unit '" + reference_ + "': output input dimension mismatch");
    if (input_dim_ == 0 || reactivity_.output == OutputContract::Reactive)
        return model_output(model_, state_, uc);

    // Output-delayed: evaluate the buffered approximation at the current
    // time. An input-reactive unit falls back to a hold here, which is
    // exactly u(t_i). Before any step there is no buffered past, so the
    // provided value (the input at t_0) is all there is.
    if (buffer_.empty()) return model_output(model_, state_, uc);
    const ApproximationKind kind = approximation_ == ApproximationKind::LinearInterpolation
                                       ? ApproximationKind::ZeroOrderHold
                                       : approximation_;
    Vec u_delayed = evaluate(buffer_, kind, time_, last_interval_);
    return model_output(model_, state_, u_delayed);
}

void SimulationUnit::rollback() {
    if (!snapshot_)
        throw ValidationError("unit '" + reference_ + "': no step to roll back");
    state_ = snapshot_->state;
    time_ = snapshot_->time;
    buffer_ = snapshot_->buffer;
    godunov_prev_ = snapshot_->godunov_prev;
    bootstrapped_ = snapshot_->bootstrapped;
    last_interval_ = snapshot_->last_interval;
    internal_log_.resize(snapshot_->log_size);
    snapshot_.reset();
}

void SimulationUnit::push_input_sample(double t, Vec u) {
    if (u.size() != input_dim_)
        throw ValidationError("unit '" + reference_ + "': input sample dimension mismatch");
    if (!all_finite(u))
        throw ValidationError("unit '" + reference_ + "': input sample must be finite");
    buffer_.push(t, std::move(u));
}

void SimulationUnit::enable_internal_log(bool on) {
    log_enabled_ = on;
    if (!on) internal_log_.clear();
}

} // namespace cosim
