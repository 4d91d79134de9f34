#include "cosim/approximation.hpp"

#include <cmath>

#include "cosim/errors.hpp"

namespace cosim {

const char* to_string(ApproximationKind k) {
    switch (k) {
        case ApproximationKind::ZeroOrderHold: return "zoh";
        case ApproximationKind::FirstOrderExtrapolation: return "first_order_extrapolation";
        case ApproximationKind::LinearInterpolation: return "linear_interpolation";
    }
    return "?";
}

InputBuffer::InputBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw ValidationError("InputBuffer: capacity must be >= 1");
}

void InputBuffer::push(double t, Vec value) {
    if (!std::isfinite(t)) throw ValidationError("InputBuffer: sample time must be finite");
    if (!samples_.empty()) {
        if (!(t > samples_.back().time))
            throw ValidationError("InputBuffer: sample times must strictly increase");
        if (value.size() != samples_.back().value.size())
            throw ValidationError("InputBuffer: sample dimension changed");
    }
    samples_.push_back(Sample{t, std::move(value)});
    if (samples_.size() > capacity_) samples_.pop_front();
}

const Sample& InputBuffer::newest() const {
    if (samples_.empty()) throw ValidationError("InputBuffer: empty");
    return samples_.back();
}

const Sample& InputBuffer::from_newest(std::size_t age) const {
    if (age >= samples_.size()) throw ValidationError("InputBuffer: not enough samples");
    return samples_[samples_.size() - 1 - age];
}

Vec evaluate(const InputBuffer& buffer, ApproximationKind kind, double t, Interval interval,
             const std::optional<Vec>& endpoint) {
    const double span = interval.end - interval.begin;
    const double slack = 1e-12 * std::max(1.0, std::abs(span));
    if (t < interval.begin - slack || t > interval.end + slack)
        throw ValidationError("evaluate: time outside the communication interval");
    if (buffer.empty()) throw ValidationError("evaluate: insufficient samples");

    const Sample& s0 = buffer.newest();
    if (std::abs(s0.time - interval.begin) > 1e-9 * std::max(1.0, std::abs(interval.begin)))
        throw ValidationError("evaluate: newest sample does not sit at the interval start");

    switch (kind) {
        case ApproximationKind::ZeroOrderHold:
            return s0.value;

        case ApproximationKind::FirstOrderExtrapolation: {
            if (buffer.size() < 2) return s0.value;  // cold start degrades to a hold
            const Sample& s1 = buffer.from_newest(1);
            const double dt = s0.time - s1.time;
            Vec r(s0.value.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] = s0.value[i] + (t - s0.time) * (s0.value[i] - s1.value[i]) / dt;
            return r;
        }

        case ApproximationKind::LinearInterpolation: {
            if (!endpoint) throw ValidationError("evaluate: interpolation requires the endpoint");
            if (endpoint->size() != s0.value.size())
                throw ValidationError("evaluate: endpoint dimension mismatch");
            if (span <= 0.0) return s0.value;
            const double w = (t - interval.begin) / span;
            Vec r(s0.value.size());
            for (std::size_t i = 0; i < r.size(); ++i)
                r[i] = s0.value[i] + w * ((*endpoint)[i] - s0.value[i]);
            return r;
        }
    }
    throw ValidationError("evaluate: unknown approximation kind");
}

} // namespace cosim
