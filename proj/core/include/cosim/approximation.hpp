#pragma once

#include <deque>
#include <optional>

#include "cosim/numerics.hpp"

namespace cosim {

enum class ApproximationKind { ZeroOrderHold, FirstOrderExtrapolation, LinearInterpolation };

const char* to_string(ApproximationKind k);

struct Sample {
    double time = 0.0;
    Vec value;
};

/// Time-ordered ring of input samples recorded at communication points.
/// The default capacity of 2 is all any shipped approximation needs.
class InputBuffer {
public:
    explicit InputBuffer(std::size_t capacity = 2);

    /// Append a sample; time must strictly increase. The oldest sample is
    /// evicted once the buffer is full.
    void push(double t, Vec value);

    std::size_t size() const { return samples_.size(); }
    bool empty() const { return samples_.empty(); }
    std::size_t capacity() const { return capacity_; }

    const Sample& newest() const;
    /// age 0 is the newest sample, age 1 the one before it.
    const Sample& from_newest(std::size_t age) const;

    bool operator==(const InputBuffer&) const = default;

private:
    std::size_t capacity_;
    std::deque<Sample> samples_;
};

struct Interval {
    double begin = 0.0;
    double end = 0.0;
};

/// Reconstruct the input at time t in [t_i, t_{i+1}], where t_i is the
/// newest buffered sample time.
///   - ZeroOrderHold: u(t_i) held across the interval.
///   - FirstOrderExtrapolation: the line through the last two samples;
///     with a single sample it degrades to a hold.
///   - LinearInterpolation: the line from (t_i, u(t_i)) to
///     (t_{i+1}, endpoint); the endpoint value is required.
Vec evaluate(const InputBuffer& buffer, ApproximationKind kind, double t, Interval interval,
             const std::optional<Vec>& endpoint = {});

} // namespace cosim
