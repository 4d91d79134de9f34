#include <doctest.h>

#include "cosim/approximation.hpp"
#include "cosim/errors.hpp"

using namespace cosim;

TEST_CASE("zero-order hold returns the sample at the interval start") {
    InputBuffer buf;
    buf.push(1.0, Vec{3.0});
    for (double t : {1.0, 1.3, 1.9, 2.0})
        CHECK(evaluate(buf, ApproximationKind::ZeroOrderHold, t, {1.0, 2.0}) == Vec{3.0});
}

TEST_CASE("first-order extrapolation continues the line") {
    InputBuffer buf;
    buf.push(0.0, Vec{0.0});
    buf.push(1.0, Vec{2.0});
    const Vec v = evaluate(buf, ApproximationKind::FirstOrderExtrapolation, 1.5, {1.0, 2.0});
    CHECK(v[0] == doctest::Approx(3.0));
}

TEST_CASE("extrapolation from a single sample degrades to a hold") {
    InputBuffer buf;
    buf.push(0.0, Vec{7.0});
    CHECK(evaluate(buf, ApproximationKind::FirstOrderExtrapolation, 0.4, {0.0, 1.0}) == Vec{7.0});
}

TEST_CASE("interpolation blends toward the endpoint") {
    InputBuffer buf;
    buf.push(0.0, Vec{0.0});
    const Vec v =
        evaluate(buf, ApproximationKind::LinearInterpolation, 0.25, {0.0, 1.0}, Vec{4.0});
    CHECK(v[0] == doctest::Approx(1.0));
}

TEST_CASE("interpolation without the endpoint is an error") {
    InputBuffer buf;
    buf.push(0.0, Vec{0.0});
    CHECK_THROWS_AS(evaluate(buf, ApproximationKind::LinearInterpolation, 0.5, {0.0, 1.0}),
                    ValidationError);
}

TEST_CASE("every kind reproduces the sample at the interval start") {
    InputBuffer buf;
    buf.push(-1.0, Vec{1.0, -2.0});
    buf.push(2.0, Vec{5.0, 0.5});
    const Interval iv{2.0, 3.0};
    CHECK(evaluate(buf, ApproximationKind::ZeroOrderHold, 2.0, iv) == Vec{5.0, 0.5});
    CHECK(evaluate(buf, ApproximationKind::FirstOrderExtrapolation, 2.0, iv) == Vec{5.0, 0.5});
    const Vec li = evaluate(buf, ApproximationKind::LinearInterpolation, 2.0, iv, Vec{9.0, 9.0});
    CHECK(li[0] == doctest::Approx(5.0));
    CHECK(li[1] == doctest::Approx(0.5));
}

TEST_CASE("constant signals are reproduced by every kind at every time") {
    InputBuffer buf;
    buf.push(0.0, Vec{2.5});
    buf.push(1.0, Vec{2.5});
    const Interval iv{1.0, 2.0};
    for (double t : {1.0, 1.25, 1.5, 2.0}) {
        CHECK(evaluate(buf, ApproximationKind::ZeroOrderHold, t, iv) == Vec{2.5});
        CHECK(evaluate(buf, ApproximationKind::FirstOrderExtrapolation, t, iv)[0] ==
              doctest::Approx(2.5));
        CHECK(evaluate(buf, ApproximationKind::LinearInterpolation, t, iv, Vec{2.5})[0] ==
              doctest::Approx(2.5));
    }
}

TEST_CASE("first-order extrapolation is exact for affine signals") {
    auto signal = [](double t) { return 3.0 - 2.0 * t; };
    InputBuffer buf;
    buf.push(0.5, Vec{signal(0.5)});
    buf.push(1.25, Vec{signal(1.25)});
    for (double t : {1.25, 1.5, 1.9, 2.25}) {
        const Vec v =
            evaluate(buf, ApproximationKind::FirstOrderExtrapolation, t, {1.25, 2.25});
        CHECK(v[0] == doctest::Approx(signal(t)).epsilon(1e-14));
    }
}

TEST_CASE("evaluate rejects times outside the interval and empty buffers") {
    InputBuffer buf;
    buf.push(0.0, Vec{1.0});
    CHECK_THROWS_AS(evaluate(buf, ApproximationKind::ZeroOrderHold, 2.5, {0.0, 1.0}),
                    ValidationError);
    InputBuffer empty;
    CHECK_THROWS_AS(evaluate(empty, ApproximationKind::ZeroOrderHold, 0.5, {0.0, 1.0}),
                    ValidationError);
}

TEST_CASE("buffer keeps samples ordered and evicts at capacity") {
    InputBuffer buf(2);
    buf.push(0.0, Vec{1.0});
    buf.push(0.2, Vec{2.0});
    CHECK(buf.size() == 2);
    CHECK(buf.from_newest(1).value == Vec{1.0});
    CHECK(buf.newest().value == Vec{2.0});

    buf.push(0.4, Vec{3.0});
    CHECK(buf.size() == 2);
    CHECK(buf.from_newest(1).value == Vec{2.0});
    CHECK(buf.newest().value == Vec{3.0});
}

TEST_CASE("buffer rejects non-increasing times") {
    InputBuffer buf;
    buf.push(1.0, Vec{1.0});
    CHECK_THROWS_AS(buf.push(1.0, Vec{2.0}), ValidationError);
    CHECK_THROWS_AS(buf.push(0.5, Vec{2.0}), ValidationError);
}
