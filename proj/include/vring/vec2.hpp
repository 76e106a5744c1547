#pragma once

#include <cmath>

namespace vring {

/// Point or vector in the (x1, x2) = (z, r - r0) half-plane coordinates.
struct Vec2 {
    double x1 = 0.0;
    double x2 = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double a, double b) : x1(a), x2(b) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x1 + o.x1, x2 + o.x2}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x1 - o.x1, x2 - o.x2}; }
    constexpr Vec2 operator-() const { return {-x1, -x2}; }
    constexpr Vec2 operator*(double s) const { return {x1 * s, x2 * s}; }
    constexpr Vec2& operator+=(Vec2 o) {
        x1 += o.x1;
        x2 += o.x2;
        return *this;
    }
    constexpr Vec2& operator-=(Vec2 o) {
        x1 -= o.x1;
        x2 -= o.x2;
        return *this;
    }

    constexpr double dot(Vec2 o) const { return x1 * o.x1 + x2 * o.x2; }
    constexpr double norm2() const { return x1 * x1 + x2 * x2; }
    double norm() const { return std::hypot(x1, x2); }
};

constexpr Vec2 operator*(double s, Vec2 v) { return v * s; }

inline bool finite(Vec2 v) { return std::isfinite(v.x1) && std::isfinite(v.x2); }

} // namespace vring
