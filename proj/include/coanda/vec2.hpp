#pragma once

#include <cmath>

namespace coanda {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    Vec2& operator/=(double s) { x /= s; y /= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline Vec2 operator/(Vec2 a, double s) { return a /= s; }
inline Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double mag(const Vec2& a) { return std::sqrt(dot(a, a)); }
inline double magSqr(const Vec2& a) { return dot(a, a); }
inline Vec2 unit(const Vec2& a) { double m = mag(a); return m > 0 ? a / m : Vec2{}; }

// Symmetric rank-2 tensor in 2D plus the independent components of a full
// velocity gradient (xx, xy, yx, yy).
struct Tensor2 {
    double xx = 0.0, xy = 0.0, yx = 0.0, yy = 0.0;

    Tensor2& operator+=(const Tensor2& o) {
        xx += o.xx; xy += o.xy; yx += o.yx; yy += o.yy;
        return *this;
    }
    Tensor2& operator*=(double s) {
        xx *= s; xy *= s; yx *= s; yy *= s;
        return *this;
    }
};

inline Tensor2 operator*(double s, Tensor2 t) { return t *= s; }

} // namespace coanda
