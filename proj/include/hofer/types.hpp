#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hofer {

// Chart points and tangent vectors. Euclidean charts go up to R^6, the sphere lives in R^3.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 6, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 6, 6>;

enum class ErrorCode {
    invalid_argument,
    unsupported,
    not_converged,
    escape,
    verification_failed,
    config,
    internal
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    double width() const { return hi - lo; }
    bool contains(double x, double slack = 0.0) const { return x >= lo - slack && x <= hi + slack; }
};

// Axis-aligned box in chart coordinates.
struct Box {
    std::vector<Interval> axes;

    int dim() const { return static_cast<int>(axes.size()); }
    bool contains(const Vec& x, double slack = 0.0) const;
    bool empty() const;
    Box inflated(double margin) const;
    double volume() const;
    Vec center() const;
};

inline Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

inline Vec vec3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

constexpr double pi = 3.14159265358979323846;

}  // namespace hofer
