#pragma once

#include "hofer/geometry.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hofer {

using ScalarField = std::function<double(const Vec&, double)>;
using GradientField = std::function<Vec(const Vec&, double)>;
using HessianField = std::function<Mat(const Vec&, double)>;
// Closed-form flow x(t0) -> x(t1), used by the exact scheme.
using ExactFlow = std::function<Vec(const Vec&, double, double)>;

struct Hamiltonian {
    ManifoldSpec manifold;
    ScalarField value;
    GradientField gradient;  // ambient gradient; empty means central differences
    HessianField hessian;    // ambient Hessian; empty means central differences
    ExactFlow exact_flow;
    std::optional<Box> support;
    Interval time{0.0, 1.0};
    bool autonomous = true;
    std::string name;

    double operator()(const Vec& x, double t) const;
    Vec grad(const Vec& x, double t) const;
    Mat hess(const Vec& x, double t) const;
    bool has_exact_flow() const { return static_cast<bool>(exact_flow); }
};

struct NormalizationEvidence {
    std::vector<double> times;
    std::vector<double> means;  // closed manifolds, after normalization
    std::optional<Box> support;  // open manifolds
};

struct NormalizedHamiltonian : Hamiltonian {
    NormalizationEvidence evidence;
};

Vec sgrad(const Hamiltonian& F, const Vec& x, double t);

// Derivative of sgrad in the chart: D(sgrad F)(x). Canonical charts only.
Mat sgrad_jacobian(const Hamiltonian& F, const Vec& x, double t);

NormalizedHamiltonian normalize(const Hamiltonian& F, const ManifoldSpec& M, const Grid& g, int time_samples = 17);

// Trusted wrap for fields known to be normalized by construction; validates on the grid.
NormalizedHamiltonian assume_normalized(const Hamiltonian& F, const Grid& g, int time_samples = 5);

double poisson_bracket(const Hamiltonian& F, const Hamiltonian& G, const Vec& x, double t);

class FlowMap;

Hamiltonian product_hamiltonian(const Hamiltonian& F, const Hamiltonian& G, std::shared_ptr<const FlowMap> flowF);
Hamiltonian inverse_hamiltonian(const Hamiltonian& F, std::shared_ptr<const FlowMap> flowF);

struct TimeMap {
    std::function<double(double)> b;
    std::function<double(double)> db;
};

Hamiltonian reparametrize(const Hamiltonian& F, const TimeMap& b, Interval new_time);

Hamiltonian cutoff(const ScalarField& H, const GradientField& gradH, const Box& region, double margin,
                   const ManifoldSpec& M, const std::string& name = "cutoff");

using Params = std::map<std::string, double>;

// Named Hamiltonians. Parameters not used by a name are rejected.
Hamiltonian catalog(const std::string& name, const Params& params = {});
std::vector<std::string> catalog_names();

}  // namespace hofer
