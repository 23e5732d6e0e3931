#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pir/regression.hpp"

namespace pir {

/// A state vector at a given time. Epidemic states are head counts or
/// population fractions, Lotka-Volterra states are population densities.
struct ModelState {
    Vector values;
    double time = 0.0;
};

/// Right-hand side of the form dx/dt = A(x; t) ω, with A independent of ω.
class ParameterLinearModel {
public:
    using MatrixBuilder = std::function<Matrix(const Vector& state, double time)>;

    ParameterLinearModel(std::string name, std::vector<std::string> state_names,
                         std::vector<std::string> parameter_names, MatrixBuilder builder,
                         std::optional<double> population = std::nullopt);

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] const std::vector<std::string>& state_names() const noexcept { return state_names_; }
    [[nodiscard]] const std::vector<std::string>& parameter_names() const noexcept { return parameter_names_; }
    [[nodiscard]] std::size_t state_count() const noexcept { return state_names_.size(); }
    [[nodiscard]] std::size_t parameter_count() const noexcept { return parameter_names_.size(); }
    [[nodiscard]] std::optional<double> population() const noexcept { return population_; }

    /// Position of a parameter by name. Throws InvalidArgument for unknown names.
    [[nodiscard]] std::size_t parameter_index(const std::string& parameter) const;

    /// A(x; t), shape-checked: m×k for a state of length m.
    [[nodiscard]] Matrix build_matrix(const Vector& state, double time = 0.0) const;
    [[nodiscard]] Matrix build_matrix(const ModelState& state) const { return build_matrix(state.values, state.time); }

private:
    std::string name_;
    std::vector<std::string> state_names_;
    std::vector<std::string> parameter_names_;
    MatrixBuilder builder_;
    std::optional<double> population_;
};

/// [[x, -xy, 0, 0], [0, 0, -y, xy]] with parameters (alpha, beta, gamma, delta).
[[nodiscard]] Matrix lotka_volterra_matrix(const Vector& state);

/// [[-SI/N, 0], [SI/N, -I], [0, I]] with parameters (beta, gamma).
[[nodiscard]] Matrix sir_matrix(const Vector& state, double population);

/// 7×8 matrix for states (S, I1, I2, I3, R1, R2, R3) and parameters
/// (beta, gamma1, gamma2, gamma3, tau, theta, phi1, phi2). Throws
/// DegenerateDenominator when S + I1 + R1 = 0.
[[nodiscard]] Matrix s3i3r_matrix(const Vector& state, double population);

[[nodiscard]] ParameterLinearModel lotka_volterra_model();
[[nodiscard]] ParameterLinearModel sir_model(double population);
[[nodiscard]] ParameterLinearModel s3i3r_model(double population);

/// A(x; t) ω.
[[nodiscard]] Vector eval_rhs(const ParameterLinearModel& model, const ModelState& state, const Vector& omega);

/// Name → factory lookup so configs can select models. The population
/// argument is ignored by models without one.
class ModelRegistry {
public:
    using Factory = std::function<ParameterLinearModel(double population)>;

    /// Registry preloaded with "lotka_volterra", "sir" and "s3i3r".
    static ModelRegistry with_builtin_models();

    void register_model(const std::string& name, Factory factory);
    [[nodiscard]] bool contains(const std::string& name) const;
    [[nodiscard]] std::vector<std::string> names() const;

    /// Throws InvalidArgument for unknown names.
    [[nodiscard]] ParameterLinearModel create(const std::string& name, double population = 1.0) const;

private:
    std::map<std::string, Factory> factories_;
};

}  // namespace pir
