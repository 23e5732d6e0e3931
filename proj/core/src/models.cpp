#include "pir/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "pir/error.hpp"

namespace pir {

namespace {

void require_length(const Vector& state, Eigen::Index expected, const char* model) {
    if (state.size() != expected) {
        throw Error(ErrorKind::ShapeMismatch, std::string(model) + " expects " + std::to_string(expected) +
                                                  " state components, got " + std::to_string(state.size()));
    }
}

void require_population(double population) {
    if (!(population > 0.0) || !std::isfinite(population)) {
        throw Error(ErrorKind::NonPositivePopulation, "population must be a positive finite number");
    }
}

}  // namespace

ParameterLinearModel::ParameterLinearModel(std::string name, std::vector<std::string> state_names,
                                           std::vector<std::string> parameter_names, MatrixBuilder builder,
                                           std::optional<double> population)
    : name_(std::move(name)),
      state_names_(std::move(state_names)),
      parameter_names_(std::move(parameter_names)),
      builder_(std::move(builder)),
      population_(population) {
    if (!builder_) throw Error(ErrorKind::InvalidArgument, "model '" + name_ + "' has no matrix builder");
    if (state_names_.empty() || parameter_names_.empty()) {
        throw Error(ErrorKind::InvalidArgument, "model '" + name_ + "' needs states and parameters");
    }
    if (population_) require_population(*population_);
}

std::size_t ParameterLinearModel::parameter_index(const std::string& parameter) const {
    const auto it = std::find(parameter_names_.begin(), parameter_names_.end(), parameter);
    if (it == parameter_names_.end()) {
        throw Error(ErrorKind::InvalidArgument, "model '" + name_ + "' has no parameter '" + parameter + "'");
    }
    return static_cast<std::size_t>(it - parameter_names_.begin());
}

Matrix ParameterLinearModel::build_matrix(const Vector& state, double time) const {
    require_length(state, static_cast<Eigen::Index>(state_count()), name_.c_str());
    Matrix a = builder_(state, time);
    if (a.rows() != static_cast<Eigen::Index>(state_count()) ||
        a.cols() != static_cast<Eigen::Index>(parameter_count())) {
        throw Error(ErrorKind::ShapeMismatch, "model '" + name_ + "' built a matrix of the wrong shape");
    }
    return a;
}

Matrix lotka_volterra_matrix(const Vector& state) {
    require_length(state, 2, "lotka_volterra");
    const double x = state(0);
    const double y = state(1);
    Matrix a = Matrix::Zero(2, 4);
    a(0, 0) = x;
    a(0, 1) = -x * y;
    a(1, 2) = -y;
    a(1, 3) = x * y;
    return a;
}

Matrix sir_matrix(const Vector& state, double population) {
    require_length(state, 3, "sir");
    require_population(population);
    const double s = state(0);
    const double i = state(1);
    const double infection = s * i / population;
    Matrix a = Matrix::Zero(3, 2);
    a(0, 0) = -infection;
    a(1, 0) = infection;
    a(1, 1) = -i;
    a(2, 1) = i;
    return a;
}

Matrix s3i3r_matrix(const Vector& state, double population) {
    require_length(state, 7, "s3i3r");
    require_population(population);
    const double s = state(0);
    const double i1 = state(1);
    const double i2 = state(2);
    const double i3 = state(3);
    const double r1 = state(4);
    const double vaccinatable = s + i1 + r1;
    if (vaccinatable == 0.0) {
        throw Error(ErrorKind::DegenerateDenominator, "S + I1 + R1 is zero");
    }
    const double infection = s * i1 / population;

    // Columns: beta, gamma1, gamma2, gamma3, tau, theta, phi1, phi2.
    Matrix a = Matrix::Zero(7, 8);
    a(0, 0) = -infection;
    a(0, 4) = -s / vaccinatable;

    a(1, 0) = infection;
    a(1, 1) = -i1;
    a(1, 4) = -i1 / vaccinatable;
    a(1, 6) = -i1;

    a(2, 2) = -i2;
    a(2, 6) = i1;
    a(2, 7) = -i2;

    a(3, 3) = -i3;
    a(3, 5) = -i3;
    a(3, 7) = i2;

    a(4, 1) = i1;
    a(4, 2) = i2;
    a(4, 3) = i3;
    a(4, 4) = -r1 / vaccinatable;

    a(5, 4) = 1.0;
    a(6, 5) = i3;
    return a;
}

ParameterLinearModel lotka_volterra_model() {
    return ParameterLinearModel("lotka_volterra", {"x", "y"}, {"alpha", "beta", "gamma", "delta"},
                                [](const Vector& x, double) { return lotka_volterra_matrix(x); });
}

ParameterLinearModel sir_model(double population) {
    require_population(population);
    return ParameterLinearModel(
        "sir", {"S", "I", "R"}, {"beta", "gamma"},
        [population](const Vector& x, double) { return sir_matrix(x, population); }, population);
}

ParameterLinearModel s3i3r_model(double population) {
    require_population(population);
    return ParameterLinearModel(
        "s3i3r", {"S", "I1", "I2", "I3", "R1", "R2", "R3"},
        {"beta", "gamma1", "gamma2", "gamma3", "tau", "theta", "phi1", "phi2"},
        [population](const Vector& x, double) { return s3i3r_matrix(x, population); }, population);
}

Vector eval_rhs(const ParameterLinearModel& model, const ModelState& state, const Vector& omega) {
    if (omega.size() != static_cast<Eigen::Index>(model.parameter_count())) {
        throw Error(ErrorKind::ShapeMismatch, "model '" + model.name() + "' has " +
                                                  std::to_string(model.parameter_count()) + " parameters, got " +
                                                  std::to_string(omega.size()));
    }
    return model.build_matrix(state) * omega;
}

ModelRegistry ModelRegistry::with_builtin_models() {
    ModelRegistry registry;
    registry.register_model("lotka_volterra", [](double) { return lotka_volterra_model(); });
    registry.register_model("sir", [](double n) { return sir_model(n); });
    registry.register_model("s3i3r", [](double n) { return s3i3r_model(n); });
    return registry;
}

void ModelRegistry::register_model(const std::string& name, Factory factory) {
    if (name.empty() || !factory) throw Error(ErrorKind::InvalidArgument, "model registration needs a name and a factory");
    factories_[name] = std::move(factory);
}

bool ModelRegistry::contains(const std::string& name) const { return factories_.count(name) != 0; }

std::vector<std::string> ModelRegistry::names() const {
    std::vector<std::string> out;
    out.reserve(factories_.size());
    for (const auto& entry : factories_) out.push_back(entry.first);
    return out;
}

ParameterLinearModel ModelRegistry::create(const std::string& name, double population) const {
    const auto it = factories_.find(name);
    if (it == factories_.end()) {
        throw Error(ErrorKind::InvalidArgument, "unknown model '" + name + "'");
    }
    return it->second(population);
}

}  // namespace pir
