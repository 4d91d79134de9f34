#include "cosim/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cosim/builtin_models.hpp"
#include "cosim/errors.hpp"

namespace cosim {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) throw ValidationError("scenario: \"" + key + "\" must be an array of rows");
    std::size_t rows = j.size();
    std::size_t cols = rows > 0 ? j.at(0).size() : 0;
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = j.at(i);
        if (!row.is_array() || row.size() != cols)
            throw ValidationError("scenario: \"" + key + "\" rows must have equal length");
        for (std::size_t c = 0; c < cols; ++c) m(i, c) = row.at(c).get<double>();
    }
    return m;
}

Vec vec_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) throw ValidationError("scenario: \"" + key + "\" must be an array");
    Vec v;
    v.reserve(j.size());
    for (const auto& x : j) v.push_back(x.get<double>());
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

AnyModel builtin_model(const std::string& name, const std::string& unit) {
    if (name == "car") return models::cruise_car();
    if (name == "msd") return models::mass_spring_damper();
    if (name == "motor") return models::motor();
    if (name == "chain_car") return models::chain_car();
    if (name == "chain_passenger") return models::chain_passenger();
    throw ValidationError("scenario: units." + unit + ".model names unknown built-in '" + name +
                          "'");
}

SecondOrderModel builtin_second_order(const std::string& name, const std::string& unit) {
    if (name == "motor") return models::motor();
    if (name == "msd") return models::msd_second_order();
    throw ValidationError("scenario: units." + unit +
                          ".model.second_order names unknown built-in '" + name + "'");
}

StepperKind solver_from_string(const std::string& s, const std::string& unit) {
    if (s == "explicit_euler" || s == "euler") return StepperKind::ExplicitEuler;
    if (s == "implicit_euler") return StepperKind::ImplicitEuler;
    if (s == "midpoint") return StepperKind::Midpoint;
    if (s == "godunov") return StepperKind::Godunov;
    throw ValidationError("scenario: units." + unit + ".solver is unknown: '" + s + "'");
}

ApproximationKind approximation_from_string(const std::string& s, const std::string& unit) {
    if (s == "zoh" || s == "zero_order_hold") return ApproximationKind::ZeroOrderHold;
    if (s == "first_order_extrapolation") return ApproximationKind::FirstOrderExtrapolation;
    if (s == "linear_interpolation") return ApproximationKind::LinearInterpolation;
    throw ValidationError("scenario: units." + unit + ".approximation is unknown: '" + s + "'");
}

// "unit.y[3]" -> (unit, 'y', 3)
std::tuple<std::string, char, std::size_t> parse_endpoint(const std::string& text,
                                                          char expected_var) {
    const auto dot = text.rfind('.');
    const auto bracket = text.find('[', dot == std::string::npos ? 0 : dot);
    const auto close = text.find(']', bracket == std::string::npos ? 0 : bracket);
    if (dot == std::string::npos || bracket == std::string::npos || close == std::string::npos ||
        bracket != dot + 2)
        throw ValidationError("scenario: connection endpoint '" + text +
                              "' must look like \"unit.y[0]\"");
    const std::string unit = text.substr(0, dot);
    const char var = text[dot + 1];
    if (var != expected_var)
        throw ValidationError("scenario: connection endpoint '" + text + "' must reference '" +
                              std::string(1, expected_var) + "'");
    std::size_t index = 0;
    try {
        index = std::stoul(text.substr(bracket + 1, close - bracket - 1));
    } catch (const std::exception&) {
        throw ValidationError("scenario: connection endpoint '" + text + "' has a bad index");
    }
    return {unit, var, index};
}

SimulationUnit unit_from_json(const std::string& name, const json& j) {
    const std::string where = "units." + name;
    if (!j.is_object()) throw ValidationError("scenario: " + where + " must be an object");
    if (!j.contains("model")) throw ValidationError("scenario: " + where + ".model is required");
    if (!j.contains("solver")) throw ValidationError("scenario: " + where + ".solver is required");
    if (!j.contains("h")) throw ValidationError("scenario: " + where + ".h is required");

    UnitOptions opts;
    AnyModel model = LinearSystemModel::autonomous(Matrix{{0.0}}, Vec{0.0});

    const json& mj = j.at("model");
    if (mj.is_string()) {
        opts.model_tag = mj.get<std::string>();
        model = builtin_model(opts.model_tag, name);
    } else if (mj.is_object() && mj.contains("second_order")) {
        opts.model_tag = mj.at("second_order").get<std::string>();
        SecondOrderModel so = builtin_second_order(opts.model_tag, name);
        if (mj.contains("x0")) so.x0 = vec_from_json(mj.at("x0"), where + ".model.x0");
        if (mj.contains("v0")) so.v0 = vec_from_json(mj.at("v0"), where + ".model.v0");
        if (so.x0.size() != so.dim || so.v0.size() != so.dim)
            throw ValidationError("scenario: " + where + ".model x0/v0 have the wrong length");
        model = std::move(so);
    } else if (mj.is_object() && mj.contains("A")) {
        Matrix a = matrix_from_json(mj.at("A"), where + ".model.A");
        if (!a.square()) throw ValidationError("scenario: " + where + ".model.A must be square");
        const std::size_t n = a.rows();
        if (!mj.contains("x0")) throw ValidationError("scenario: " + where + ".model.x0 is required");
        Vec x0 = vec_from_json(mj.at("x0"), where + ".model.x0");
        Matrix b = mj.contains("B") ? matrix_from_json(mj.at("B"), where + ".model.B")
                                    : Matrix(n, 0);
        Matrix c = mj.contains("C") ? matrix_from_json(mj.at("C"), where + ".model.C")
                                    : Matrix::identity(n);
        Matrix d = mj.contains("D") ? matrix_from_json(mj.at("D"), where + ".model.D")
                                    : Matrix(c.rows(), b.cols());
        try {
            model = LinearSystemModel(std::move(a), std::move(b), std::move(c), std::move(d),
                                      std::move(x0));
        } catch (const ValidationError& e) {
            throw ValidationError("scenario: " + where + ".model: " + e.what());
        }
    } else {
        throw ValidationError("scenario: " + where +
                              ".model must be a built-in name, inline matrices, or a "
                              "second-order built-in");
    }

    const StepperKind solver = solver_from_string(j.at("solver").get<std::string>(), name);
    const double h = j.at("h").get<double>();

    ApproximationKind approx = ApproximationKind::ZeroOrderHold;
    if (j.contains("approximation"))
        approx = approximation_from_string(j.at("approximation").get<std::string>(), name);

    Reactivity reactivity;
    if (j.value("input_reactive", false)) reactivity.input = InputContract::Reactive;
    if (j.value("output_reactive", false)) reactivity.output = OutputContract::Reactive;

    opts.rollbackable = j.value("rollbackable", true);
    if (j.contains("bootstrap_x_h"))
        opts.godunov_bootstrap = vec_from_json(j.at("bootstrap_x_h"), where + ".bootstrap_x_h");

    try {
        return SimulationUnit(name, std::move(model), solver, h, approx, reactivity,
                              std::move(opts));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("scenario: ") + e.what());
    }
}

} // namespace

Scenario scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("scenario: the document must be an object");

    Scenario s;
    if (!j.contains("units")) throw ValidationError("scenario: \"units\" is required");
    if (!j.contains("H")) throw ValidationError("scenario: \"H\" is required");
    if (!j.contains("T")) throw ValidationError("scenario: \"T\" is required");
    if (!j.at("units").is_object())
        throw ValidationError("scenario: \"units\" must map names to unit objects");

    for (const auto& [name, uj] : j.at("units").items())
        s.units.emplace(name, unit_from_json(name, uj));

    if (j.contains("connections")) {
        for (const auto& cj : j.at("connections")) {
            if (!cj.is_object() || !cj.contains("from") || !cj.contains("to"))
                throw ValidationError(
                    "scenario: \"connections\" entries need \"from\" and \"to\"");
            auto [fu, fv, fi] = parse_endpoint(cj.at("from").get<std::string>(), 'y');
            auto [tu, tv, ti] = parse_endpoint(cj.at("to").get<std::string>(), 'u');
            s.couplings.push_back(Coupling{fu, fi, tu, ti});
        }
    }

    s.H = j.at("H").get<double>();
    s.T = j.at("T").get<double>();

    if (j.contains("orchestrator")) {
        const json& oj = j.at("orchestrator");
        const std::string kind = oj.value("kind", "gauss_seidel");
        if (kind == "gauss_seidel") s.orchestrator.kind = OrchestratorKind::GaussSeidel;
        else if (kind == "jacobi") s.orchestrator.kind = OrchestratorKind::Jacobi;
        else if (kind == "iterative_gauss_seidel")
            s.orchestrator.kind = OrchestratorKind::IterativeGaussSeidel;
        else if (kind == "iterative_jacobi") s.orchestrator.kind = OrchestratorKind::IterativeJacobi;
        else throw ValidationError("scenario: orchestrator.kind is unknown: '" + kind + "'");
        if (oj.contains("convergence")) {
            const json& cj = oj.at("convergence");
            const std::string mode = cj.value("mode", "implicit");
            if (mode == "implicit") s.orchestrator.convergence.mode = ConvergenceMode::Implicit;
            else if (mode == "semi_implicit")
                s.orchestrator.convergence.mode = ConvergenceMode::SemiImplicit;
            else
                throw ValidationError("scenario: orchestrator.convergence.mode is unknown: '" +
                                      mode + "'");
            if (cj.contains("epsilon"))
                s.orchestrator.convergence.epsilon = cj.at("epsilon").get<double>();
            if (cj.contains("iterations"))
                s.orchestrator.convergence.iterations = cj.at("iterations").get<int>();
            if (cj.contains("max_iterations"))
                s.orchestrator.convergence.max_iterations = cj.at("max_iterations").get<int>();
        }
    }

    if (j.contains("sigma")) {
        std::vector<std::string> order;
        for (const auto& nj : j.at("sigma")) order.push_back(nj.get<std::string>());
        s.sigma = std::move(order);
    }

    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("scenario: cannot read file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json(buf.str());
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    json units = json::object();
    for (const auto& [name, u] : s.units) {
        json uj;
        if (const auto* lin = u.linear_model()) {
            json mj;
            mj["A"] = matrix_to_json(lin->A);
            mj["B"] = matrix_to_json(lin->B);
            mj["C"] = matrix_to_json(lin->C);
            mj["D"] = matrix_to_json(lin->D);
            mj["x0"] = lin->x0;
            uj["model"] = std::move(mj);
        } else if (const auto* so = std::get_if<SecondOrderModel>(&u.model())) {
            if (u.options().model_tag.empty())
                throw ValidationError("scenario: unit '" + name +
                                      "' wraps a second-order model with no built-in name; it "
                                      "cannot be written to a file");
            json mj;
            mj["second_order"] = u.options().model_tag;
            mj["x0"] = so->x0;
            mj["v0"] = so->v0;
            uj["model"] = std::move(mj);
        } else {
            throw ValidationError("scenario: unit '" + name +
                                  "' wraps an opaque model; it cannot be written to a file");
        }
        uj["solver"] = to_string(u.stepper());
        uj["h"] = u.internal_step();
        uj["approximation"] = to_string(u.approximation());
        uj["input_reactive"] = u.reactivity().input == InputContract::Reactive;
        uj["output_reactive"] = u.reactivity().output == OutputContract::Reactive;
        uj["rollbackable"] = u.options().rollbackable;
        if (u.options().godunov_bootstrap) uj["bootstrap_x_h"] = *u.options().godunov_bootstrap;
        units[name] = std::move(uj);
    }
    j["units"] = std::move(units);

    json conns = json::array();
    for (const auto& c : s.couplings) {
        json cj;
        std::ostringstream from, to;
        from << c.from_unit << ".y[" << c.from_index << "]";
        to << c.to_unit << ".u[" << c.to_index << "]";
        cj["from"] = from.str();
        cj["to"] = to.str();
        conns.push_back(std::move(cj));
    }
    j["connections"] = std::move(conns);

    j["H"] = s.H;
    j["T"] = s.T;

    json oj;
    oj["kind"] = to_string(s.orchestrator.kind);
    json cj;
    cj["mode"] = s.orchestrator.convergence.mode == ConvergenceMode::Implicit ? "implicit"
                                                                              : "semi_implicit";
    cj["epsilon"] = s.orchestrator.convergence.epsilon;
    cj["iterations"] = s.orchestrator.convergence.iterations;
    cj["max_iterations"] = s.orchestrator.convergence.max_iterations;
    oj["convergence"] = std::move(cj);
    j["orchestrator"] = std::move(oj);

    if (s.sigma) j["sigma"] = *s.sigma;

    return j.dump(2) + "\n";
}

} // namespace cosim
