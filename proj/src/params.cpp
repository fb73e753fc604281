#include "splap/params.hpp"

#include <cmath>
#include <sstream>

#include "splap/errors.hpp"

namespace splap {

double serrin_exponent(int dim_N, double p) {
    return p * (dim_N - 1) / (dim_N - p);
}

ProblemParams validate_params(const ProblemParams& raw) {
    std::ostringstream why;
    if (raw.dim_N < 2) {
        why << "N = " << raw.dim_N << " violates N >= 2";
        throw Error(errc::OutOfExponentSet, why.str());
    }
    if (!(raw.p > 1.0)) {
        why << "p = " << raw.p << " violates 1 < p";
        throw Error(errc::OutOfExponentSet, why.str());
    }
    if (!(raw.p < raw.dim_N)) {
        why << "p = " << raw.p << " violates p < N = " << raw.dim_N;
        throw Error(errc::OutOfExponentSet, why.str());
    }
    const double serrin = serrin_exponent(raw.dim_N, raw.p);
    if (!(raw.q > raw.p - 1.0)) {
        why << "q = " << raw.q << " violates q > p-1 = " << raw.p - 1.0;
        throw Error(errc::OutOfExponentSet, why.str());
    }
    if (!(raw.q < serrin - 1.0)) {
        why << "q = " << raw.q << " violates q < p_*-1 = " << serrin - 1.0
            << " (Serrin bound p_* = p(N-1)/(N-p))";
        throw Error(errc::OutOfExponentSet, why.str());
    }
    if (!(raw.delta > 0.0)) {
        why << "delta = " << raw.delta << " must be positive";
        throw Error(errc::NonPositiveDelta, why.str());
    }
    if (raw.lambda < 0.0) {
        why << "lambda = " << raw.lambda << " must be nonnegative";
        throw Error(errc::NegativeLambda, why.str());
    }
    if (raw.reg_index < 0) {
        why << "reg_index = " << raw.reg_index << " must be a positive integer or 0 (limit)";
        throw Error(errc::ConfigInvalid, why.str());
    }
    return raw;
}

DerivedExponents derived_exponents(const ProblemParams& params) {
    DerivedExponents d;
    d.serrin = serrin_exponent(params.dim_N, params.p);
    d.scaling_exp = 1.0 / (params.delta + params.p - 1.0);
    d.boundary_exp = params.p / (params.delta + params.p - 1.0);
    d.alpha_threshold = (params.p - 1.0) * (params.delta + params.p - 1.0) / (params.p * params.p);
    d.p_conj = params.p / (params.p - 1.0);
    return d;
}

namespace {
std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}
}  // namespace

std::map<std::string, std::string> to_record(const ProblemParams& params) {
    std::map<std::string, std::string> rec;
    rec["N"] = std::to_string(params.dim_N);
    rec["p"] = num(params.p);
    rec["q"] = num(params.q);
    rec["delta"] = num(params.delta);
    rec["lambda"] = num(params.lambda);
    rec["n"] = std::to_string(params.reg_index);
    rec["q_term"] = params.q_enabled ? "1" : "0";
    return rec;
}

ProblemParams from_record(const std::map<std::string, std::string>& record) {
    ProblemParams p;
    auto need = [&](const char* key) -> const std::string& {
        auto it = record.find(key);
        if (it == record.end()) throw Error(errc::ConfigInvalid, std::string("missing key ") + key);
        return it->second;
    };
    p.dim_N = std::stoi(need("N"));
    p.p = std::stod(need("p"));
    p.q = std::stod(need("q"));
    p.delta = std::stod(need("delta"));
    p.lambda = std::stod(need("lambda"));
    p.reg_index = std::stol(need("n"));
    if (auto it = record.find("q_term"); it != record.end()) p.q_enabled = it->second != "0";
    return p;
}

}  // namespace splap
