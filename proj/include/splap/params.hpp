#pragma once

#include <map>
#include <string>

namespace splap {

// reg_index value selecting the limit (genuinely singular) problem instead of
// one of its regularizations u^{-delta} -> (u+1/n)^{-delta}.
inline constexpr long kLimit = 0;

// Parameters of  -div(|grad u|^{p-2} grad u) = lambda*(u+1/n)^{-delta} + u^q
// on the unit ball of R^N with zero Dirichlet data.  reg_index == kLimit means
// the singular problem itself; q_enabled == false drops the u^q term (the
// "pure singular" configuration).
struct ProblemParams {
    int dim_N = 3;
    double p = 2.0;
    double q = 2.0;
    double delta = 1.0;
    double lambda = 1.0;
    long reg_index = kLimit;
    bool q_enabled = true;

    bool is_limit() const { return reg_index == kLimit; }
    // Regularization shift 1/n; zero at the limit.
    double shift() const { return is_limit() ? 0.0 : 1.0 / static_cast<double>(reg_index); }

    ProblemParams with_lambda(double lam) const {
        ProblemParams r = *this;
        r.lambda = lam;
        return r;
    }
    ProblemParams with_reg_index(long n) const {
        ProblemParams r = *this;
        r.reg_index = n;
        return r;
    }
    ProblemParams pure_singular() const {
        ProblemParams r = *this;
        r.q_enabled = false;
        return r;
    }
};

// Exponents derived from (N, p, delta); see derived_exponents().
struct DerivedExponents {
    double serrin;           // p(N-1)/(N-p)
    double scaling_exp;      // 1/(delta+p-1), sup-norm growth in lambda
    double boundary_exp;     // p/(delta+p-1), u ~ (1-r)^boundary_exp at the wall
    double alpha_threshold;  // (p-1)(delta+p-1)/p^2, energy-space membership of u^alpha
    double p_conj;           // p/(p-1)
};

double serrin_exponent(int dim_N, double p);

// Throws Error{OutOfExponentSet|NonPositiveDelta|NegativeLambda} naming the
// violated inequality; returns the input unchanged when all hypotheses hold.
ProblemParams validate_params(const ProblemParams& raw);

DerivedExponents derived_exponents(const ProblemParams& params);

// Flat key-value encoding with keys N,p,q,delta,lambda,n (n=0 encodes the
// limit problem) plus q_term (0/1) for the pure-singular configuration.
std::map<std::string, std::string> to_record(const ProblemParams& params);
ProblemParams from_record(const std::map<std::string, std::string>& record);

}  // namespace splap
