#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ftcal/errors.hpp"
#include "ftcal/types.hpp"

namespace ftcal {

using RegressorMatrix = Eigen::MatrixXd;
using TargetVector = Eigen::VectorXd;

// A product of input channels raised to non-negative integer powers.
// The constant term is the all-zero exponent vector.
struct Monomial {
    std::vector<int> exponents;  // one entry per input channel

    int degree() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }
    bool is_constant() const { return degree() == 0; }

    double eval(const RawSample& u) const {
        double p = 1.0;
        for (std::size_t l = 0; l < exponents.size(); ++l)
            for (int e = 0; e < exponents[l]; ++e) p *= u[l];
        return p;
    }

    // Human-readable name, e.g. "u1*u3^2*temp" (channel nu-1 named "temp" when
    // with_temperature is set). The constant term is "1".
    std::string name(bool with_temperature = false) const {
        std::string s;
        for (std::size_t l = 0; l < exponents.size(); ++l) {
            if (exponents[l] == 0) continue;
            if (!s.empty()) s += "*";
            if (with_temperature && l + 1 == exponents.size())
                s += "temp";
            else
                s += "u" + std::to_string(l + 1);
            if (exponents[l] > 1) s += "^" + std::to_string(exponents[l]);
        }
        return s.empty() ? "1" : s;
    }

    friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Exact binomial coefficient via the multiplicative formula; throws on overflow.
inline std::int64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::int64_t r = 1;
    for (int i = 1; i <= k; ++i) {
        std::int64_t num = n - k + i;
        if (r > INT64_MAX / num) throw Error("binomial coefficient overflow");
        r = r * num / i;  // exact: r*num is divisible by i at every step
    }
    return r;
}

// Number of degree-exactly-r monomials in nu variables: multiset coefficient
// C(nu+r-1, r).
inline std::int64_t monomial_count_at_degree(int nu, int r) {
    return binomial(nu + r - 1, r);
}

// Total coefficient count of a model: ny outputs times C(nu+np, np) terms per
// output (offset included).
inline std::int64_t count_coefficients(int np, int ny, int nu) {
    if (np < 1 || ny < 1 || nu < 1)
        throw SpecError("count_coefficients requires np, ny, nu >= 1");
    std::int64_t per_output = binomial(nu + np, np);
    if (per_output > INT64_MAX / ny) throw Error("coefficient count overflow");
    return ny * per_output;
}

namespace detail {

// Emit all non-decreasing index tuples of length `degree` over channels
// [0, nu), in lexicographic order, as exponent vectors.
inline void emit_degree(int nu, int degree, int from, std::vector<int>& exps,
                        std::vector<Monomial>& out) {
    if (degree == 0) {
        out.push_back(Monomial{exps});
        return;
    }
    for (int l = from; l < nu; ++l) {
        ++exps[l];
        emit_degree(nu, degree - 1, l, exps, out);
        --exps[l];
    }
}

}  // namespace detail

// All monomials up to degree np in nu variables: constant first, then
// degree-major, lexicographic on the non-decreasing channel-index tuple
// within each degree. Deterministic; size C(nu+np, np).
inline std::vector<Monomial> enumerate_monomials(int nu, int np) {
    if (nu < 1 || np < 1) throw SpecError("enumerate_monomials requires nu >= 1 and np >= 1");
    std::vector<Monomial> out;
    out.reserve(static_cast<std::size_t>(binomial(nu + np, np)));
    std::vector<int> exps(nu, 0);
    for (int d = 0; d <= np; ++d) detail::emit_degree(nu, d, 0, exps, out);
    return out;
}

namespace detail {

inline void check_sample(const RawSample& u, int nu, std::size_t row) {
    if (static_cast<int>(u.size()) != nu)
        throw ShapeError("sample " + std::to_string(row) + " has " +
                         std::to_string(u.size()) + " channels, expected " +
                         std::to_string(nu));
    for (double v : u)
        if (!std::isfinite(v))
            throw DataError("non-finite input value in sample " + std::to_string(row));
}

}  // namespace detail

// Instantaneous regressor: row k, column t = product of u_l(k)^exponents[t][l].
// Column order matches enumerate_monomials(spec.nu, spec.np).
inline RegressorMatrix build_regressor(const std::vector<RawSample>& samples,
                                       const ModelSpec& spec) {
    spec.validate();
    if (spec.is_arx())
        throw SpecError("build_regressor handles only instantaneous models (na = nb = 0)");
    auto monos = enumerate_monomials(spec.nu, spec.np);
    RegressorMatrix A(samples.size(), monos.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        detail::check_sample(samples[k], spec.nu, k);
        for (std::size_t t = 0; t < monos.size(); ++t)
            A(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(t)) =
                monos[t].eval(samples[k]);
    }
    return A;
}

// What a regressor column means. Lagged-output columns carry the sigma
// coefficients of the ARX form; monomial columns reference the shared
// exponent table with an input lag.
struct Column {
    enum class Kind { Constant, OutputLag, InputMonomial };
    Kind kind = Kind::Constant;
    int lag = 0;            // j: output lag (>=1) or input lag (>=0)
    int channel = 0;        // output channel for OutputLag
    std::size_t monomial = 0;  // index into the monomial table for InputMonomial
};

// Column layout implied by a ModelSpec: constant first, then lagged outputs
// y_l(k-j) for j=1..na, then the non-constant monomials of u(k-j) for
// j=0..nb. Instantaneous specs reduce to [constant, monomials].
inline std::vector<Column> column_layout(const ModelSpec& spec,
                                         const std::vector<Monomial>& monos) {
    std::vector<Column> cols;
    cols.push_back({Column::Kind::Constant, 0, 0, 0});
    for (int j = 1; j <= spec.na; ++j)
        for (int l = 0; l < spec.ny; ++l)
            cols.push_back({Column::Kind::OutputLag, j, l, 0});
    for (int j = 0; j <= spec.nb; ++j)
        for (std::size_t t = 0; t < monos.size(); ++t)
            if (!monos[t].is_constant())
                cols.push_back({Column::Kind::InputMonomial, j, 0, t});
    return cols;
}

// ARX regressor over rows k = max(na, nb) .. N-1 (leading samples without full
// history are dropped). Degenerates to build_regressor when na = nb = 0.
inline RegressorMatrix build_regressor_arx(const std::vector<RawSample>& samples,
                                           const std::vector<Wrench>& outputs,
                                           const ModelSpec& spec) {
    spec.validate();
    if (!spec.is_arx()) return build_regressor(samples, spec);
    if (samples.size() != outputs.size())
        throw ShapeError("samples and outputs must be aligned and of equal length");
    const int m = std::max(spec.na, spec.nb);
    const auto n = static_cast<std::ptrdiff_t>(samples.size());
    if (n <= m)
        throw InsufficientDataError("need more than max(na, nb) = " + std::to_string(m) +
                                    " samples, got " + std::to_string(n));
    auto monos = enumerate_monomials(spec.nu, spec.np);
    auto cols = column_layout(spec, monos);
    RegressorMatrix A(n - m, cols.size());
    for (std::ptrdiff_t k = m; k < n; ++k) {
        detail::check_sample(samples[k], spec.nu, static_cast<std::size_t>(k));
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const Column& col = cols[c];
            double v = 1.0;
            switch (col.kind) {
                case Column::Kind::Constant: v = 1.0; break;
                case Column::Kind::OutputLag: v = outputs[k - col.lag][col.channel]; break;
                case Column::Kind::InputMonomial:
                    v = monos[col.monomial].eval(samples[k - col.lag]);
                    break;
            }
            A(k - m, static_cast<Eigen::Index>(c)) = v;
        }
    }
    return A;
}

}  // namespace ftcal
