#include "atorsion/expansion.hpp"

#include "atorsion/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

namespace atorsion {

// ---------------------------------------------------------------------------
// AsymptoticExpansion

AsymptoticExpansion::AsymptoticExpansion(std::vector<ExpansionTerm> terms, double remainder_exponent)
    : terms_(std::move(terms)), remainder_exponent_(remainder_exponent) {
    std::sort(terms_.begin(), terms_.end(), [](const ExpansionTerm& a, const ExpansionTerm& b) {
        return a.alpha != b.alpha ? a.alpha < b.alpha : a.log_power < b.log_power;
    });
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        if (terms_[i].log_power < 0) throw Error(ErrorCode::InputError, "negative log power");
        if (!std::isfinite(terms_[i].alpha) || !std::isfinite(terms_[i].coeff)) {
            throw Error(ErrorCode::InputError, "expansion term must be finite");
        }
        if (i > 0 && terms_[i].alpha == terms_[i - 1].alpha &&
            terms_[i].log_power == terms_[i - 1].log_power) {
            throw Error(ErrorCode::InputError, "duplicate (alpha, j) expansion term");
        }
    }
    if (!terms_.empty() && !(remainder_exponent_ > terms_.back().alpha)) {
        std::ostringstream msg;
        msg << "remainder exponent " << remainder_exponent_ << " must exceed every alpha";
        throw Error(ErrorCode::InputError, msg.str());
    }
}

double AsymptoticExpansion::evaluate(double t) const {
    const double lt = std::log(t);
    double sum = 0.0;
    for (const auto& term : terms_) {
        sum += term.coeff * std::pow(t, term.alpha) * std::pow(lt, term.log_power);
    }
    return sum;
}

AsymptoticExpansion AsymptoticExpansion::combined(const AsymptoticExpansion& other,
                                                  double weight_self, double weight_other) const {
    std::map<std::pair<double, int>, double> acc;
    std::map<std::pair<double, int>, double> scale;
    auto add = [&](const AsymptoticExpansion& e, double w) {
        if (w == 0.0) return;
        for (const auto& t : e.terms_) {
            const auto key = std::make_pair(t.alpha, t.log_power);
            acc[key] += w * t.coeff;
            scale[key] = std::max(scale[key], std::abs(w * t.coeff));
        }
    };
    add(*this, weight_self);
    add(other, weight_other);
    std::vector<ExpansionTerm> terms;
    for (const auto& [key, c] : acc) {
        if (std::abs(c) <= 1e-14 * scale[key]) continue;
        terms.push_back({key.first, key.second, c});
    }
    double rem = std::numeric_limits<double>::infinity();
    if (weight_self != 0.0) rem = std::min(rem, remainder_exponent_);
    if (weight_other != 0.0) rem = std::min(rem, other.remainder_exponent_);
    return AsymptoticExpansion(std::move(terms), rem);
}

AsymptoticExpansion AsymptoticExpansion::scaled(double weight) const {
    return combined(AsymptoticExpansion(), weight, 0.0);
}

// ---------------------------------------------------------------------------
// LaurentSeries

LaurentSeries::LaurentSeries(int min_order, int order_max)
    : min_order_(min_order), coeffs_(static_cast<std::size_t>(std::max(0, order_max - min_order + 1))) {}

LaurentSeries::LaurentSeries(int min_order, std::vector<Complex> coeffs)
    : min_order_(min_order), coeffs_(std::move(coeffs)) {}

LaurentSeries LaurentSeries::constant(Complex c, int order_max) {
    LaurentSeries s(0, order_max);
    if (order_max >= 0) s.coeffs_[0] = c;
    return s;
}

LaurentSeries LaurentSeries::monomial(int m, int order_max) {
    LaurentSeries s(std::min(m, order_max), order_max);
    if (m <= order_max) s.at(m) = 1.0;
    return s;
}

LaurentSeries::Complex LaurentSeries::operator[](int order) const {
    const int idx = order - min_order_;
    if (idx < 0 || idx >= static_cast<int>(coeffs_.size())) return 0.0;
    return coeffs_[static_cast<std::size_t>(idx)];
}

LaurentSeries::Complex& LaurentSeries::at(int order) {
    const int idx = order - min_order_;
    if (idx < 0 || idx >= static_cast<int>(coeffs_.size())) {
        throw Error(ErrorCode::InputError, "Laurent order out of tracked range");
    }
    return coeffs_[static_cast<std::size_t>(idx)];
}

int LaurentSeries::leading_order(double tol) const {
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (std::abs(coeffs_[i]) > tol) return min_order_ + static_cast<int>(i);
    }
    return order_max() + 1;
}

int LaurentSeries::pole_order(double tol) const { return std::max(0, -leading_order(tol)); }

LaurentSeries LaurentSeries::operator+(const LaurentSeries& o) const {
    const int lo = std::min(min_order_, o.min_order_);
    const int hi = std::min(order_max(), o.order_max());
    LaurentSeries r(lo, hi);
    for (int m = lo; m <= hi; ++m) r.at(m) = (*this)[m] + o[m];
    return r;
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& o) const { return *this + o * Complex(-1.0); }

LaurentSeries LaurentSeries::operator*(const LaurentSeries& o) const {
    // The product is exact up to order min(a_lo + b_hi, a_hi + b_lo).
    const int lo = min_order_ + o.min_order_;
    const int hi = std::min(min_order_ + o.order_max(), order_max() + o.min_order_);
    LaurentSeries r(lo, hi);
    for (int m = lo; m <= hi; ++m) {
        Complex acc = 0.0;
        for (int i = min_order_; i <= order_max(); ++i) acc += (*this)[i] * o[m - i];
        r.at(m) = acc;
    }
    return r;
}

LaurentSeries LaurentSeries::operator*(Complex c) const {
    LaurentSeries r = *this;
    for (auto& x : r.coeffs_) x *= c;
    return r;
}

LaurentSeries LaurentSeries::divided_by_s() const { return LaurentSeries(min_order_ - 1, coeffs_); }

LaurentSeries LaurentSeries::times_s() const { return LaurentSeries(min_order_ + 1, coeffs_); }

LaurentSeries LaurentSeries::reciprocal() const {
    const int lead = leading_order();
    if (lead > order_max()) throw Error(ErrorCode::InputError, "reciprocal of zero Laurent series");
    // F = s^lead (b_0 + b_1 s + ...), 1/F = s^-lead (d_0 + d_1 s + ...).
    const int len = order_max() - lead + 1;
    std::vector<Complex> b(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) b[static_cast<std::size_t>(i)] = (*this)[lead + i];
    std::vector<Complex> d(static_cast<std::size_t>(len));
    d[0] = 1.0 / b[0];
    for (int k = 1; k < len; ++k) {
        Complex acc = 0.0;
        for (int i = 1; i <= k; ++i) acc += b[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(k - i)];
        d[static_cast<std::size_t>(k)] = -acc / b[0];
    }
    return LaurentSeries(-lead, std::move(d));
}

LaurentSeries LaurentSeries::truncated(int order_max_new) const {
    LaurentSeries r(min_order_, std::min(order_max_new, order_max()));
    for (int m = r.min_order_; m <= r.order_max(); ++m) r.at(m) = (*this)[m];
    return r;
}

LaurentSeries::Complex LaurentSeries::evaluate(Complex s) const {
    Complex acc = 0.0;
    for (int m = order_max(); m >= min_order_; --m) acc += (*this)[m] * std::pow(s, m);
    return acc;
}

// ---------------------------------------------------------------------------
// DecayCertificate

double DecayCertificate::bound(double t) const { return constant * std::exp(-rate * t); }

DecayCertificate DecayCertificate::make(const RealFunction& f, double rate, double constant,
                                        double valid_from) {
    if (!(rate > 0.0) || !(constant > 0.0) || !(valid_from >= 0.0)) {
        throw Error(ErrorCode::InputError, "decay certificate needs rate > 0, C > 0, T0 >= 0");
    }
    DecayCertificate c{rate, constant, valid_from};
    constexpr int kPoints = 240;
    const double span = 60.0 / rate;
    for (int i = 0; i <= kPoints; ++i) {
        const double t = valid_from + span * static_cast<double>(i) / kPoints;
        if (t <= 0.0) continue;
        const double v = std::abs(f(t));
        const double b = c.bound(t);
        if (v > b * (1.0 + 1e-10) + 1e-300) {
            std::ostringstream msg;
            msg << "decay bound violated at t = " << t << ": |f| = " << v << " > " << b;
            throw Error(ErrorCode::AssertionFailure, msg.str());
        }
    }
    return c;
}

}  // namespace atorsion
