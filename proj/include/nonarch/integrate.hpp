#pragma once

#include <functional>
#include <optional>

#include "nonarch/denefpas.hpp"

namespace nonarch {

class DomainUndecidedError : public Error {
public:
    explicit DomainUndecidedError(const std::string& what = "definable-set membership undecided")
        : Error(what) {}
};

/// Product of one-dimensional windows pi^{v_i} O.
struct Box {
    std::vector<long> val_lo;

    size_t dimension() const { return val_lo.size(); }
};

/// Exact integration by residue-class enumeration: the domain is split into
/// cosets of p^depth, the integrand is evaluated at exact representatives,
/// and the coset measures q^{-n*depth} are summed in CycValue arithmetic.
struct IntegrationJob {
    FieldSpec field;
    Box box;
    std::function<CycValue(const std::vector<Element>&)> integrand;
    int depth = 1;
    bool refine = true;  // also evaluate at depth+1 and compare

    // optional definable-set domain filter
    std::optional<DefinableSet> domain;
    EvalContext domain_ctx;  // quantifier windows for the filter formula
};

struct IntegrationResult {
    CycValue value;
    int depth = 0;
    bool refine_checked = false;
    bool refine_agrees = false;  // exactness certificate when the integrand is
                                 // constant on depth-m cosets
};

namespace intdetail {

template <typename Visit>
void enumerate_box(const FieldSpec& f, const Box& box, int depth, Visit&& visit) {
    const size_t n = box.dimension();
    size_t total = 1;
    for (size_t i = 0; i < n; ++i) {
        if (box.val_lo[i] > depth)
            throw Error("integrate: depth shallower than the box window");
        long digits = depth - box.val_lo[i];
        size_t cnt = 1;
        for (long k = 0; k < digits; ++k) {
            cnt *= static_cast<size_t>(f.p);
            if (cnt > (size_t{1} << 40)) throw Error("integrate: coset space too large");
        }
        total *= cnt;
        if (total > (size_t{1} << 32)) throw Error("integrate: coset space too large");
    }
    std::vector<size_t> counter(n, 0);
    std::vector<Element> rep(n, Element::zero(f));
    auto rebuild = [&](size_t i) {
        long digits = depth - box.val_lo[i];
        std::vector<long> ds;
        size_t c = counter[i];
        for (long k = 0; k < digits; ++k) {
            ds.push_back(static_cast<long>(c % static_cast<size_t>(f.p)));
            c /= static_cast<size_t>(f.p);
        }
        rep[i] = Element::from_digits(f, box.val_lo[i], ds);
    };
    for (size_t i = 0; i < n; ++i) rebuild(i);
    while (true) {
        visit(rep);
        size_t i = 0;
        for (; i < n; ++i) {
            ++counter[i];
            size_t cnt = 1;
            for (long k = 0; k < depth - box.val_lo[i]; ++k) cnt *= static_cast<size_t>(f.p);
            if (counter[i] < cnt) {
                rebuild(i);
                break;
            }
            counter[i] = 0;
            rebuild(i);
        }
        if (i == n) break;
    }
}

inline CycValue run_at_depth(const IntegrationJob& job, int depth) {
    const size_t n = job.box.dimension();
    CycValue acc;
    Rational coset_measure = pow_rat(job.field.p, -static_cast<long>(n) * depth);
    enumerate_box(job.field, job.box, depth, [&](const std::vector<Element>& rep) {
        if (job.domain) {
            EvalContext ctx = job.domain_ctx;
            ctx.field = job.field;
            TriBool in = job.domain->contains(rep, ctx);
            if (in == TriBool::Unknown) throw DomainUndecidedError();
            if (in == TriBool::False) return;
        }
        CycValue v = job.integrand(rep);
        v.scale_by(coset_measure);
        acc += v;
    });
    return acc;
}

}  // namespace intdetail

inline IntegrationResult integrate(const IntegrationJob& job) {
    IntegrationResult res;
    res.depth = job.depth;
    res.value = intdetail::run_at_depth(job, job.depth);
    if (job.refine) {
        CycValue finer = intdetail::run_at_depth(job, job.depth + 1);
        res.refine_checked = true;
        res.refine_agrees = finer == res.value;
    }
    return res;
}

/// Least m <= max_m with f constant on point + p^m O^n, verified by
/// exhaustive enumeration at depth m+1 within the coset.
inline std::optional<int> local_constancy_depth(
    const std::function<CycValue(const std::vector<Element>&)>& f,
    const std::vector<Element>& point, int max_m, const FieldSpec& field) {
    const size_t n = point.size();
    CycValue base = f(point);
    for (int m = 1; m <= max_m; ++m) {
        bool constant = true;
        Box unit;
        unit.val_lo.assign(n, 0);
        intdetail::enumerate_box(field, unit, 1, [&](const std::vector<Element>& digit) {
            if (!constant) return;
            std::vector<Element> shifted(n, Element::zero(field));
            for (size_t i = 0; i < n; ++i) shifted[i] = point[i] + digit[i].shift(m);
            if (f(shifted) != base) constant = false;
        });
        if (constant) return m;
    }
    return std::nullopt;
}

/// Measure of a definable chart against |density|: sum of
/// q^{-ord(density(c))} q^{-m d} over the cosets of the domain.
inline CycValue form_measure(const std::function<Element(const std::vector<Element>&)>& density,
                             const IntegrationJob& domain_spec) {
    IntegrationJob job = domain_spec;
    const long q = job.field.p;
    job.integrand = [&](const std::vector<Element>& rep) -> CycValue {
        Element d = density(rep);
        if (d.is_exact_zero())
            throw Error("form_measure: density vanishes on the domain");
        return CycValue(pow_rat(q, -d.ord()));
    };
    return integrate(job).value;
}

}  // namespace nonarch
