#include "awave/flux.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "detail/poly.hpp"

namespace awave {

using detail::poly_derive;
using detail::poly_eval;
using detail::poly_max_abs_over;
using detail::poly_min_over;

void Flux::require_in_range(double u, double xi) const {
    if (!(u >= working_range[0] && u <= working_range[1])) {
        std::ostringstream msg;
        msg << "profile value " << u << " at xi=" << xi
            << " is outside the flux working range [" << working_range[0] << ", "
            << working_range[1] << "]";
        throw range_error(msg.str(), u, xi);
    }
}

Flux make_flux(const std::string& kind, std::array<double, 2> working_range,
               const std::vector<double>& coeffs) {
    if (!(working_range[0] < working_range[1]))
        throw config_error("flux working range must satisfy lo < hi");

    std::vector<double> c;
    if (kind == "quadratic_half") {
        c = {0.0, 0.0, 0.5};
    } else if (kind == "quadratic") {
        c = {0.0, 0.0, 1.0};
    } else if (kind == "cubic") {
        c = {0.0, 0.0, 0.0, 1.0};
    } else if (kind == "cubic_third") {
        c = {0.0, 0.0, 0.0, 1.0 / 3.0};
    } else if (kind == "polynomial") {
        if (coeffs.empty()) throw config_error("polynomial flux needs coefficients");
        c = coeffs;
    } else {
        throw config_error("unknown flux kind: " + kind);
    }
    if (kind != "polynomial" && !coeffs.empty())
        throw config_error("flux kind '" + kind + "' does not take coefficients");

    std::vector<double> c1 = poly_derive(c);
    std::vector<double> c2 = poly_derive(c1);
    std::vector<double> c3 = poly_derive(c2);

    if (poly_eval(c1, 0.0) < 0.0)
        throw config_error("flux must satisfy f'(0) >= 0 for the boundary condition");

    Flux fx;
    fx.kind = kind;
    fx.coeffs = c;
    fx.working_range = working_range;
    fx.eval = [c](double u) { return poly_eval(c, u); };
    fx.d1 = [c1](double u) { return poly_eval(c1, u); };
    fx.d2 = [c2](double u) { return poly_eval(c2, u); };
    fx.lip_d2 = poly_max_abs_over(c3, working_range[0], working_range[1]);
    fx.convex = poly_min_over(c2, working_range[0], working_range[1]) >= 0.0;
    return fx;
}

ValidationReport validate_flux(const Flux& fx, int samples) {
    ValidationReport report;
    auto flag = [&](const std::string& invariant, double margin) {
        report.issues.push_back({invariant, margin});
    };

    const double lo = fx.working_range[0], hi = fx.working_range[1];
    if (!(lo < hi)) {
        flag("working_range_ordered", hi - lo);
        return report;
    }

    double d10 = fx.d1(0.0);
    if (d10 < 0.0) flag("boundary_speed_nonnegative", d10);

    // Finite-difference consistency of d1 and d2 against eval. The probe
    // step stays inside the range; the tolerance covers the O(h^2) truncation
    // term of the centered stencils plus roundoff.
    const double h = 1e-4 * std::max(1.0, hi - lo);
    double scale = 1.0;
    for (int i = 0; i < samples; ++i) {
        double u = lo + (hi - lo) * (i + 0.5) / samples;
        scale = std::max({scale, std::fabs(fx.eval(u)), std::fabs(fx.d1(u))});
    }
    const double fd_tol = fx.lip_d2 * h * h + 1e-8 * scale;

    double worst_d1 = 0.0, worst_d2 = 0.0;
    for (int i = 0; i < samples; ++i) {
        double u = lo + (hi - lo) * (i + 0.5) / samples;
        if (u - h < lo || u + h > hi) continue;
        double fd1 = (fx.eval(u + h) - fx.eval(u - h)) / (2.0 * h);
        double fd2 = (fx.eval(u + h) - 2.0 * fx.eval(u) + fx.eval(u - h)) / (h * h);
        worst_d1 = std::max(worst_d1, std::fabs(fd1 - fx.d1(u)));
        worst_d2 = std::max(worst_d2, std::fabs(fd2 - fx.d2(u)));
    }
    if (worst_d1 > fd_tol) flag("d1_matches_eval", worst_d1);
    if (worst_d2 > std::max(fd_tol, 1e-6 * scale)) flag("d2_matches_eval", worst_d2);

    // lip_d2 must dominate the difference quotients of d2.
    double worst_lip = 0.0;
    for (int i = 0; i + 1 < samples; ++i) {
        double a = lo + (hi - lo) * i / (samples - 1.0);
        double b = lo + (hi - lo) * (i + 1) / (samples - 1.0);
        worst_lip = std::max(worst_lip, std::fabs(fx.d2(b) - fx.d2(a)) / (b - a));
    }
    if (worst_lip > fx.lip_d2 * (1.0 + 1e-9) + 1e-12)
        flag("lip_d2_bounds_d2", worst_lip - fx.lip_d2);

    if (fx.convex) {
        double min_d2 = 0.0;
        for (int i = 0; i < samples; ++i) {
            double u = lo + (hi - lo) * i / (samples - 1.0);
            min_d2 = std::min(min_d2, fx.d2(u));
        }
        if (min_d2 < -1e-12) flag("convexity_flag", min_d2);
    }
    return report;
}

Flux flux_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw config_error(std::string("flux JSON parse failure: ") + e.what());
    }
    if (!j.is_object() || !j.contains("kind"))
        throw config_error("flux JSON must be an object with a \"kind\" field");

    std::string kind = j.at("kind").get<std::string>();
    std::array<double, 2> range{-8.0, 8.0};
    if (j.contains("range")) {
        auto r = j.at("range");
        if (!r.is_array() || r.size() != 2)
            throw config_error("flux \"range\" must be [lo, hi]");
        range = {r[0].get<double>(), r[1].get<double>()};
    }
    std::vector<double> coeffs;
    if (j.contains("coeffs")) coeffs = j.at("coeffs").get<std::vector<double>>();
    if (kind == "polynomial") return make_flux(kind, range, coeffs);
    // Named kinds serialize their canonical coefficients; accept them back as
    // long as they agree with the kind they claim to describe.
    Flux fx = make_flux(kind, range);
    if (!coeffs.empty() && coeffs != fx.coeffs)
        throw config_error("flux coeffs do not match kind '" + kind + "'");
    return fx;
}

std::string flux_to_json(const Flux& fx) {
    nlohmann::json j;
    j["kind"] = fx.kind;
    j["coeffs"] = fx.coeffs;
    j["range"] = {fx.working_range[0], fx.working_range[1]};
    return j.dump(2);
}

}  // namespace awave
