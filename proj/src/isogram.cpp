#include "flexbelt/isogram.hpp"

#include <algorithm>
#include <sstream>

namespace flexbelt {

std::string to_string(Branch b) { return b == Branch::Plus ? "plus" : "minus"; }

Branch branch_from_string(const std::string& s) {
    if (s == "plus" || s == "+") return Branch::Plus;
    if (s == "minus" || s == "-") return Branch::Minus;
    throw InvalidInput("unknown branch '" + s + "' (expected plus|minus)");
}

double transmission_ratio(const IsogramGeometry& geom, double tol_geom) {
    const double d = geom.delta, l = geom.lambda;
    if (!(d > 0.0 && d < kPi) || !(l > 0.0 && l < kPi))
        throw DegenerateIsogram("bar lengths must lie in (0, pi)");
    if (std::abs(d - l) <= tol_geom || std::abs(d + l - kPi) <= tol_geom) {
        std::ostringstream os;
        os << "delta=" << d << ", lambda=" << l << " (delta = lambda or delta + lambda = pi)";
        throw DegenerateIsogram(os.str());
    }
    const double sign = geom.branch == Branch::Plus ? 1.0 : -1.0;
    return (std::sin(d) + sign * std::sin(l)) / std::sin(d - l);
}

double recover_delta(double f, double lambda, Branch branch) {
    if (f == 0.0 || !std::isfinite(f)) throw NoAdmissibleSolution("transmission ratio must be finite and nonzero");
    if (!(lambda > 0.0 && lambda < kPi)) throw NoAdmissibleSolution("lambda must lie in (0, pi)");
    // Minus-branch equation sin d - sin l - f sin(d - l) = 0 has the roots
    // d = l and tan(d/2) = (1 - f) / ((1 + f) tan(l/2)); the Plus branch
    // solutions are those roots shifted by pi.
    const double t = (1.0 - f) / ((1.0 + f) * std::tan(0.5 * lambda));
    const double dm = 2.0 * std::atan(t);  // in (-pi, pi)
    const double delta = branch == Branch::Minus ? dm : dm + kPi;
    if (!(delta > 0.0 && delta < kPi) || !std::isfinite(delta)) {
        std::ostringstream os;
        os << "f=" << f << " has no " << to_string(branch) << "-branch isogram with lambda=" << lambda;
        throw NoAdmissibleSolution(os.str());
    }
    return delta;
}

Vec3 input_point(const Vec3& ci, const Vec3& cj, double dist, double alpha) {
    const Vec3 dir = rotate_about(ci, alpha, tangent_toward(ci, cj));
    return arc_point(ci, dir, dist);
}

Vec3 input_point(const Vec3& ci, const Vec3& cj, double dist, const HalfTangent<double>& a) {
    const Vec3 t = tangent_toward(ci, cj);
    const Vec3 dir = halftangent_cos(a) * t + halftangent_sin(a) * ci.cross(t);
    return arc_point(ci, dir, dist);
}

Vec3 output_point(const Vec3& ci, const Vec3& cj, double dist, double beta) {
    const Vec3 dir = rotate_about(cj, beta, -tangent_toward(cj, ci));
    return arc_point(cj, dir, dist);
}

Vec3 output_point(const Vec3& ci, const Vec3& cj, double dist, const HalfTangent<double>& b) {
    const Vec3 t = -tangent_toward(cj, ci);
    const Vec3 dir = halftangent_cos(b) * t + halftangent_sin(b) * cj.cross(t);
    return arc_point(cj, dir, dist);
}

double output_angle_of(const Vec3& ci, const Vec3& cj, const Vec3& b) {
    return signed_angle_about(-tangent_toward(cj, ci), b, cj);
}

double input_angle_of(const Vec3& ci, const Vec3& cj, const Vec3& a) {
    return signed_angle_about(tangent_toward(ci, cj), a, ci);
}

std::array<double, 2> four_bar_output_angles(const Vec3& ci, const Vec3& cj, double crank_a,
                                             double crank_b, double coupler, double alpha) {
    const Vec3 a = input_point(ci, cj, crank_a, alpha);
    // B(beta) = cos(cb) cj + sin(cb) (cos(beta) u + sin(beta) w)
    const Vec3 u = -tangent_toward(cj, ci);
    const Vec3 w = cj.cross(u);
    const double cb = std::cos(crank_b), sb = std::sin(crank_b);
    // a.B = cos(coupler)  ->  P cos(beta) + Q sin(beta) = R
    const double P = sb * a.dot(u);
    const double Q = sb * a.dot(w);
    const double R = std::cos(coupler) - cb * a.dot(cj);
    const double rho = std::hypot(P, Q);
    if (rho == 0.0 || std::abs(R) > rho * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "no point B closes the 4-bar at alpha=" << alpha;
        throw NoRealClosure(os.str());
    }
    const double phi = std::atan2(Q, P);
    const double spread = std::acos(std::clamp(R / rho, -1.0, 1.0));
    return {wrap_angle(phi - spread), wrap_angle(phi + spread)};
}

double oracle_output(const IsogramGeometry& geom, const Vec3& ci, const Vec3& cj, double alpha,
                     double tol_geom) {
    const double lambda = arc_length(ci, cj);
    if (std::abs(lambda - geom.lambda) > 1e3 * tol_geom)
        throw InvalidInput("frame arc does not match the isogram's lambda");
    const auto betas = four_bar_output_angles(ci, cj, geom.gamma(), geom.delta, geom.mu(), alpha);
    const double t0 = std::abs(std::tan(0.5 * betas[0]));
    const double t1 = std::abs(std::tan(0.5 * betas[1]));
    const bool first_lags = t0 <= t1;
    if (geom.branch == Branch::Minus) return first_lags ? betas[0] : betas[1];
    return first_lags ? betas[1] : betas[0];
}

IsogramMotion classify_motion(double alpha, double beta) {
    const double s = std::tan(0.5 * alpha) * std::tan(0.5 * beta);
    if (s > 0.0) return IsogramMotion::Parallelogram;
    if (s < 0.0) return IsogramMotion::Antiparallelogram;
    return IsogramMotion::Stationary;
}

} // namespace flexbelt
