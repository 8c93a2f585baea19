#pragma once

// Spherical isogram model. A type-(1) isogram at vertex V_i has frame bar
// C_i C_{i+1} of length lambda, cranks C_i A_i and C_{i+1} B_i of length delta
// and coupler A_i B_i of length lambda. Its input angle alpha and output angle
// beta satisfy tan(beta/2) = f tan(alpha/2).
//
// Angle conventions (used by every module that places spherical points):
//   alpha is measured at C_i from the arc C_i -> C_{i+1} toward A_i,
//         right-handed about C_i;
//   beta  is measured at C_{i+1} from the extension of the arc C_i -> C_{i+1}
//         beyond C_{i+1} toward B_i, right-handed about C_{i+1}.
// With these, alpha = beta = 0 is the stretched configuration with all four
// points on the great circle of C_i C_{i+1}.

#include "flexbelt/sphkin.hpp"

#include <array>
#include <string>

namespace flexbelt {

enum class Branch { Plus, Minus };

inline Branch flipped(Branch b) { return b == Branch::Plus ? Branch::Minus : Branch::Plus; }
std::string to_string(Branch b);
Branch branch_from_string(const std::string& s);

struct IsogramGeometry {
    double delta = 0.0;   // crank length, gamma = delta for type (1)
    double lambda = 0.0;  // frame length, mu = lambda for type (1)
    Branch branch = Branch::Minus;

    double gamma() const { return delta; }
    double mu() const { return lambda; }
};

// f = (sin delta +- sin lambda) / sin(delta - lambda).
double transmission_ratio(const IsogramGeometry& geom, double tol_geom = Tolerances{}.geom);

// b = f a in homogeneous form: (p, q) -> (f p, q).
template <typename T>
HalfTangent<T> transmit(T f, const HalfTangent<T>& a) {
    return {f * a.p, a.q};
}

// The unique delta in (0, pi), delta != lambda, with transmission ratio f on
// the given branch. Throws NoAdmissibleSolution when |f| lies on the wrong
// side of 1 for the branch (|f| < 1 on Minus, |f| > 1 on Plus).
double recover_delta(double f, double lambda, Branch branch);

// Point at arc distance `dist` from ci, at input angle alpha.
Vec3 input_point(const Vec3& ci, const Vec3& cj, double dist, double alpha);
Vec3 input_point(const Vec3& ci, const Vec3& cj, double dist, const HalfTangent<double>& a);

// Point at arc distance `dist` from cj, at output angle beta.
Vec3 output_point(const Vec3& ci, const Vec3& cj, double dist, double beta);
Vec3 output_point(const Vec3& ci, const Vec3& cj, double dist, const HalfTangent<double>& b);

// Output angle of an arbitrary point b seen from cj (inverse of output_point).
double output_angle_of(const Vec3& ci, const Vec3& cj, const Vec3& b);
double input_angle_of(const Vec3& ci, const Vec3& cj, const Vec3& a);

// Direct spherical 4-bar closure: places A at arc `crank_a` from ci with input
// angle alpha and returns both output angles beta for which B at arc
// `crank_b` from cj satisfies arc(A, B) = coupler. Throws NoRealClosure.
std::array<double, 2> four_bar_output_angles(const Vec3& ci, const Vec3& cj, double crank_a,
                                             double crank_b, double coupler, double alpha);

// Isogram output on the requested branch, from the direct closure above.
// The Minus branch is the lagging solution (|tan(beta/2)| <= |tan(alpha/2)|),
// the Plus branch the leading one.
double oracle_output(const IsogramGeometry& geom, const Vec3& ci, const Vec3& cj, double alpha,
                     double tol_geom = Tolerances{}.geom);

enum class IsogramMotion { Parallelogram, Antiparallelogram, Stationary };

// Parallelogram when input and output rotate in the same sense.
IsogramMotion classify_motion(double alpha, double beta);

} // namespace flexbelt
