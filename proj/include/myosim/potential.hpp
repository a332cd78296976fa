#pragma once
// Tilted periodic landscape v(x) = u(x) - b*x with u of period 1, anchored so
// v(0) = 0 and v(1/2) = 1.  The built-in closed form is
//
//   v(x) = ((2+b)/2) sin^2(pi x) + (b/(4 pi)) sin(4 pi x) - b x,
//
// chosen so the anchors hold exactly for every b and the drift -v' has
// exactly one stable and one unstable zero per period for all b in (0, 1].
// User-supplied landscapes come in as uniform samples of u over one period
// and are evaluated through a periodic cubic spline.

#include <string>
#include <vector>

namespace myosim {

enum class PotentialForm { default_trig, user_table };

struct PotentialSpec {
  PotentialForm form = PotentialForm::default_trig;
  double tilt_b = 0.5;
  double kappa = 1.0;

  // user_table only: knots of u on [-1/2, 1/2], uniform, both endpoints
  // present.  table_m holds the spline second derivatives at the interior
  // representation (filled by make_table_spec, size = knots - 1).
  std::vector<double> table_x;
  std::vector<double> table_u;
  std::vector<double> table_m;
};

// Builds a user_table spec.  The samples are taken as-is; whether they close
// up periodically is reported by validate_spec, not enforced here.
PotentialSpec make_table_spec(double tilt_b, double kappa,
                              const std::vector<double>& x,
                              const std::vector<double>& u);

double eval_potential(const PotentialSpec& spec, double x);
// v'(x); integrators apply the kappa factor themselves
double eval_drift(const PotentialSpec& spec, double x);
double eval_curvature(const PotentialSpec& spec, double x);
// sup |v''| over one period, dense grid scan; feeds the dt stability guard
double max_abs_curvature(const PotentialSpec& spec);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
  const CheckResult* find(const std::string& name) const;
  std::string summary() const;
};

// Anchors, tilt identity, parameter ranges, and the one-well-per-period
// critical point count (a 10^4-point sign-change scan of v').
ValidationReport validate_spec(const PotentialSpec& spec);

}  // namespace myosim
