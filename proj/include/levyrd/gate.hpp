#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace levyrd {

// Strict theorem inequalities are open conditions; a pass requires positive
// slack beyond this tolerance to avoid float-boundary false passes.
inline constexpr double kGateSlackTol = 1e-12;

struct InequalityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool strict = true;
  bool domain = false;  // domain constraint rather than a theorem inequality
  double slack = 0.0;   // rhs - lhs for lhs < rhs conditions
  bool pass = false;
};

struct HypothesisReport {
  std::string theorem;
  std::vector<std::pair<std::string, double>> params;
  std::vector<InequalityCheck> checks;
  bool pass = true;
  std::string note;

  void add(std::string name, double lhs, double rhs, bool strict = true,
           bool domain = false) {
    InequalityCheck c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.strict = strict;
    c.domain = domain;
    c.slack = rhs - lhs;
    c.pass = strict ? (c.slack > kGateSlackTol) : (c.slack >= -kGateSlackTol);
    checks.push_back(c);
    pass = pass && c.pass;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["theorem"] = theorem;
    nlohmann::ordered_json p;
    for (const auto& [k, v] : params) p[k] = v;
    j["params"] = p;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
      nlohmann::ordered_json e;
      e["name"] = c.name;
      e["lhs"] = c.lhs;
      e["rhs"] = c.rhs;
      e["strict"] = c.strict;
      e["domain"] = c.domain;
      e["slack"] = c.slack;
      e["verdict"] = c.pass ? "pass" : "fail";
      arr.push_back(e);
    }
    j["checks"] = arr;
    j["verdict"] = pass ? "pass" : "fail";
    if (!note.empty()) j["note"] = note;
    return j;
  }
};

// Main existence condition: delta > max(delta_G + 1/p, delta_F - 1 + 1/p,
// delta_I), with the parameter domains p in (1,2], delta_G in [0, 1/p),
// delta_F in [0, 1), delta_I < 1/p.
inline HypothesisReport check_main(double delta, double delta_F, double delta_G,
                                   double delta_I, double p) {
  HypothesisReport rep;
  rep.theorem = "main_moment_bound";
  rep.params = {{"delta", delta}, {"delta_F", delta_F}, {"delta_G", delta_G},
                {"delta_I", delta_I}, {"p", p}};
  rep.note = "(H4) interpreted as the positivity shift A + nu0 I";
  rep.add("p > 1", 1.0, p, true, true);
  rep.add("p <= 2", p, 2.0, false, true);
  rep.add("delta_G >= 0", 0.0, delta_G, false, true);
  rep.add("delta_G < 1/p", delta_G, 1.0 / p, true, true);
  rep.add("delta_F >= 0", 0.0, delta_F, false, true);
  rep.add("delta_F < 1", delta_F, 1.0, true, true);
  rep.add("delta_I < 1/p", delta_I, 1.0 / p, true, true);
  double m = std::max({delta_G + 1.0 / p, delta_F - 1.0 + 1.0 / p, delta_I});
  rep.add("delta > max(delta_G + 1/p, delta_F - 1 + 1/p, delta_I)", m, delta);
  return rep;
}

// Spectral-noise reaction-diffusion example:
//   d/r < d/(2p) (alpha - 1/2 + 1/r) - 3/p + 3/q
//   delta + 2/p < d/(2p) (alpha - 1/2 + 1/p)
inline HypothesisReport check_ex01(double d, double p, double q, double r,
                                   double alpha, double delta) {
  HypothesisReport rep;
  rep.theorem = "spectral_noise_example";
  rep.params = {{"d", d},     {"p", p},     {"q", q},
                {"r", r},     {"alpha", alpha}, {"delta", delta},
                {"theta", 1.0 - p / q}};
  rep.add("p > 1", 1.0, p, true, true);
  rep.add("p <= 2", p, 2.0, false, true);
  rep.add("r >= p", p, r, false, true);
  rep.add("q >= p", p, q, false, true);
  rep.add("alpha > 0", 0.0, alpha, true, true);
  double rhs1 = d / (2.0 * p) * (alpha - 0.5 + 1.0 / r) - 3.0 / p + 3.0 / q;
  rep.add("d/r < d/(2p)(alpha - 1/2 + 1/r) - 3/p + 3/q", d / r, rhs1);
  double rhs2 = d / (2.0 * p) * (alpha - 0.5 + 1.0 / p);
  rep.add("delta + 2/p < d/(2p)(alpha - 1/2 + 1/p)", delta + 2.0 / p, rhs2);
  return rep;
}

// Space-time Poissonian white noise, operator of order 2k:
//   d < 2k/p + 4 (1/q - 1/p)   and   gamma > d - d/p
inline HypothesisReport check_stpn(double d, int k_order, double p, double q,
                                   double gamma) {
  HypothesisReport rep;
  rep.theorem = "spacetime_noise_example";
  rep.params = {{"d", d}, {"k", static_cast<double>(k_order)}, {"p", p},
                {"q", q}, {"gamma", gamma}};
  rep.add("k >= 1", 1.0, static_cast<double>(k_order), false, true);
  rep.add("p > 1", 1.0, p, true, true);
  rep.add("p <= 2", p, 2.0, false, true);
  rep.add("q >= p", p, q, false, true);
  double rhs1 = 2.0 * k_order / p + 4.0 * (1.0 / q - 1.0 / p);
  rep.add("d < 2k/p + 4(1/q - 1/p)", d, rhs1);
  rep.add("gamma > d - d/p", d - d / p, gamma);
  return rep;
}

// Mode-sum convergence condition: alpha > 1 + p(gamma/d + 1/2 - 1/r), r >= 2.
inline HypothesisReport check_claim_spectral(double alpha, double gamma, double d,
                                             double p, double r) {
  HypothesisReport rep;
  rep.theorem = "spectral_mode_sum";
  rep.params = {{"alpha", alpha}, {"gamma", gamma}, {"d", d}, {"p", p}, {"r", r}};
  rep.add("r >= 2", 2.0, r, false, true);
  double thr = 1.0 + p * (gamma / d + 0.5 - 1.0 / r);
  rep.add("alpha > 1 + p(gamma/d + 1/2 - 1/r)", thr, alpha);
  return rep;
}

}  // namespace levyrd
