#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cransim {

// Edge-perspective degree distributions lambda(x), rho(x) of an LDPC ensemble.
//
// Coefficients are stored sparsely (degree -> fraction of edges); designed
// distributions with d_max = 200 carry only a handful of nonzero terms.
// Construction validates and rejects rather than renormalizing: each side must
// sum to 1 within kNormTol, every coefficient must lie in [0, 1], and no
// variable degree may exceed d_max. Instances are immutable and safe to share
// across threads.
class DegreeDistribution {
 public:
  using Coeffs = std::map<int, double>;
  static constexpr double kNormTol = 1e-9;

  DegreeDistribution(Coeffs lambda, Coeffs rho, int d_max);

  // (d_v, d_c)-regular ensemble: lambda(x) = x^(d_v-1), rho(x) = x^(d_c-1).
  static DegreeDistribution regular(int d_v, int d_c);

  // sum_i c_i x^(i-1) over the lambda (variable) side.
  double eval_lambda(double x) const;
  // sum_j c_j x^(j-1) over the rho (check) side.
  double eval_rho(double x) const;

  // 1 - (sum rho_j / j) / (sum lambda_i / i).
  double design_rate() const;

  double lambda_integral() const { return lambda_int_; }
  double rho_integral() const { return rho_int_; }

  const Coeffs& lambda() const { return lambda_; }
  const Coeffs& rho() const { return rho_; }
  int d_max() const { return d_max_; }
  double lambda_coeff(int degree) const;

  // The common check degree when exactly one rho coefficient is nonzero.
  std::optional<int> check_degree() const;

 private:
  Coeffs lambda_;
  Coeffs rho_;
  int d_max_;
  double lambda_int_;
  double rho_int_;
};

// A designed ensemble annotated with its design rate and erasure threshold.
// Construction checks rate against the distribution (1e-6) and the erasure
// capacity bound threshold <= 1 - rate.
struct CodeSpec {
  CodeSpec(DegreeDistribution dist, double rate, double threshold, std::string label);

  DegreeDistribution distribution;
  double rate;
  double threshold;
  std::string label;
};

// Rate-indexed menu of codes. Rates strictly increase and thresholds strictly
// decrease, so the codes decodable at a given eps0 always form a prefix.
class CodePalette {
 public:
  explicit CodePalette(std::vector<CodeSpec> codes);

  std::size_t size() const { return codes_.size(); }
  const CodeSpec& operator[](std::size_t i) const { return codes_[i]; }
  const std::vector<CodeSpec>& codes() const { return codes_; }

  // Index of the highest-rate code with threshold > eps0, if any.
  std::optional<std::size_t> best_code_for(double eps0) const;
  const CodeSpec* find_label(const std::string& label) const;
  double max_threshold() const { return codes_.front().threshold; }
  double max_rate() const { return codes_.back().rate; }

  void write(std::ostream& out) const;
  static CodePalette read(std::istream& in);
  void save(const std::string& path) const;
  static CodePalette load(const std::string& path);

 private:
  std::vector<CodeSpec> codes_;
};

}  // namespace cransim
