#include "cransim/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cransim {

namespace {

void check_side(const DegreeDistribution::Coeffs& coeffs, const char* side, int max_degree) {
  if (coeffs.empty()) {
    throw std::invalid_argument(std::string(side) + " coefficients are empty");
  }
  double sum = 0.0;
  for (const auto& [degree, value] : coeffs) {
    if (degree < 1) {
      throw std::invalid_argument(std::string(side) + " degree below 1");
    }
    if (degree > max_degree) {
      throw std::invalid_argument(std::string(side) + " degree " + std::to_string(degree) +
                                  " exceeds limit " + std::to_string(max_degree));
    }
    if (!(value >= 0.0 && value <= 1.0)) {
      throw std::invalid_argument(std::string(side) + " coefficient outside [0,1]");
    }
    sum += value;
  }
  if (std::abs(sum - 1.0) > DegreeDistribution::kNormTol) {
    throw std::invalid_argument(std::string(side) + " coefficients sum to " + std::to_string(sum) +
                                ", not 1");
  }
}

double eval_sparse(const DegreeDistribution::Coeffs& coeffs, double x) {
  double acc = 0.0;
  for (const auto& [degree, value] : coeffs) {
    acc += value * std::pow(x, degree - 1);
  }
  return acc;
}

double integral(const DegreeDistribution::Coeffs& coeffs) {
  double acc = 0.0;
  for (const auto& [degree, value] : coeffs) {
    acc += value / degree;
  }
  return acc;
}

std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

}  // namespace

DegreeDistribution::DegreeDistribution(Coeffs lambda, Coeffs rho, int d_max)
    : lambda_(std::move(lambda)), rho_(std::move(rho)), d_max_(d_max) {
  std::erase_if(lambda_, [](const auto& kv) { return kv.second == 0.0; });
  std::erase_if(rho_, [](const auto& kv) { return kv.second == 0.0; });
  check_side(lambda_, "lambda", d_max_);
  // Check degrees are not limited by d_max; only variable degrees are.
  check_side(rho_, "rho", std::numeric_limits<int>::max());
  lambda_int_ = integral(lambda_);
  rho_int_ = integral(rho_);
}

DegreeDistribution DegreeDistribution::regular(int d_v, int d_c) {
  if (d_v < 2) {
    throw std::invalid_argument("regular code needs d_v >= 2");
  }
  if (d_v >= d_c) {
    throw std::invalid_argument("regular code needs d_v < d_c for a positive rate");
  }
  return DegreeDistribution({{d_v, 1.0}}, {{d_c, 1.0}}, d_v);
}

double DegreeDistribution::eval_lambda(double x) const { return eval_sparse(lambda_, x); }

double DegreeDistribution::eval_rho(double x) const { return eval_sparse(rho_, x); }

double DegreeDistribution::design_rate() const {
  if (lambda_int_ <= 0.0) {
    throw std::domain_error("degenerate distribution: sum lambda_i / i is zero");
  }
  return 1.0 - rho_int_ / lambda_int_;
}

double DegreeDistribution::lambda_coeff(int degree) const {
  auto it = lambda_.find(degree);
  return it == lambda_.end() ? 0.0 : it->second;
}

std::optional<int> DegreeDistribution::check_degree() const {
  if (rho_.size() != 1) return std::nullopt;
  return rho_.begin()->first;
}

CodeSpec::CodeSpec(DegreeDistribution dist, double rate_in, double threshold_in, std::string label_in)
    : distribution(std::move(dist)), rate(rate_in), threshold(threshold_in), label(std::move(label_in)) {
  const double actual = distribution.design_rate();
  if (std::abs(actual - rate) > 1e-6) {
    throw std::invalid_argument("code rate " + std::to_string(rate) +
                                " does not match design rate " + std::to_string(actual));
  }
  if (!(threshold > 0.0) || threshold > 1.0 - rate) {
    throw std::invalid_argument("threshold " + std::to_string(threshold) +
                                " violates the erasure capacity bound 1 - R");
  }
}

CodePalette::CodePalette(std::vector<CodeSpec> codes) : codes_(std::move(codes)) {
  if (codes_.empty()) {
    throw std::invalid_argument("palette is empty");
  }
  for (std::size_t i = 1; i < codes_.size(); ++i) {
    if (!(codes_[i].rate > codes_[i - 1].rate)) {
      throw std::invalid_argument("palette rates must strictly increase");
    }
    if (!(codes_[i].threshold < codes_[i - 1].threshold)) {
      throw std::invalid_argument("palette thresholds must strictly decrease");
    }
  }
}

std::optional<std::size_t> CodePalette::best_code_for(double eps0) const {
  // Thresholds decrease with rate, so scan from the highest rate down.
  for (std::size_t i = codes_.size(); i-- > 0;) {
    if (codes_[i].threshold > eps0) return i;
  }
  return std::nullopt;
}

const CodeSpec* CodePalette::find_label(const std::string& label) const {
  for (const auto& code : codes_) {
    if (code.label == label) return &code;
  }
  return nullptr;
}

void CodePalette::write(std::ostream& out) const {
  out << "palette-version 1\n";
  for (const auto& code : codes_) {
    out << "code\n";
    out << "label " << code.label << "\n";
    out << "dc " << *code.distribution.check_degree() << "\n";
    out << "rate " << format_sig(code.rate) << "\n";
    out << "threshold " << format_sig(code.threshold) << "\n";
    for (const auto& [degree, value] : code.distribution.lambda()) {
      out << "lambda " << degree << " " << format_sig(value) << "\n";
    }
    out << "end\n";
  }
}

CodePalette CodePalette::read(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "palette-version 1") {
    throw std::runtime_error("palette file: bad or missing version line");
  }
  std::vector<CodeSpec> codes;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line != "code") {
      throw std::runtime_error("palette file: expected 'code', got '" + line + "'");
    }
    std::string label;
    int dc = 0;
    double rate = -1.0, thresh = -1.0;
    DegreeDistribution::Coeffs lambda;
    while (std::getline(in, line) && line != "end") {
      std::istringstream ls(line);
      std::string key;
      ls >> key;
      if (key == "label") {
        std::getline(ls, label);
        if (!label.empty() && label.front() == ' ') label.erase(0, 1);
      } else if (key == "dc") {
        ls >> dc;
      } else if (key == "rate") {
        ls >> rate;
      } else if (key == "threshold") {
        ls >> thresh;
      } else if (key == "lambda") {
        int degree = 0;
        double value = 0.0;
        ls >> degree >> value;
        lambda[degree] = value;
      } else {
        throw std::runtime_error("palette file: unknown field '" + key + "'");
      }
    }
    if (dc <= 0 || rate < 0.0 || thresh < 0.0 || lambda.empty()) {
      throw std::runtime_error("palette file: incomplete code record");
    }
    int dmax = lambda.rbegin()->first;
    codes.emplace_back(DegreeDistribution(std::move(lambda), {{dc, 1.0}}, dmax), rate, thresh,
                       label);
  }
  return CodePalette(std::move(codes));
}

void CodePalette::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open palette file for writing: " + path);
  }
  write(out);
}

CodePalette CodePalette::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open palette file: " + path);
  }
  return read(in);
}

}  // namespace cransim
