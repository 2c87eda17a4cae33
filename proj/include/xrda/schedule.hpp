#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xrda/point.hpp"

namespace xrda {

enum class Preset { ForwardBackward, RDA, LeapFrog, ConstantBackward, AveragedLeapFrog };

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::ForwardBackward: return "forward_backward";
    case Preset::RDA: return "rda";
    case Preset::LeapFrog: return "leap_frog";
    case Preset::ConstantBackward: return "constant_backward";
    case Preset::AveragedLeapFrog: return "averaged_leap_frog";
  }
  return "?";
}

inline std::optional<Preset> preset_from_string(const std::string& s) {
  for (Preset p : {Preset::ForwardBackward, Preset::RDA, Preset::LeapFrog, Preset::ConstantBackward,
                   Preset::AveragedLeapFrog}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

/// Forward step sizes s_n, n >= 1.
template <typename Scalar>
class StepSequence {
 public:
  enum class Kind { Constant, InverseSqrt, Power, List };

  static StepSequence constant(Scalar value) { return StepSequence(Kind::Constant, value, Scalar(0), {}); }
  /// scale / sqrt(n)
  static StepSequence inverse_sqrt(Scalar scale) { return StepSequence(Kind::InverseSqrt, scale, Scalar(0.5), {}); }
  /// scale * n^(-exponent)
  static StepSequence power(Scalar scale, Scalar exponent) { return StepSequence(Kind::Power, scale, exponent, {}); }
  /// Explicit prefix; the last value is held afterwards.
  static StepSequence list(std::vector<Scalar> values) {
    return StepSequence(Kind::List, Scalar(0), Scalar(0), std::move(values));
  }

  Scalar operator()(Eigen::Index n) const {
    using std::pow;
    using std::sqrt;
    switch (kind_) {
      case Kind::Constant: return scale_;
      case Kind::InverseSqrt: return scale_ / sqrt(Scalar(n));
      case Kind::Power: return scale_ * pow(Scalar(n), -exponent_);
      case Kind::List: {
        const auto i = static_cast<std::size_t>(n - 1);
        return i < values_.size() ? values_[i] : values_.back();
      }
    }
    return scale_;
  }

  [[nodiscard]] Kind kind() const { return kind_; }

  /// Human-readable reasons this sequence is infeasible (empty when valid).
  [[nodiscard]] std::vector<std::string> problems() const {
    std::vector<std::string> out;
    if (kind_ == Kind::List) {
      if (values_.empty()) out.emplace_back("s list must be nonempty");
      for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > Scalar(0))) out.emplace_back("s values must be positive");
        if (i > 0 && values_[i] > values_[i - 1]) {
          out.emplace_back("s must be non-increasing");
          break;
        }
      }
    } else {
      if (!(scale_ > Scalar(0)) || !std::isfinite(static_cast<double>(scale_))) {
        out.emplace_back("s scale must be positive");
      }
      if (kind_ == Kind::Power && exponent_ < Scalar(0)) out.emplace_back("s must be non-increasing");
    }
    return out;
  }

 private:
  StepSequence(Kind kind, Scalar scale, Scalar exponent, std::vector<Scalar> values)
      : kind_(kind), scale_(scale), exponent_(exponent), values_(std::move(values)) {}

  Kind kind_;
  Scalar scale_;
  Scalar exponent_;
  std::vector<Scalar> values_;
};

/// Prox-centre weights alpha_n: a constant, or c * sqrt(n).
template <typename Scalar>
struct AlphaSequence {
  bool sqrt_growth = false;
  Scalar coeff = Scalar(1);

  static AlphaSequence constant(Scalar a) { return {false, a}; }
  static AlphaSequence sqrt_n(Scalar c) { return {true, c}; }

  Scalar operator()(Eigen::Index n) const {
    using std::sqrt;
    return sqrt_growth ? coeff * sqrt(Scalar(n)) : coeff;
  }
};

/// What a state-dependent averaging rule gets to look at.
template <typename Scalar>
struct AveragingContext {
  Eigen::Index n;
  Scalar gamma_n;
  Scalar s_n;
  Scalar s_prev;  // s_{n-1}; zero when n == 1
  const PrimalPoint<Scalar>& x_n;
};

/// Rule producing the averaging weight t_n (with 0 <= t_n <= gamma_n).
template <typename Scalar>
struct AveragingPolicy {
  enum class Rule { None, PreviousStep, CurrentStep, Fraction, Custom };
  Rule rule = Rule::None;
  Scalar mu = Scalar(0);
  std::function<Scalar(const AveragingContext<Scalar>&)> custom;

  static AveragingPolicy none() { return {}; }
  static AveragingPolicy previous_step() { return {Rule::PreviousStep, Scalar(0), {}}; }
  static AveragingPolicy current_step() { return {Rule::CurrentStep, Scalar(0), {}}; }
  static AveragingPolicy fraction(Scalar mu) { return {Rule::Fraction, mu, {}}; }
  /// Hook for adaptive rules; no policy of this kind ships by default.
  static AveragingPolicy adaptive(std::function<Scalar(const AveragingContext<Scalar>&)> f) {
    return {Rule::Custom, Scalar(0), std::move(f)};
  }

  Scalar operator()(const AveragingContext<Scalar>& ctx) const {
    if (ctx.n <= 1) return Scalar(0);
    switch (rule) {
      case Rule::None: return Scalar(0);
      case Rule::PreviousStep: return ctx.s_prev;
      case Rule::CurrentStep: return ctx.s_n;
      case Rule::Fraction: return mu * ctx.gamma_n;
      case Rule::Custom: return custom(ctx);
    }
    return Scalar(0);
  }
};

/// Parameter sequences (s_n, alpha_n, t_n) driving the iteration. The
/// backward weight gamma follows gamma_{n+1} = gamma_n - t_n + s_n.
template <typename Scalar>
struct Schedule {
  StepSequence<Scalar> s = StepSequence<Scalar>::constant(Scalar(1));
  AlphaSequence<Scalar> alpha;
  AveragingPolicy<Scalar> t;
  std::optional<Preset> preset;

  /// Static feasibility problems (empty when valid).
  [[nodiscard]] std::vector<std::string> problems() const {
    std::vector<std::string> out = s.problems();
    if (!(alpha.coeff > Scalar(0))) out.emplace_back("alpha coefficient must be positive");
    if (t.rule == AveragingPolicy<Scalar>::Rule::Fraction && !(t.mu >= Scalar(0) && t.mu <= Scalar(1))) {
      out.emplace_back("mu must lie in [0, 1]");
    }
    if (t.rule == AveragingPolicy<Scalar>::Rule::Custom && !t.custom) out.emplace_back("adaptive rule is empty");
    return out;
  }

  void validate() const {
    const auto errs = problems();
    if (!errs.empty()) {
      std::string msg = "invalid schedule:";
      for (const auto& e : errs) msg += " " + e + ";";
      throw ConfigError(msg);
    }
  }
};

template <typename Scalar>
struct PresetParams {
  StepSequence<Scalar> step = StepSequence<Scalar>::inverse_sqrt(Scalar(1));
  Scalar rda_c = Scalar(1);
  Scalar mu = Scalar(0.5);
};

/// The named special cases:
///  - ForwardBackward: alpha = 1, t_n = s_{n-1} (so t_n = gamma_n and the
///    backward step equals s_n).
///  - RDA(c): s = 1, alpha_n = c sqrt(n), t = 0.
///  - LeapFrog: alpha = 1, t = 0 (backward step sum of s_i).
///  - ConstantBackward: alpha = 1, t_n = s_n (backward step fixed at s_1).
///  - AveragedLeapFrog(mu): alpha = 1, t_n = mu gamma_n.
template <typename Scalar>
Schedule<Scalar> schedule_preset(Preset kind, const PresetParams<Scalar>& params = {}) {
  Schedule<Scalar> sch;
  sch.preset = kind;
  sch.s = params.step;
  sch.alpha = AlphaSequence<Scalar>::constant(Scalar(1));
  switch (kind) {
    case Preset::ForwardBackward: sch.t = AveragingPolicy<Scalar>::previous_step(); break;
    case Preset::RDA:
      if (!(params.rda_c > Scalar(0))) throw ConfigError("invalid schedule: rda c must be positive");
      sch.s = StepSequence<Scalar>::constant(Scalar(1));
      sch.alpha = AlphaSequence<Scalar>::sqrt_n(params.rda_c);
      sch.t = AveragingPolicy<Scalar>::none();
      break;
    case Preset::LeapFrog: sch.t = AveragingPolicy<Scalar>::none(); break;
    case Preset::ConstantBackward: sch.t = AveragingPolicy<Scalar>::current_step(); break;
    case Preset::AveragedLeapFrog: sch.t = AveragingPolicy<Scalar>::fraction(params.mu); break;
  }
  sch.validate();
  return sch;
}

}  // namespace xrda
