#pragma once

#include <span>
#include <string_view>

namespace synlang {

// A confidence value in [0, 1]. Construction throws std::invalid_argument
// outside the range or on non-finite input.
class Confidence {
  public:
    explicit Confidence(double value);
    double value() const { return value_; }

    friend bool operator==(Confidence a, Confidence b) { return a.value_ == b.value_; }

  private:
    double value_;
};

// Receiver-side reliability multiplier, [0.5, 1.0].
class TrustFactor {
  public:
    explicit TrustFactor(double value);
    double value() const { return value_; }

  private:
    double value_;
};

// Chain-composition multiplier, (0, 1]. The upper bound keeps composition
// from manufacturing confidence.
class CoherenceFactor {
  public:
    explicit CoherenceFactor(double value);
    double value() const { return value_; }

  private:
    double value_;
};

// How confidence degrades when information crosses agents. Multiplicative
// applies transmission_factor x trust_factor; fixed decrement subtracts a
// constant (trust ignored), matching the 0.95 -> 0.93 style of degradation.
class PropagationPolicy {
  public:
    enum class Mode { Multiplicative, FixedDecrement };

    static PropagationPolicy multiplicative(double transmission_factor);  // [0.9, 1.0]
    static PropagationPolicy fixed_decrement(double decrement);           // [0, 0.1]

    Mode mode() const { return mode_; }
    double transmission_factor() const { return transmission_; }
    double decrement() const { return decrement_; }

  private:
    PropagationPolicy(Mode mode, double transmission, double decrement)
        : mode_(mode), transmission_(transmission), decrement_(decrement) {}

    Mode mode_;
    double transmission_;
    double decrement_;
};

// Confidence after one inter-agent hop; never exceeds the input.
Confidence propagate(Confidence c, const PropagationPolicy& policy, TrustFactor trust);

// Product of the chain confidences times the coherence factor; never
// exceeds the weakest step. Throws std::invalid_argument on an empty chain.
Confidence compose_chain(std::span<const Confidence> steps, CoherenceFactor coherence);

enum class Humility { Holds, Violated };

// Holds iff derived <= original + 1e-12.
Humility check_humility(Confidence original, Confidence derived);

// The four authority inputs, each in [0, 1]. expertise_match = 1 means the
// task sits squarely in the AI's domain strength; time_constraints = 1
// means extreme time pressure.
struct AuthorityContext {
    AuthorityContext(double expertise_match, double consequence_severity,
                     double value_alignment, double time_constraints);

    double expertise_match;
    double consequence_severity;
    double value_alignment;
    double time_constraints;
};

// Weights of the clamped affine authority function. Defaults are calibrated
// so that representative profiles land on the published anchor values and
// an all-0.5 context maps to exactly 0.5.
struct AuthorityWeights {
    double expertise_match = -0.35;
    double consequence_severity = 0.35;
    double value_alignment = 0.35;
    double time_constraints = -0.15;
    double bias = 0.4;

    static AuthorityWeights defaults() { return {}; }

    // Flat key-value text with the five field names. Unknown keys throw.
    static AuthorityWeights from_config(std::string_view text);
};

AuthorityContext authority_context_from_config(std::string_view text);

// alpha in [0, 1]: 1 = full human authority, 0 = full AI authority. With
// default weights alpha is non-decreasing in consequence_severity and
// value_alignment, non-increasing in expertise_match and time_constraints.
double authority(const AuthorityContext& ctx, const AuthorityWeights& weights);

}  // namespace synlang
