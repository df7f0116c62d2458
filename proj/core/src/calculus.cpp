#include "synlang/calculus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "synlang/kv_config.hpp"

namespace synlang {

namespace {

double checked_range(double value, double lo, double hi, const char* what) {
    if (!std::isfinite(value) || value < lo || value > hi) {
        throw std::invalid_argument(std::string(what) + " must be in [" +
                                    std::to_string(lo) + ", " + std::to_string(hi) + "], got " +
                                    std::to_string(value));
    }
    return value;
}

double parse_double(const KvEntry& entry) {
    double value = 0.0;
    const char* begin = entry.value.data();
    const char* end = begin + entry.value.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("line " + std::to_string(entry.line) +
                                    ": expected a number, got '" + entry.value + "'");
    }
    return value;
}

}  // namespace

Confidence::Confidence(double value)
    : value_(checked_range(value, 0.0, 1.0, "confidence")) {}

TrustFactor::TrustFactor(double value)
    : value_(checked_range(value, 0.5, 1.0, "trust_factor")) {}

CoherenceFactor::CoherenceFactor(double value) : value_(value) {
    if (!std::isfinite(value) || value <= 0.0 || value > 1.0) {
        throw std::invalid_argument("coherence_factor must be in (0, 1], got " +
                                    std::to_string(value));
    }
}

PropagationPolicy PropagationPolicy::multiplicative(double transmission_factor) {
    checked_range(transmission_factor, 0.9, 1.0, "transmission_factor");
    return PropagationPolicy(Mode::Multiplicative, transmission_factor, 0.0);
}

PropagationPolicy PropagationPolicy::fixed_decrement(double decrement) {
    checked_range(decrement, 0.0, 0.1, "decrement");
    return PropagationPolicy(Mode::FixedDecrement, 1.0, decrement);
}

Confidence propagate(Confidence c, const PropagationPolicy& policy, TrustFactor trust) {
    switch (policy.mode()) {
        case PropagationPolicy::Mode::Multiplicative:
            return Confidence(c.value() * policy.transmission_factor() * trust.value());
        case PropagationPolicy::Mode::FixedDecrement:
            return Confidence(std::max(0.0, c.value() - policy.decrement()));
    }
    return c;
}

Confidence compose_chain(std::span<const Confidence> steps, CoherenceFactor coherence) {
    if (steps.empty()) {
        throw std::invalid_argument("compose_chain requires a nonempty chain");
    }
    double product = 1.0;
    for (const Confidence& c : steps) {
        product *= c.value();
    }
    return Confidence(product * coherence.value());
}

Humility check_humility(Confidence original, Confidence derived) {
    return derived.value() <= original.value() + 1e-12 ? Humility::Holds : Humility::Violated;
}

AuthorityContext::AuthorityContext(double expertise_match_, double consequence_severity_,
                                   double value_alignment_, double time_constraints_)
    : expertise_match(checked_range(expertise_match_, 0.0, 1.0, "expertise_match")),
      consequence_severity(
          checked_range(consequence_severity_, 0.0, 1.0, "consequence_severity")),
      value_alignment(checked_range(value_alignment_, 0.0, 1.0, "value_alignment")),
      time_constraints(checked_range(time_constraints_, 0.0, 1.0, "time_constraints")) {}

AuthorityWeights AuthorityWeights::from_config(std::string_view text) {
    AuthorityWeights w = defaults();
    for (const KvEntry& entry : parse_kv(text)) {
        const double value = parse_double(entry);
        if (!std::isfinite(value)) {
            throw std::invalid_argument("weight '" + entry.key + "' must be finite");
        }
        if (entry.key == "expertise_match") {
            w.expertise_match = value;
        } else if (entry.key == "consequence_severity") {
            w.consequence_severity = value;
        } else if (entry.key == "value_alignment") {
            w.value_alignment = value;
        } else if (entry.key == "time_constraints") {
            w.time_constraints = value;
        } else if (entry.key == "bias") {
            w.bias = value;
        } else {
            throw std::invalid_argument("unknown weight key '" + entry.key + "'");
        }
    }
    return w;
}

AuthorityContext authority_context_from_config(std::string_view text) {
    std::optional<double> e, c, v, t;
    for (const KvEntry& entry : parse_kv(text)) {
        const double value = parse_double(entry);
        if (entry.key == "expertise_match") {
            e = value;
        } else if (entry.key == "consequence_severity") {
            c = value;
        } else if (entry.key == "value_alignment") {
            v = value;
        } else if (entry.key == "time_constraints") {
            t = value;
        } else {
            throw std::invalid_argument("unknown profile key '" + entry.key + "'");
        }
    }
    if (!e || !c || !v || !t) {
        throw std::invalid_argument(
            "profile must set expertise_match, consequence_severity, value_alignment, "
            "and time_constraints");
    }
    return AuthorityContext(*e, *c, *v, *t);
}

double authority(const AuthorityContext& ctx, const AuthorityWeights& weights) {
    const double raw = weights.bias + weights.expertise_match * ctx.expertise_match +
                       weights.consequence_severity * ctx.consequence_severity +
                       weights.value_alignment * ctx.value_alignment +
                       weights.time_constraints * ctx.time_constraints;
    return std::clamp(raw, 0.0, 1.0);
}

}  // namespace synlang
