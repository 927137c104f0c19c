#include "smscore/loss.hpp"

#include <cmath>

namespace smscore {

double default_scale(LossKind kind) {
    switch (kind) {
        case LossKind::Logistic: return 1.0;
        case LossKind::PseudoHuber: return 2.0;
        case LossKind::Probit: return 0.5;
    }
    return 1.0;
}

LossKind parse_loss_kind(std::string_view name) {
    if (name == "logistic") return LossKind::Logistic;
    if (name == "huber") return LossKind::PseudoHuber;
    if (name == "probit") return LossKind::Probit;
    throw ConfigError("loss", "unknown loss '" + std::string(name) +
                                  "'; supported: logistic, huber, probit");
}

std::string_view loss_name(LossKind kind) {
    switch (kind) {
        case LossKind::Logistic: return "logistic";
        case LossKind::PseudoHuber: return "huber";
        case LossKind::Probit: return "probit";
    }
    return "?";
}

void validate(const LossSpec& spec) {
    if (!(spec.a > 0.0) || !std::isfinite(spec.a))
        throw ConfigError("loss", "scale parameter a must be positive and finite, got " +
                                      std::to_string(spec.a));
}

}  // namespace smscore
