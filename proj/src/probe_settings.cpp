#include "unlearn_audit/probe_settings.hpp"

#include <algorithm>

#include "unlearn_audit/errors.hpp"

namespace unlearn_audit {

void ProbeSettings::validate() const {
    if (std::find(variants.begin(), variants.end(), VariantKind::Baseline) == variants.end()) {
        throw InvalidInput("variants must include baseline");
    }
    for (std::size_t i = 0; i < variants.size(); ++i) {
        if (std::count(variants.begin(), variants.end(), variants[i]) > 1) {
            throw InvalidInput("variant " + std::string(to_string(variants[i])) + " listed twice");
        }
    }
    if (samples == 0) {
        throw InvalidInput("samples per cell must be at least 1");
    }
    if (steps == 0) {
        throw InvalidInput("steps must be at least 1");
    }
}

}  // namespace unlearn_audit
