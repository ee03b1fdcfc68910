#include "chronogate/policy.hpp"

namespace chronogate::policy {

const char* to_string(Action a) {
    switch (a) {
        case Action::Allow: return "allow";
        case Action::Block: return "block";
        case Action::AlertOnly: return "alert_only";
    }
    return "?";
}

const char* to_string(Reason r) {
    switch (r) {
        case Reason::Allowlisted: return "allowlisted";
        case Reason::YoungDomain: return "young_domain";
        case Reason::UnknownAge: return "unknown_age";
        case Reason::OldDomain: return "old_domain";
    }
    return "?";
}

std::optional<Action> action_from_string(const std::string& s) {
    if (s == "allow") return Action::Allow;
    if (s == "block") return Action::Block;
    if (s == "alert_only" || s == "alert-only" || s == "alert") return Action::AlertOnly;
    return std::nullopt;
}

bool allowlisted(const std::string& domain, const std::set<std::string>& allowlist) {
    if (allowlist.count(domain)) return true;
    // Parent-domain entries cover subdomains.
    std::size_t pos = 0;
    while ((pos = domain.find('.', pos)) != std::string::npos) {
        if (allowlist.count(domain.substr(pos + 1))) return true;
        ++pos;
    }
    return false;
}

PolicyVerdict evaluate(const std::string& domain, const age::AgeVerdict& verdict,
                       const PolicyConfig& cfg) {
    PolicyVerdict out;
    if (allowlisted(domain, cfg.allowlist)) {
        out.action = Action::Allow;
        out.reason = Reason::Allowlisted;
        if (verdict.known) {
            out.age_seconds = verdict.age_seconds;
            out.source = verdict.source;
        }
        return out;
    }

    bool enforceable = verdict.known;
    if (verdict.known &&
        (verdict.source == age::AgeSource::SoaHeuristic ||
         verdict.source == age::AgeSource::Cache) &&
        !cfg.soa_heuristic_trusted) {
        enforceable = false;
    }
    if (verdict.known) {
        out.age_seconds = verdict.age_seconds;
        out.source = verdict.source;
    }

    if (enforceable) {
        if (verdict.age_seconds < cfg.threshold_seconds) {
            out.action = cfg.young_action;
            out.reason = Reason::YoungDomain;
        } else {
            out.action = Action::Allow;
            out.reason = Reason::OldDomain;
        }
    } else {
        out.action = cfg.unknown_action;
        out.reason = Reason::UnknownAge;
    }
    return out;
}

}  // namespace chronogate::policy
