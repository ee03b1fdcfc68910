"""Delayed-DNS policy engine and DGA rendezvous simulator bindings."""

from ._chronogate import (  # noqa: F401
    brute_force_success_probability,
    classify_stream,
    closed_form_success_rate,
    evaluate_policy,
    generate_domains,
    parse_rfc1912_serial,
    registrable_domain,
    run_trials,
    shannon_entropy,
)

__all__ = [
    "brute_force_success_probability",
    "classify_stream",
    "closed_form_success_rate",
    "evaluate_policy",
    "generate_domains",
    "parse_rfc1912_serial",
    "registrable_domain",
    "run_trials",
    "shannon_entropy",
]
