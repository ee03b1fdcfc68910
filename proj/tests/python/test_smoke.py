import math
import os
import sys

module_dir = os.environ.get("CHRONOGATE_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

import _chronogate as cg  # noqa: E402


def test_entropy_extremes():
    assert cg.shannon_entropy(b"") == 0.0
    assert cg.shannon_entropy(b"\x00" * 4096) == 0.0
    assert abs(cg.shannon_entropy(bytes(range(256))) - 8.0) < 1e-12
    assert abs(cg.shannon_entropy(b"abababab") - 1.0) < 1e-12


def test_classify_stream():
    report = cg.classify_stream(os.urandom(64 * 1024))
    assert len(report["windows"]) == 16
    assert all(w["flagged"] for w in report["windows"])
    text = (b"plain old english text, nothing to see here. " * 2000)[: 64 * 1024]
    assert not cg.classify_stream(text)["overall"]["flagged"]


def test_serial_parsing():
    assert cg.parse_rfc1912_serial(2017082401) == ("2017-08-24", 1)
    assert cg.parse_rfc1912_serial(2017130101) is None
    assert cg.parse_rfc1912_serial(1) is None


def test_registrable_domain():
    assert cg.registrable_domain("a.b.evil-example.test") == "evil-example.test"
    assert cg.registrable_domain("www.example.co.uk") == "example.co.uk"


def test_policy():
    assert cg.evaluate_policy(3.0) == ("block", "young_domain")
    assert cg.evaluate_policy(25.0) == ("allow", "old_domain")
    assert cg.evaluate_policy(None) == ("allow", "unknown_age")
    assert cg.evaluate_policy(24.0) == ("allow", "old_domain")  # boundary
    assert cg.evaluate_policy(1.0, source="soa_heuristic") == ("allow", "unknown_age")


def test_toy_date_generator():
    names = cg.generate_domains("toy_date", 3, "2012-05-06")
    assert names == [
        "fivesixtwentytwelve1.test",
        "fivesixtwentytwelve2.test",
        "fivesixtwentytwelve3.test",
    ]


def test_seeded_hash_determinism():
    a = cg.generate_domains("seeded_hash", 250, "2017-08-24", seed=7)
    b = cg.generate_domains("seeded_hash", 250, "2017-08-24", seed=7)
    assert a == b
    assert len(set(a)) == 250


def test_simulation_and_oracles():
    dead = cg.run_trials(domains_per_day=100, registered=5, queries=100,
                         lead_hours=3.0, defense=True, trials=200)
    assert dead["success_rate"] == 0.0

    alive = cg.run_trials(domains_per_day=10, registered=10, queries=10,
                          defense=False, trials=50)
    assert alive["success_rate"] == 1.0

    num, den = cg.brute_force_success_probability(10, 1, 5)
    assert (num, den) == (1, 2)
    closed = cg.closed_form_success_rate(10, 1, 5)
    assert math.isclose(num / den, closed, rel_tol=1e-12)
