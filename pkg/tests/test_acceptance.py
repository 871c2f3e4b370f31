"""Acceptance criteria 1-10, each at its pinned tolerance.

Every test prints one PASS/FAIL line, and the lines are repeated in the
terminal summary. Criterion 2 is split into its two identities (2a, 2b).
"""
import numpy as np
import pytest

from locc_resource import verify
from locc_resource.resources import reachable, Slocc3

SEED = 7


def _report(log, res):
    line = f"criterion {res.key:>3} {'PASS' if res.passed else 'FAIL'}  {res.anchor}  " + " ".join(
        f"{k}={v:.3e}" if isinstance(v, float) else f"{k}={v}" for k, v in res.metrics.items()
    )
    print(line)
    log.append(line)
    return res


def test_c1_dual_basis_decompositions(acceptance_log):
    res = _report(acceptance_log, verify.check_lemma1(SEED))
    assert res.metrics["bases"] == 150
    assert res.passed


def test_c2a_w_map_exact(acceptance_log):
    res = _report(acceptance_log, verify.check_example3_w())
    assert res.metrics["l2_error"] < 1e-12


def test_c2b_ghz_map_with_shared_party_a_matrix(acceptance_log):
    # ([[0,1,1],[1,0,0]] (x) sigma_x (x) I)|Phi_ex3> is W-class, so this stays red
    res = _report(acceptance_log, verify.check_example3_ghz())
    assert res.metrics["l2_error"] < 1e-12


def test_c2_supplement_ghz_map_with_corrected_matrix(acceptance_log):
    res = _report(acceptance_log, verify.check_example3_ghz_corrected())
    assert res.metrics["l2_error"] < 1e-12


def test_c3_entropy_obstruction(acceptance_log):
    res = _report(acceptance_log, verify.check_entropy())
    assert res.metrics["entropy_ex3_ab_c"] == pytest.approx(0.9182958, abs=1e-6)
    assert res.metrics["entropy_ghz_ab_c"] == pytest.approx(1.0, abs=1e-12)


def test_c4_round_trip(acceptance_log):
    res = _report(acceptance_log, verify.check_round_trip(SEED))
    assert res.metrics["offdiag_max"] < 1e-10
    assert res.metrics["min_eps"] > 1e-12
    assert res.metrics["min_fidelity"] > 1 - 1e-9
    assert res.metrics["max_prob_gap"] < 1e-10


def test_c5_projective_probability(acceptance_log):
    res = _report(acceptance_log, verify.check_projective(SEED))
    assert res.metrics["max_prob_gap"] < 1e-12


def test_c6_bell_resource_discriminates(acceptance_log):
    res = _report(acceptance_log, verify.check_bell(SEED))
    assert res.metrics["bases"] == 20
    assert res.metrics["worst_deviation"] < 1e-9


def test_c7_no_universal_three_qubit_resource(acceptance_log):
    res = _report(acceptance_log, verify.check_no_universal(SEED))
    assert res.metrics["states"] == 100
    assert res.metrics["failures"] == 0


def test_c8_schmidt_measure(acceptance_log):
    res = _report(acceptance_log, verify.check_schmidt(SEED))
    m = res.metrics
    assert (m["rank_ghz"], m["rank_w"], m["rank_ex3"]) == (2, 3, 3)
    assert m["w_border_flag"]
    assert m["rank_ghz"] >= m["lower_ghz"] and m["rank_w"] >= m["lower_w"] and m["rank_ex3"] >= m["lower_ex3"]
    assert m["w_bound"] == 3


def test_c9_ghz_rank_construction(acceptance_log):
    res = _report(acceptance_log, verify.check_ghz_construction(SEED))
    assert res.metrics["states"] == 25
    assert res.metrics["worst_residual"] < 1e-9


def test_c10_negative_control(acceptance_log):
    res = _report(acceptance_log, verify.check_negative_control(SEED))
    m = res.metrics
    assert not m["ghz_to_w_found"] and not m["w_to_ghz_found"]
    assert m["ghz_to_w_escape"]
    assert not reachable(Slocc3.GHZ, Slocc3.W) and not reachable(Slocc3.W, Slocc3.GHZ)
    assert res.passed
