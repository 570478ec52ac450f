import numpy as np
import pytest

from chaoslab import (
    BlockLaw,
    ExplicitLaw,
    InvalidInputError,
    PeriodicLaw,
    Word,
    decay_check,
    doubling_law,
    run_evidence,
)
from chaoslab.runs import CONSISTENT, DECAYING, INCONSISTENT, NOT_DECAYING


def test_eventually_constant_law_is_consistent():
    law = ExplicitLaw(Word((1, 2, 1), 2), fallback=1)
    ev = run_evidence(law, horizon=2000, max_run=20)
    assert ev.verdict == CONSISTENT
    assert ev.symbol == 1
    # latest run of length l in the tail starts at 2000 - l + 1
    assert ev.thresholds[0] == (1, 1999)
    assert ev.thresholds[19] == (20, 1980)


def test_doubling_law_is_consistent():
    ev = run_evidence(doubling_law(), horizon=126, max_run=20)
    assert ev.verdict == CONSISTENT
    assert ev.symbol == 2  # block six, symbol 2, covers the whole tail half


def test_alternating_law_is_inconsistent():
    law = PeriodicLaw(Word((1, 2), 2))
    ev = run_evidence(law, horizon=2000, max_run=2)
    assert ev.verdict == INCONSISTENT
    assert ev.symbol is None
    assert ev.thresholds == ()
    # only length-1 runs exist; the latest are at the very end
    assert ev.per_symbol[2][1] == 1999
    assert ev.per_symbol[1][1] == 1998


def test_thresholds_satisfy_their_definition():
    """Each recorded (l, n_l) is a constant run in the tail half."""
    law = BlockLaw([(1, 10), (2, 700), (1, 100)], alphabet_size=2)
    horizon, max_run = 1500, 15
    ev = run_evidence(law, horizon=horizon, max_run=max_run)
    seq = law.sequence(horizon)
    for sym, table in ev.per_symbol.items():
        for length, n_l in table.items():
            assert n_l + 1 > horizon // 2
            assert n_l + length <= horizon
            window = seq[n_l : n_l + length]
            assert window == [sym] * length
            # latest: no longer-starting run of the same length fits
            later = seq[n_l + 1 : n_l + 1 + length]
            assert later != [sym] * length or n_l + 1 + length > horizon


def test_run_evidence_only_counts_tail_runs():
    # a long run that ends before the midpoint must not count as evidence
    law = BlockLaw([(1, 700)] + [(2, 1), (1, 1)] * 600, alphabet_size=2)
    ev = run_evidence(law, horizon=1600, max_run=5)
    assert ev.verdict == INCONSISTENT
    # the same law over a shorter horizon puts the run in the tail half
    ev_short = run_evidence(law, horizon=900, max_run=5)
    assert ev_short.verdict == CONSISTENT


def test_run_evidence_validation():
    law = PeriodicLaw(Word((1,), 2))
    with pytest.raises(InvalidInputError):
        run_evidence(law, horizon=1, max_run=1)
    with pytest.raises(InvalidInputError):
        run_evidence(law, horizon=100, max_run=0)


# ---------------------------------------------------------------------------
# decay measurement


def test_decay_on_stable_shear(shear06):
    law = ExplicitLaw(Word((2, 1), 2), fallback=1)
    report = decay_check(shear06, law, horizon=2000)
    assert report.verdict == DECAYING
    assert report.warning is None
    assert report.tail_max < report.head_min


def test_no_decay_on_expanding_law(diag_pair):
    report = decay_check(diag_pair, PeriodicLaw(Word((2,), 2)), horizon=100)
    assert report.verdict == NOT_DECAYING
    assert report.warning is not None  # the system is not periodically stable


def test_normalized_pair_neither_decays_nor_stays_silent(shear06_normalized):
    # products along the alternating law have norm pinned near 1
    report = decay_check(shear06_normalized, PeriodicLaw(Word((1, 2), 2)), horizon=400)
    assert report.verdict == NOT_DECAYING
    assert report.warning is not None  # radius exactly 1 trips the quick scan


def test_decay_validation(shear06):
    with pytest.raises(InvalidInputError):
        decay_check(shear06, PeriodicLaw(Word((1,), 3)), horizon=100)
    with pytest.raises(InvalidInputError):
        decay_check(shear06, PeriodicLaw(Word((1,), 2)), horizon=3)


def test_decay_log_norm_trace_shape(shear06):
    report = decay_check(shear06, PeriodicLaw(Word((1, 2), 2)), horizon=64)
    assert report.log_norms.shape == (64,)
    # the stable pair's alternating product decays like 0.9708^n
    assert report.log_norms[-1] < report.log_norms[0]
