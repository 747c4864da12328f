import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mcqdisent.dynamics import dephased_rho
from mcqdisent.errors import DomainError
from mcqdisent.measures import (
    BM,
    BPRV,
    CHSH,
    MeasurementSettings,
    closed_form_values,
    coherence_ratio,
    s_bm_closed,
    s_bm_generic,
    s_bprv_closed,
    s_chsh_closed,
    s_chsh_fixed,
    violation_boundary,
)

cs = st.floats(-1.0, 1.0, allow_nan=False)


def test_closed_form_endpoints():
    assert s_bm_closed(1.0).value == 0.75
    assert s_bm_closed(0.0).value == 1.125
    assert s_chsh_closed(1.0).value == pytest.approx(2 * math.sqrt(2), abs=1e-15)
    assert s_chsh_closed(0.0).value == pytest.approx(math.sqrt(2), abs=1e-15)
    assert s_bprv_closed(1.0).value == 7.5
    assert s_bprv_closed(0.0).value == 6.0


def test_generic_endpoints():
    assert s_bm_generic(dephased_rho(1.0)).value == pytest.approx(0.75, abs=1e-15)
    assert s_bm_generic(dephased_rho(0.0)).value == pytest.approx(1.125, abs=1e-15)
    assert s_bm_generic(dephased_rho(0.5)).value == pytest.approx(0.9375, abs=1e-15)
    assert s_chsh_fixed(dephased_rho(1.0)).value == pytest.approx(2.828427, abs=1e-6)
    assert s_chsh_fixed(dephased_rho(0.0)).value == pytest.approx(1.414214, abs=1e-6)
    assert s_chsh_closed(-1.0).value == 0.0


@given(cs)
def test_generic_equals_closed(c):
    rho = dephased_rho(c)
    assert s_bm_generic(rho).value == pytest.approx(s_bm_closed(c).value, abs=1e-12)
    assert s_chsh_fixed(rho).value == pytest.approx(s_chsh_closed(c).value, abs=1e-12)
    assert s_chsh_fixed(rho).value == pytest.approx(math.sqrt(2) * abs(1 + c), abs=1e-12)


@given(cs)
def test_ranges(c):
    assert 0.75 <= s_bm_closed(c).value <= 1.5
    assert 0.0 <= s_chsh_closed(c).value <= 2 * math.sqrt(2) + 1e-15
    assert 4.5 <= s_bprv_closed(c).value <= 7.5


def test_ordered_pairs_double():
    ordered = MeasurementSettings(bm_ordered_pairs=True)
    for c in (1.0, 0.3, 0.0):
        rho = dephased_rho(c)
        assert s_bm_generic(rho, ordered).value == pytest.approx(2 * s_bm_generic(rho).value, abs=1e-14)


def test_violation_flags():
    assert s_bm_closed(1.0).violated and not s_bm_closed(0.0).violated
    assert s_chsh_closed(1.0).violated and not s_chsh_closed(0.0).violated
    assert s_bprv_closed(1.0).violated and not s_bprv_closed(0.0).violated


@pytest.mark.parametrize("measure,bound", [(BM, 1.0), (CHSH, 2.0), (BPRV, 7.0)])
def test_violation_boundaries(measure, bound):
    c = violation_boundary(measure)
    assert closed_form_values(measure, c) == pytest.approx(bound, abs=1e-15)


def test_vectorized_closed_forms():
    c = np.linspace(-1, 1, 11)
    assert np.allclose(closed_form_values(BM, c), [s_bm_closed(x).value for x in c])
    assert np.allclose(closed_form_values(CHSH, c), [s_chsh_closed(x).value for x in c])


def test_coherence_ratio():
    r0 = dephased_rho(1.0)
    assert coherence_ratio(r0, r0) == 1.0
    assert coherence_ratio(dephased_rho(-0.4), r0) == pytest.approx(0.4)
    with pytest.raises(DomainError):
        coherence_ratio(r0, dephased_rho(0.0))
    assert coherence_ratio(dephased_rho(math.exp(-0.5)), r0) == pytest.approx(math.exp(-0.5))


def test_settings_validation():
    with pytest.raises(ValueError):
        MeasurementSettings(chsh_directions=(np.ones(3),) * 4)
