import pytest
from hypothesis import given
from hypothesis import strategies as st

from nangle.ring import (
    NotAUnitError,
    RingElement,
    RingError,
    RingSpec,
    divide_by_p,
    in_maximal_ideal,
    invert,
    is_unit,
    lift,
    residue,
    uniformizer,
    validate_parity,
)

from conftest import F2E, Z4, Z9

SPECS = [Z4, Z9, F2E, RingSpec.parse("z25"), RingSpec.parse("f3eps")]


def test_parse_round_trip():
    for spec in SPECS:
        assert RingSpec.parse(spec.short_name) == spec
        assert RingSpec.from_json(spec.to_json()) == spec


@pytest.mark.parametrize("name", ["z8", "z6", "f4eps", "q9", "z121"])
def test_parse_rejects(name):
    with pytest.raises(RingError):
        RingSpec.parse(name)


def test_invert_two_mod_nine():
    assert invert(RingElement.of(Z9, 2)).value == 5


def test_uniformizer_squares_to_zero():
    for spec in SPECS:
        p = uniformizer(spec)
        assert (p * p).value == spec.value(0)
        assert in_maximal_ideal(p) and not is_unit(p)


def test_non_unit_has_no_inverse():
    with pytest.raises(NotAUnitError):
        invert(RingElement.of(Z4, 2))


def test_dual_number_arithmetic():
    e = RingElement.of(F2E, (0, 1))
    one_plus_e = RingElement.of(F2E, (1, 1))
    assert (e * e).value == (0, 0)
    assert (one_plus_e * one_plus_e).value == (1, 0)
    assert invert(one_plus_e).value == (1, 1)


def test_residue_lift_and_divide():
    x = RingElement.of(Z9, 7)
    assert residue(x).value == 1
    assert lift(residue(x), Z9).value == 1
    assert divide_by_p(RingElement.of(Z9, 6)).value == 2
    with pytest.raises(ValueError):
        divide_by_p(RingElement.of(Z9, 4))


def test_validate_parity():
    assert validate_parity(4, Z9)
    assert validate_parity(5, Z4)
    assert not validate_parity(5, Z9)
    assert validate_parity(3, F2E)
    with pytest.raises(ValueError):
        validate_parity(2, Z4)


@given(st.sampled_from(SPECS), st.data())
def test_field_axioms_hold_elementwise(spec, data):
    x, y, z = (RingElement(spec, data.draw(st.integers(0, spec.order - 1))) for _ in range(3))
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x + (-x) == RingElement(spec, 0)
    assert is_unit(x) != in_maximal_ideal(x)
    if is_unit(x):
        assert x * invert(x) == RingElement.of(spec, 1)
