import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holocurve.errors import DomainError, EvaluationError, FieldSyntaxError, ParameterError
from holocurve.fieldexpr import Field, eval_field, load_field, parse_field, parse_field_file
from holocurve.lincomplex import Box, Interval
from holocurve.verify import bundled_fields


def box(n=1, radius=10.0, center=None, A=1.0):
    return Box(Interval(0.0, A), np.zeros(n) if center is None else center, radius)


def test_parse_examples():
    e = parse_field("z0^2", 1)
    assert e(0.0, np.array([3.0]))[0] == 9
    two = parse_field("t*z1, -z0", 2)
    np.testing.assert_allclose(two(2.0, np.array([1.0, 5.0])), [10, -1])
    with pytest.raises(FieldSyntaxError, match="denominator"):
        parse_field("1/z0", 1)


def test_constant_denominators_allowed():
    e = parse_field("z0/(2+t)", 1)
    assert e(2.0, np.array([8.0]))[0] == 2


@pytest.mark.parametrize(
    "src,n,fragment",
    [
        ("conj(z0)", 1, "conj"),
        ("abs(z0)", 1, "abs"),
        ("log(z0)", 1, "log"),
        ("z2", 2, "z2"),
        ("q", 1, "q"),
        ("z0^-1", 1, ""),
        ("z0^1.5", 1, ""),
        ("z0 +", 1, ""),
        ("(z0", 1, ""),
        ("z0, z0", 1, "coordinates"),
        ("exp(z0)/exp(z0)", 1, "denominator"),
    ],
)
def test_parse_errors(src, n, fragment):
    with pytest.raises(FieldSyntaxError, match=fragment or None):
        parse_field(src, n)


def test_error_position():
    with pytest.raises(FieldSyntaxError) as info:
        parse_field("z0 +\n  conj(z0)", 1)
    assert (info.value.line, info.value.column) == (2, 3)
    assert str(info.value).startswith("2:3: ")


def test_eval_examples():
    sq = Field.from_source("z0^2", box())
    np.testing.assert_allclose(eval_field(sq, 0.3, [1 + 1j]), [2j], atol=1e-15)
    tz = Field.from_source("t*z0", box())
    assert eval_field(tz, 0.0, [2 - 1j])[0] == 0
    ex = Field.from_source("exp(z0)", box())
    assert eval_field(ex, 0.5, [0])[0] == 1


def test_imaginary_literal_and_functions():
    f = Field.from_source("2i*z0 + sin(z0)^2 + cos(z0)^2", box())
    assert eval_field(f, 0.0, [0.7])[0] == pytest.approx(1 + 1.4j, abs=1e-15)


def test_eval_domain_errors():
    f = Field.from_source("z0", box(radius=1.0))
    with pytest.raises(DomainError) as info:
        eval_field(f, 0.0, [1.5])
    assert info.value.distance == pytest.approx(1.5)
    with pytest.raises(DomainError) as info:
        eval_field(f, 1.5, [0.0])
    assert info.value.t == 1.5
    big = Field.from_source("exp(exp(exp(z0)))", box())
    with pytest.raises(EvaluationError):
        eval_field(big, 0.0, [9.0])


def test_batched_evaluation():
    f = Field.from_source("t + z0*z1, z1^3", box(2))
    pts = np.array([[[1, 2], [0, 1j]]])
    t = np.array([[0.5, -0.5]])
    out = f(t, pts)
    assert out.shape == (1, 2, 2)
    np.testing.assert_allclose(out[0, 1], [-0.5, -1j])


def test_field_arithmetic():
    b = box(1)
    f, g = Field.from_source("z0^2", b), Field.from_source("t", b)
    np.testing.assert_allclose((f + 2 * g - g)(0.5, [3.0]), [9.5])
    np.testing.assert_allclose((-f)(0.0, [1j]), [1])
    with pytest.raises(ParameterError):
        f + Field.from_source("t", box(1, radius=3.0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 12), st.complex_numbers(max_magnitude=1.5, allow_nan=False))
def test_integer_power_matches_numpy(k, z):
    f = Field.from_source(f"z0^{k}", box(radius=2.0))
    assert f(0.0, [z])[0] == pytest.approx(z**k, rel=1e-13, abs=1e-15)


def test_source_roundtrip():
    src = "-(t*z0 + 0.5i)^3 - exp(z1)/2, cos(z0)*z1"
    f = Field.from_source(src, box(2))
    g = Field.from_source(f.source(), box(2))
    z = np.array([0.3 - 0.1j, 0.2j])
    np.testing.assert_allclose(f(0.4, z), g(0.4, z), rtol=1e-15)


def test_field_file(tmp_path):
    text = "# rotation\nz1,\n  -z0\ndomain { t0=1, A=0.25, center=[1+2i, 0], radius=3, p=1 }\n"
    path = tmp_path / "rot.field"
    path.write_text(text)
    f = load_field(path)
    assert f.domain == Box(Interval(1.0, 0.25), [1 + 2j, 0], 3.0, 1.0)
    np.testing.assert_allclose(f(1.0, [1 + 2j, 0.5]), [0.5, -1 - 2j])


def test_field_file_errors():
    with pytest.raises(FieldSyntaxError, match="domain"):
        parse_field_file("z0")
    with pytest.raises(FieldSyntaxError, match="lacks"):
        parse_field_file("z0\ndomain { t0=0, A=1 }")
    with pytest.raises(FieldSyntaxError) as info:
        parse_field_file("domain { t0=0, A=1, center=[0], radius=1 }\n z0 + conj(z0)")
    assert info.value.line == 2


def test_bundled_fields_load():
    fields = bundled_fields()
    assert set(fields) >= {"linear", "riccati", "rotation", "forced", "coupled", "spinning"}
    for f in fields.values():
        assert f(f.domain.interval.t0, f.domain.center).shape == (f.dim,)
