from fractions import Fraction as F

import pytest
from hypothesis import given

from asysig import (BadParameter, BinarySignal, BoundedDelayWindow, DslSyntaxError, IdealCombinational,
                    NoOpSwitch, NonIncreasingTimes, PureDelay, Tabulated, UnknownKind, WidthMismatch, chi,
                    constant, eval_deterministic, stack)
from asysig.dsl import (format_corpus, format_signal, format_system, load_system, parse_corpus, parse_grid,
                        parse_signal, parse_system, parse_systems)

from conftest import signals


def test_signal_examples():
    assert parse_signal("1 | 0 | 0:1 ; 2:0") == chi(0, 2)
    x = parse_signal("2 | 00 | 1/2:10 ; 3/2:11")
    assert x == BinarySignal(2, 0, [(F(1, 2), 2), (F(3, 2), 3)])
    assert parse_signal("1 | 1 |") == constant(1)
    assert parse_signal("  1|0|-3/4:1  ") == chi(F(-3, 4))


@pytest.mark.parametrize("text,err,col", [
    ("1 | 0 | 2:0", NoOpSwitch, 9),
    ("1 | 0 | 2:1 ; 1:0", NonIncreasingTimes, 15),
    ("1 | 00 | 2:1", WidthMismatch, 5),
    ("1 | 0 | 2:x", DslSyntaxError, 11),
    ("1 | 0 | 1/0:1", DslSyntaxError, 9),
    ("1 | 0", DslSyntaxError, None),
])
def test_signal_errors_carry_locations(text, err, col):
    with pytest.raises(err) as e:
        parse_signal(text, line=7)
    assert e.value.line == 7
    if col is not None:
        assert e.value.col == col


@given(signals())
def test_signal_round_trip(x):
    text = format_signal(x)
    assert parse_signal(text) == x
    assert format_signal(parse_signal(text)) == text


def test_corpus_skips_comments_and_reports_lines():
    text = "# inputs\n1 | 0 | 0:1\n\n1 | 1 |\n"
    assert parse_corpus(text) == [chi(0), constant(1)]
    assert format_corpus([chi(0), constant(1)]) == "1 | 0 | 0:1\n1 | 1 |\n"
    with pytest.raises(NoOpSwitch) as e:
        parse_corpus("1 | 0 |\n\n1 | 0 | 1:0\n")
    assert e.value.line == 3


def test_grid_parsing():
    assert list(parse_grid("0, 1/2 ,1")) == [0, F(1, 2), 1]
    with pytest.raises((DslSyntaxError, NonIncreasingTimes)):
        parse_grid("1,0")


def test_system_examples():
    p = parse_system("system p { kind = pure_delay; d = 1; }")
    assert isinstance(p, PureDelay) and p.d == 1 and p.name == "p"
    b = parse_system("system b { kind = bounded_delay; dr = 1; df = 2; }")
    assert isinstance(b, BoundedDelayWindow) and (b.dr, b.df) == (1, 2)
    c = parse_system("system c { kind = combinational; d = 0; inputs = 2; table = [00->0, 01->1, 10->1, 11->0]; }")
    assert isinstance(c, IdealCombinational)
    assert eval_deterministic(c, stack(chi(0), chi(1))) == chi(0, 1)
    t = parse_system('system t { kind = tabulated; map = [ "1 | 0 |" -> { "1 | 0 |", "1 | 1 |" } ]; }')
    assert isinstance(t, Tabulated) and t.table[constant(0)] == {constant(0), constant(1)}


@pytest.mark.parametrize("text,err", [
    ("system x { kind = pure_delay; d = 0; }", BadParameter),
    ("system x { kind = warp; }", UnknownKind),
    ("system x { kind = pure_delay; d = 1; q = 2; }", BadParameter),
    ("system x { kind = pure_delay d = 1; }", DslSyntaxError),
    ("system x { KIND = pure_delay; d = 1; }", DslSyntaxError),
    ("system x { kind = pure_delay; d = 1; d = 2; }", DslSyntaxError),
    ("system x { kind = bounded_delay; dr = 1; }", BadParameter),
    ("system x { kind = pure_delay; d = 0.5; }", DslSyntaxError),
])
def test_system_errors(text, err):
    with pytest.raises(err) as e:
        parse_system(text)
    assert e.value.line == 1 and e.value.col is not None


def test_multi_system_file_and_reference(tmp_path):
    text = ("# two systems\n"
            "system p { kind = pure_delay; d = 1/2; }\n"
            "system g {\n  kind = bounded_delay;\n  dr = 1; df = 2;\n}\n")
    systems = parse_systems(text)
    assert list(systems) == ["p", "g"]
    assert systems["p"].d == F(1, 2)
    path = tmp_path / "s.dsl"
    path.write_text(text)
    assert isinstance(load_system(f"{path}#g"), BoundedDelayWindow)
    with pytest.raises(BadParameter):
        load_system(f"{path}#missing")


def test_error_line_in_multi_system_file():
    with pytest.raises(BadParameter) as e:
        parse_systems("system a { kind = pure_delay; d = 1; }\n\nsystem b { kind = pure_delay; d = -1; }\n")
    assert e.value.line == 3


def test_format_system_round_trip():
    from asysig.catalog import build_systems
    for f in build_systems().values():
        text = format_system(f)
        g = parse_system(text)
        assert format_system(g) == text
        assert (g.kind, g.params()) == (f.kind, f.params())
