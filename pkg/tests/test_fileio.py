import numpy as np
import pytest

from emtool import examples
from emtool.errors import MachineFormatError
from emtool.fileio import load_machine, parse_machine, save_machine, serialize_machine

EVEN_TEXT = """\
# even machine, p = 1/2
states 2
alphabet 0 1
edge 0 0 1/2 0
edge 0 1 0.5 1
edge 1 1 1 0
"""


def test_parse_basic():
    machine, warnings = parse_machine(EVEN_TEXT)
    assert warnings == []
    assert machine.n_states == 2
    assert machine.alphabet.symbols == ("0", "1")
    assert np.array_equal(machine.matrices, examples.even(0.5).matrices)


def test_round_trip_bitwise():
    for builder in (examples.even(0.3), examples.abc(0.4, 0.6), examples.np2(0.7)):
        text = serialize_machine(builder)
        reparsed, _ = parse_machine(text)
        assert np.array_equal(reparsed.matrices, builder.matrices)
        assert serialize_machine(reparsed) == text


def test_round_trip_awkward_probability():
    # 17 significant digits must reproduce an unrepresentable decimal exactly
    p = 1 / 3
    m = examples.even(p)
    reparsed, _ = parse_machine(serialize_machine(m))
    assert np.array_equal(reparsed.matrices, m.matrices)


def test_fraction_parsing_is_exact():
    text = "states 1\nalphabet a b\nedge 0 a 1/3 0\nedge 0 b 2/3 0\n"
    machine, _ = parse_machine(text)
    assert machine.matrices[0, 0, 0] == 1 / 3
    assert machine.matrices[1, 0, 0] == 2 / 3


def test_zero_probability_edge_dropped_with_warning():
    text = EVEN_TEXT + "edge 1 0 0 0\n"
    machine, warnings = parse_machine(text)
    assert len(warnings) == 1
    assert "zero-probability" in warnings[0]
    assert machine.matrices[0, 1, 0] == 0.0


def test_start_line_round_trip():
    text = "states 2\nalphabet a\nstart 1\nedge 0 a 1 1\nedge 1 a 1 0\n"
    machine, warnings, start = parse_machine(text)
    assert start == 1
    assert serialize_machine(machine, start=1) == text


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("states 2\nalphabet 0\nedge 0 0 0.5 5\n", "out of range"),
        ("states 2\nalphabet 0\nedge 0 1 0.5 1\n", "unknown symbol"),
        ("states 2\nalphabet 0\nedge 0 0 1 1\nedge 0 0 0.5 1\n", "duplicate edge"),
        ("states 2\nalphabet 0\nedge 0 0 huh 1\n", "bad probability"),
        ("states 2\nalphabet 0\nedge 0 0 -0.5 1\n", "negative probability"),
        ("alphabet 0\nedge 0 0 1 0\n", "before 'states'"),
        ("states 2\nalphabet 0\nfrobnicate\n", "unknown directive"),
        ("states 0\nalphabet 0\n", "N >= 1"),
        ("# nothing\n", "missing"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(MachineFormatError, match=fragment):
        parse_machine(text)


def test_file_round_trip(tmp_path):
    m = examples.abc(0.4, 0.6)
    path = tmp_path / "abc.m"
    save_machine(str(path), m)
    loaded = load_machine(str(path))
    assert np.array_equal(loaded.matrices, m.matrices)
