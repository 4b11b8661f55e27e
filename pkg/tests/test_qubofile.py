"""Coordinate-list QUBO files: export format and exact round-trip."""

import pytest

from qdock import (
    Hyperparameters,
    QuboFormatError,
    QuboProblem,
    build_full,
    export_qubo,
    import_qubo,
    load_complex,
)

from conftest import PLANTED6, TINY4


def toy_problem(coeffs, n_vars=2):
    return QuboProblem(
        n_mol=1,
        n_grid=n_vars,
        coeffs=dict(coeffs),
        term_coeffs={"imported": dict(coeffs)},
    )


def test_two_entry_export_format(tmp_path):
    path = tmp_path / "toy.qubo"
    export_qubo(toy_problem({(0, 0): 1.5, (0, 1): -2.0}), path)
    lines = path.read_text().splitlines()
    assert lines == ["p qubo 2 2", "0 0 1.5", "0 1 -2.0"]


def test_empty_problem_exports_header_only(tmp_path):
    path = tmp_path / "empty.qubo"
    export_qubo(toy_problem({}, n_vars=0), path)
    assert path.read_text() == "p qubo 0 0\n"
    back = import_qubo(path)
    assert back.coeffs == {} and back.n_vars == 0


def test_entries_sorted_by_index(tmp_path):
    path = tmp_path / "sorted.qubo"
    coeffs = {(1, 1): 3.0, (0, 0): 1.0, (0, 1): 2.0}
    export_qubo(toy_problem(coeffs), path)
    body = path.read_text().splitlines()[1:]
    assert body == ["0 0 1.0", "0 1 2.0", "1 1 3.0"]


def test_awkward_floats_round_trip_exactly(tmp_path):
    values = {
        (0, 0): 0.1 + 0.2,
        (0, 1): -1.0 / 3.0,
        (1, 1): 1e-17,
        (2, 2): 12345678.987654321,
        (0, 3): -2.0**-52,
    }
    path = tmp_path / "floats.qubo"
    export_qubo(toy_problem(values, n_vars=4), path)
    back = import_qubo(path)
    assert back.coeffs == values  # bit-exact, not approximate


@pytest.mark.parametrize("fixture_path", [TINY4, PLANTED6])
def test_fixture_problem_round_trip(tmp_path, fixture_path):
    cx = load_complex(fixture_path)
    problem = build_full(cx, Hyperparameters(lambdas=(1.0,) * 5, gamma=25.0))
    path = tmp_path / "full.qubo"
    export_qubo(problem, path)
    back = import_qubo(path)
    assert back.n_vars == problem.n_vars
    assert back.coeffs == problem.coeffs
    # A second hop through the format changes nothing.
    again = tmp_path / "again.qubo"
    export_qubo(back, again)
    assert import_qubo(again).coeffs == problem.coeffs


def test_imported_problem_shape(tmp_path):
    path = tmp_path / "toy.qubo"
    export_qubo(toy_problem({(0, 1): -2.0}), path)
    back = import_qubo(path)
    assert back.n_mol == 1 and back.n_grid == 2
    assert back.offset == 0.0
    assert list(back.term_coeffs) == ["imported"]
    assert not back.has_decode_context()


def write(tmp_path, text):
    path = tmp_path / "bad.qubo"
    path.write_text(text)
    return path


def test_missing_file_rejected(tmp_path):
    with pytest.raises(QuboFormatError, match="not found"):
        import_qubo(tmp_path / "absent.qubo")


def test_malformed_headers_rejected(tmp_path):
    with pytest.raises(QuboFormatError, match="empty file"):
        import_qubo(write(tmp_path, ""))
    with pytest.raises(QuboFormatError, match="malformed header"):
        import_qubo(write(tmp_path, "c qubo 2 1\n0 0 1.0\n"))
    with pytest.raises(QuboFormatError, match="malformed header"):
        import_qubo(write(tmp_path, "p qubo 2\n"))
    with pytest.raises(QuboFormatError, match="non-integer counts"):
        import_qubo(write(tmp_path, "p qubo two 1\n0 0 1.0\n"))
    with pytest.raises(QuboFormatError, match="negative counts"):
        import_qubo(write(tmp_path, "p qubo -2 0\n"))


def test_malformed_entries_rejected(tmp_path):
    with pytest.raises(QuboFormatError, match="expected 'i j value'"):
        import_qubo(write(tmp_path, "p qubo 2 1\n0 0 1.0 extra\n"))
    with pytest.raises(QuboFormatError, match="malformed entry"):
        import_qubo(write(tmp_path, "p qubo 2 1\n0 zero 1.0\n"))
    with pytest.raises(QuboFormatError, match="outside upper triangle"):
        import_qubo(write(tmp_path, "p qubo 2 1\n1 0 1.0\n"))
    with pytest.raises(QuboFormatError, match="outside upper triangle"):
        import_qubo(write(tmp_path, "p qubo 2 1\n0 2 1.0\n"))
    with pytest.raises(QuboFormatError, match="non-finite"):
        import_qubo(write(tmp_path, "p qubo 2 1\n0 1 nan\n"))
    with pytest.raises(QuboFormatError, match="non-finite"):
        import_qubo(write(tmp_path, "p qubo 2 1\n0 1 inf\n"))
    with pytest.raises(QuboFormatError, match="duplicate entry"):
        import_qubo(write(tmp_path, "p qubo 2 2\n0 1 1.0\n0 1 2.0\n"))
    with pytest.raises(QuboFormatError, match="announces 3 entries, found 1"):
        import_qubo(write(tmp_path, "p qubo 2 3\n0 1 1.0\n"))


def test_error_messages_carry_line_numbers(tmp_path):
    path = write(tmp_path, "p qubo 4 2\n0 1 1.0\n3 2 1.0\n")
    with pytest.raises(QuboFormatError, match=r"bad\.qubo:3"):
        import_qubo(path)
