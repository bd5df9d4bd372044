import pytest

from app.qkd.base.codes import make_hamming743
from app.qkd.base.notation import format_code, load_code_file, parse_code_selector, parse_code_text
from app.qkd.errors import CodeFormatError, ParameterError

HAMMING_TEXT = """# Hamming code
7 4
d 3
1001101
0101011

0010111
"""


def test_parse_hamming_text():
    code = parse_code_text(HAMMING_TEXT)
    assert (code.n, code.k, code.d) == (7, 4, 3)
    assert code.parity_check == make_hamming743().parity_check


def test_format_then_parse_keeps_matrix():
    code = make_hamming743()
    assert parse_code_text(format_code(code)).parity_check == code.parity_check


def test_parse_without_rows_is_full_code():
    code = parse_code_text("3 3\n", label="trivial")
    assert code.k == 3 and code.parity_check.rows == 0
    assert code.label == "trivial"


def test_errors_cite_line_numbers():
    with pytest.raises(CodeFormatError) as exc:
        parse_code_text("# c\n3 1\n110\n0x1\n")
    assert exc.value.line == 4
    assert str(exc.value).startswith("code_format: line 4:")


def test_missing_rows_and_bad_header():
    with pytest.raises(CodeFormatError) as exc:
        parse_code_text("3 1\n110\n")
    assert exc.value.line == 3
    with pytest.raises(CodeFormatError) as exc:
        parse_code_text("\n\nthree one\n")
    assert exc.value.line == 3


def test_rank_deficient_rows_are_format_errors():
    with pytest.raises(CodeFormatError):
        parse_code_text("3 1\n110\n110\n")


def test_load_code_file(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text(HAMMING_TEXT, encoding="utf-8")
    code = load_code_file(str(path))
    assert code.label == f"file:{path}"
    with pytest.raises(ParameterError):
        load_code_file(str(tmp_path / "missing.txt"))


def test_code_selectors():
    assert [label for label, _ in parse_code_selector("rep:2..4")] == ["rep:2", "rep:3", "rep:4"]
    label, code = parse_code_selector("spc:3")[0]
    assert label == "spc:3" and code.k == 2
    assert parse_code_selector("full:1")[0][1].k == 1
    assert parse_code_selector("hamming743")[0][1].k == 4


@pytest.mark.parametrize("selector", ["golay", "rep:", "rep:4..2", "rep:x", "bch:7"])
def test_unknown_selectors(selector):
    with pytest.raises(ParameterError):
        parse_code_selector(selector)
