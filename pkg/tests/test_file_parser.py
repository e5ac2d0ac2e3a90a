from fractions import Fraction

import pytest

from src.core.affine import build_affine_instance
from src.core.code import validate_modelling
from src.core.graph import WeightedGraph
from src.errors import ParseError
from src.services.file_parser import file_parser, render_name


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_read_triangle_system(files):
    x = file_parser.read_system(files["triangle.tls"])
    assert x.vertices == ("a", "b", "c")
    assert x.edge_names == ("ab", "ac", "bc")
    assert (x.declared_s, x.declared_k, x.declared_K) == (2, 2, 3)
    assert x.validation.valid
    assert x.top_weight == [1]


def test_broken_system_parses_but_is_invalid(files):
    x = file_parser.read_system(files["broken.tls"])
    assert not x.validation.valid


def test_weighted_top_line(tmp_path):
    path = write(tmp_path, "w.tls", "#tls v1\nvertex a\nvertex b\nvertex c\nedge ab a b\nedge ac a c\nedge bc b c\ntop 3/2 ab ac bc\n")
    x = file_parser.read_system(path)
    assert x.top_weight == [Fraction(3, 2)]
    assert x.edge_weight["ab"] == Fraction(3, 2)


@pytest.mark.parametrize(
    "text, line, fragment",
    [
        ("#tlx v1\n", 1, "expected header"),
        ("#tls v1 s\n", 1, "malformed header"),
        ("#tls v1\nvertex a\nbogus x\n", 3, "unknown record"),
        ("#tls v1\nvertex a\n\n# note\nvertex a\n", 5, "duplicate vertex"),
        ("#tls v1\nvertex a\nedge e a z\n", 3, "undeclared vertex"),
        ("#tls v1\nvertex a\nvertex b\nedge e a b\ntop f\n", 5, "undeclared edge"),
        ("#tls v1\nvertex a\nvertex b\nedge e a b\ntop 0/1 e\n", 5, "not positive"),
        ("#tls v1\nvertex a\nvertex b\nedge e a b\ntop 1/x e\n", 5, "not a rational"),
    ],
)
def test_system_parse_errors_carry_line_numbers(tmp_path, text, line, fragment):
    path = write(tmp_path, "bad.tls", text)
    with pytest.raises(ParseError) as info:
        file_parser.read_system(path)
    assert info.value.line == line
    assert fragment in str(info.value)
    assert str(info.value).startswith(f"{path}:{line}: ")


def test_empty_and_missing_files(tmp_path):
    with pytest.raises(ParseError):
        file_parser.read_system(write(tmp_path, "empty.tls", "\n\n"))
    with pytest.raises(ParseError):
        file_parser.read_system(tmp_path / "absent.tls")


def test_system_survives_rendering(tmp_path, files):
    x = file_parser.read_system(files["two_triangles.tls"])
    path = tmp_path / "out" / "copy.tls"
    file_parser.write_system(x, path)
    y = file_parser.read_system(path)
    assert y.edge_weight == x.edge_weight
    assert y.tops == x.tops


def test_read_code(files):
    code = file_parser.read_code(files["triangle.code"])
    assert code.p == 2
    assert code.rows["ab"] == {"a": 1, "b": 1}
    assert code.dependencies == [{"ab": 1, "ac": 1, "bc": 1}]
    assert validate_modelling(code).valid


@pytest.mark.parametrize(
    "body, fragment",
    [
        ("row zz 1 1\n", "unknown edge"),
        ("row ab 1\n", "needs 2 coefficients"),
        ("row ab 1 1\nrow ab 1 1\n", "duplicate row"),
        ("row ab 1 1\ndep ac:1\n", "unknown row"),
        ("row ab 1 1\ndep ab\n", "is not <ename>:<coeff>"),
    ],
)
def test_code_parse_errors(files, body, fragment):
    path = write(files["triangle.tls"].parent, "bad.code", "#code v1 p=2 system=triangle.tls\n" + body)
    with pytest.raises(ParseError) as info:
        file_parser.read_code(path)
    assert fragment in str(info.value)


def test_code_header_needs_prime_and_system(files):
    folder = files["triangle.tls"].parent
    with pytest.raises(ParseError):
        file_parser.read_code(write(folder, "a.code", "#code v1 system=triangle.tls\n"))
    with pytest.raises(ParseError):
        file_parser.read_code(write(folder, "b.code", "#code v1 p=2\n"))
    with pytest.raises(ParseError):
        file_parser.read_code(write(folder, "c.code", "#code v1 p=4 system=triangle.tls\n"))


def test_write_code_records_relative_system(tmp_path, files):
    code = file_parser.read_code(files["triangle.code"])
    system_path = tmp_path / "systems" / "t.tls"
    code_path = tmp_path / "codes" / "t.code"
    file_parser.write_system(code.system, system_path)
    file_parser.write_code(code, code_path, system_path)
    assert code_path.read_text(encoding="utf-8").splitlines()[0] == "#code v1 p=2 system=../systems/t.tls"
    again = file_parser.read_code(code_path)
    assert again.rows == code.rows
    assert again.dependencies == code.dependencies


def test_read_words(files):
    code = file_parser.read_code(files["triangle.code"])
    assert file_parser.read_word(files["noisy.word"], code) == {"a": 1, "b": 0, "c": 0}
    assert file_parser.read_word(files["clean.word"], code) == {"a": 1, "b": 1, "c": 1}


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("word a=1 b=0\n", "missing coordinate 'c'"),
        ("word a=1 b=0 c=2\n", "outside F_2"),
        ("word a=1 a=0 b=0 c=0\n", "assigned twice"),
        ("word a=1 b=0 z=0\n", "unknown vertex"),
        ("vector a=1\n", "unknown record"),
    ],
)
def test_word_errors(files, text, fragment):
    code = file_parser.read_code(files["triangle.code"])
    with pytest.raises(ParseError) as info:
        file_parser.read_word(write(files["triangle.tls"].parent, "bad.word", text), code)
    assert fragment in str(info.value)


def test_render_word(files):
    code = file_parser.read_code(files["triangle.code"])
    assert file_parser.render_word(code, (1, 0, 1)) == "word a=1 b=0 c=1\n"


def test_read_affine_spec(files, plane_spec):
    assert file_parser.read_affine_spec(files["plane.affine"]) == plane_spec
    assert file_parser.render_affine_spec(plane_spec) == "#affine v1 q=2 n=2 p=2\ntau 0,0 1,0\n"


def test_affine_spec_errors(tmp_path):
    with pytest.raises(ParseError) as info:
        file_parser.read_affine_spec(write(tmp_path, "a.affine", "#affine v1 q=4 n=2 p=2\ntau 0,0 1,0\n"))
    assert info.value.line == 2
    with pytest.raises(ParseError):
        file_parser.read_affine_spec(write(tmp_path, "b.affine", "#affine v1 q=2 n=2\ntau 0,0 1,0\n"))
    with pytest.raises(ParseError):
        file_parser.read_affine_spec(write(tmp_path, "c.affine", "#affine v1 q=2 n=2 p=2\n"))


def test_tuple_names_render_as_comma_lists(plane_spec):
    assert render_name((0, 1)) == "0,1"
    x = build_affine_instance(plane_spec).system
    text = file_parser.render_system(x)
    assert "edge 0,1 0 1" in text.splitlines()


def test_graph_format(tmp_path):
    path = write(tmp_path, "g.wgraph", "#wgraph v1\nvertex u\nvertex v\nedge u v 1/2\n")
    g = file_parser.read_graph(path)
    assert g.weight("u", "v") == Fraction(1, 2)
    with pytest.raises(ParseError) as info:
        file_parser.read_graph(write(tmp_path, "h.wgraph", "#wgraph v1\nvertex u\nvertex v\nedge u v 1\nedge v u 1\n"))
    assert info.value.line == 5


def test_write_text_to_stdout(capsys):
    file_parser.write_graph(WeightedGraph(["u", "v"], [("u", "v", 2)]), "-")
    assert capsys.readouterr().out == "#wgraph v1\nvertex u\nvertex v\nedge u v 2/1\n"
