import json

import pytest
from gmpy2 import mpq

from saddlenode import __version__
from saddlenode.cli import EXIT_OK, EXIT_PARSE, EXIT_PRECONDITION, main
from saddlenode.config import load_config
from saddlenode.dsl import parse, parse_bindings, parse_field, to_text
from saddlenode.errors import ConstraintViolated, NonPolynomialDenominator, ParseError
from saddlenode.normal_forms import ECALLE2, FORMAL_MODEL, make_named, recognize
from saddlenode.report import classify_report, emit
from saddlenode.series import TruncatedSeries1

from .corpus import CORPUS

BIND = parse_bindings(["m=1/3", "c=1+2i"])


@pytest.mark.parametrize("text", CORPUS)
def test_roundtrip_fixpoint(text):
    ast = parse(text)
    printed = to_text(ast)
    assert parse(printed) == ast
    assert to_text(parse(printed)) == printed
    assert parse_field(printed, 6, BIND) == parse_field(text, 6, BIND)


def test_parse_examples():
    assert parse_field("x^2*dx + (y + m*x*y)*dy", 8, BIND) == make_named(FORMAL_MODEL, 8, k=1, mu=mpq(1, 3))
    F = parse_field("y*dx + x*dy", 6)
    assert F.linear_part() == ((0, 1), (1, 0))
    got = recognize(parse_field("x^2*dx + (y + x*(y^2))*dy", 8))
    t = TruncatedSeries1.var(8)
    assert got.variant == ECALLE2 and got.params["f"] == t * t


@pytest.mark.parametrize("text, pos", [
    ("x*dx + (y", 9),
    ("x*dx + y*dy)", 11),
    ("x $ y", 2),
    ("x^y*dx", 2),
    ("x*dx + y", 5),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as e:
        parse_field(text, 6)
    assert e.value.position == pos


def test_non_polynomial_denominator():
    with pytest.raises(NonPolynomialDenominator) as e:
        parse_field("dx/x", 6)
    assert e.value.position == 2


def test_unbound_name_and_bad_binding():
    with pytest.raises(ParseError):
        parse_field("m*x*dx", 6)
    with pytest.raises(ParseError):
        parse_bindings(["x=1"])
    with pytest.raises(ParseError):
        parse_bindings(["m=0.1.2"])


def test_report_formal_model():
    rep = classify_report("x^2*dx + (y + m*x*y)*dy", BIND, load_config())
    assert rep["class"]["variant"] == "SaddleNode"
    assert rep["dulac"]["k"]["value"] == 1 and rep["dulac"]["mu"]["value"] == "1/3"
    assert {"curve": "y=0", "index": {"value": "1/3", "provenance": "exact"}} in rep["camacho_sad"]
    assert rep["tool"]["version"] == __version__


def test_report_nonsingular_omits_sections():
    rep = classify_report("dx + y*dy", {}, load_config())
    assert rep["class"]["variant"] == "NonSingular"
    for key in ("eigendata", "dulac", "named_form", "camacho_sad", "cascade"):
        assert key not in rep


def test_report_cascade_two_steps():
    rep = classify_report("x^2*dx + (y + x*(m*y + y^2))*dy", BIND, load_config(steps=2))
    pts = rep["cascade"]["singular_points"]
    assert sum(p["class"].startswith("ResonantSaddle(p=1, q=1)") for p in pts) == 2
    assert [p["mu"]["value"] for p in pts if "mu" in p] == ["-5/3"]


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "classify", "x*dx + y*dy")[0] == EXIT_OK
    assert run(capsys, "classify", "x*dx + (y")[0] == EXIT_PARSE
    assert run(capsys, "classify", "dx/x")[0] == EXIT_PARSE
    assert run(capsys, "prenormalize", "x*dx + y*dy")[0] == EXIT_PRECONDITION
    assert run(capsys, "blowup", "x*dx - y*dy", "--steps", "1")[0] == EXIT_PRECONDITION
    assert run(capsys, "brjuno", "1/2")[0] == EXIT_PRECONDITION
    assert run(capsys, "brjuno", "golden")[0] == EXIT_OK
    assert run(capsys, "elizarov", "--mu", "0", "--coef", "0,1=1")[0] == EXIT_PRECONDITION
    assert run(capsys, "elizarov", "--mu", "0", "--coef", "2;1=1")[0] == EXIT_PARSE
    assert run(capsys, "holonomy", "x*dx + (y + x)*dy")[0] == EXIT_PRECONDITION
    assert run(capsys, "classify", "x*dx", "--config", str(tmp_path / "missing.ini"))[0] == EXIT_PRECONDITION
    code, _, err = run(capsys, "prenormalize", "x*dx + y*dy")
    assert "[normal_forms]" in err


def test_machine_report_is_deterministic(capsys):
    argv = ["classify", "x^2*dx + (y + x*(m*y + y^2))*dy", "--bind", "m=1/3", "--steps", "2", "--format", "machine"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    data = json.loads(a)
    assert list(data)[:4] == ["tool", "command", "config", "input"]


def test_holonomy_and_omega_commands(capsys):
    code, out, _ = run(capsys, "holonomy", "x*dx + 1/4*y*dy", "--jet", "2", "--format", "machine")
    assert code == 0
    jet = json.loads(out)["holonomy"]["jet"]
    re, im = jet[0]["coefficient"]["value"]
    assert abs(complex(re, im) - 1j) < 1e-9 and jet[0]["coefficient"]["provenance"] == "float"
    code, out, _ = run(capsys, "omega", "dx", "dx + y^2*dy", "--x1", "1", "--format", "machine")
    assert json.loads(out)["omega"]["integral"]["value"] == "1"


def test_config_file_and_override(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    ini.write_text("[saddlenode]\ntrunc = 7\njet = 2\n")
    cfg = load_config(str(ini), jet=4)
    assert (cfg.trunc, cfg.jet) == (7, 4)
    code, out, _ = run(capsys, "classify", "x*dx + y*dy", "--config", str(ini), "--format", "machine")
    assert json.loads(out)["config"]["trunc"] == 7
    ini.write_text("[saddlenode]\ntrunc = lots\n")
    with pytest.raises(ConstraintViolated):
        load_config(str(ini))


def test_field_from_file(tmp_path, capsys):
    p = tmp_path / "f.txt"
    p.write_text("x^2*dx + (y + 1/3*x*y)*dy\n")
    code, out, _ = run(capsys, "prenormalize", f"@{p}", "--format", "machine")
    assert code == 0 and json.loads(out)["dulac"]["mu"]["value"] == "1/3"


def test_text_emit_marks_provenance():
    text = emit(classify_report("x*dx + 1/2*y*dy", {}, load_config()))
    assert "[exact]" in text
