import io
import json
import math
import subprocess
import sys

import pytest

from abc_effectivity.cli import EXIT_OK, EXIT_RESOURCE, EXIT_USAGE, EXIT_VERIFY, parse_point, run, UsageError


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


def call_json(*argv):
    code, text = call(*argv, "--json")
    return code, json.loads(text)


def lo_hi(interval):
    return float(interval[0]), float(interval[1])


class TestPointSyntax:
    @pytest.mark.parametrize(
        "text, alpha",
        [("[2:3]", "3/2"), ("[1:5]", "5"), ("7/4", "7/4"), ("[0:1]", None), ("inf", None)],
    )
    def test_rational_forms(self, text, alpha):
        P = parse_point(text)
        assert (None if P.alpha is None else str(P.alpha)) == alpha

    def test_root_form(self):
        P = parse_point("[1:root(x^2-2, near 1.4)]")
        assert P.degree == 2 and P.alpha.to_complex().real > 0

    def test_complex_near(self):
        P = parse_point("root(x^2+1, near 0+1i)")
        assert P.alpha.to_complex().imag > 0

    @pytest.mark.parametrize("bad", ["[1:2", "[0:0]", "[1:root(x^2-2 near 1)]", "abc", ""])
    def test_errors(self, bad):
        with pytest.raises(UsageError):
            parse_point(bad)

    def test_caret(self):
        with pytest.raises(UsageError) as ei:
            parse_point("[1:2")
        assert "^" in str(ei.value) and "column" in str(ei.value)


class TestCommands:
    def test_height(self):
        code, doc = call_json("height", "[2:3]")
        assert code == EXIT_OK and doc["schema"] == "1"
        assert doc["exact_form"] == "log 3"
        lo, hi = lo_hi(doc["value"])
        assert lo <= math.log(3) <= hi

    def test_text_output(self):
        code, text = call("height", "[2:3]")
        assert code == EXIT_OK and "log 3" in text

    def test_conductor(self):
        code, doc = call_json("conductor", "[1:1/9]")
        lo, hi = lo_hi(doc["value"])
        assert code == EXIT_OK and lo <= math.log(6) <= hi  # rad(1 * 8 * 9)

    def test_rootdisc(self):
        code, doc = call_json("rootdisc", "root(x^2+1, near 1i)")
        lo, hi = lo_hi(doc["value"])
        assert code == EXIT_OK and lo <= math.log(2) <= hi and doc["exact"] is True

    def test_compactset(self):
        code, doc = call_json("compactset", "[1:2]", "--places", "2,inf", "--eta", "1/8")
        assert code == EXIT_OK and isinstance(doc["member"], bool)

    def test_bad_place(self):
        assert call("compactset", "[1:2]", "--places", "4", "--eta", "1/2")[0] == EXIT_USAGE

    def test_usage_errors(self):
        assert call("height")[0] == EXIT_USAGE
        assert call("nonsense")[0] == EXIT_USAGE
        assert call("height", "[1:")[0] == EXIT_USAGE

    def test_dependency(self):
        code, doc = call_json("dependency", "--f", "x", "--g", "y", "--n", "2", "--samples", "5")
        assert code == EXIT_OK

    def test_dependency_expression_syntax(self):
        code, doc = call_json("dependency", "--f", "x^2 + y", "--g", "x", "--n", "2")
        assert code == EXIT_OK

    def test_dependency_bad_function(self):
        assert call("dependency", "--f", "x + z", "--g", "y")[0] == EXIT_USAGE

    def test_constants_demo(self):
        code, doc = call_json("constants", "--d", "1", "--eps", "1/2", "--places", "2,inf", "--demo-n", "2", "--ledger")
        assert code == EXIT_OK
        assert doc["report"]["demo_mode"] is True and "Z_formulas" in doc

    def test_reduce_demo(self):
        code, doc = call_json("reduce", "--point", "[1:5]", "--d", "1", "--eps", "1/2", "--places", "inf", "--demo")
        assert code == EXIT_OK
        assert doc["trace"]["unconditional_ok"] is True

    def test_deterministic(self):
        argv = ("reduce", "--point", "[1:5]", "--d", "1", "--eps", "1/2", "--places", "inf", "--demo")
        assert call(*argv) == call(*argv)

    def test_abc_scan(self):
        code, doc = call_json("abc-scan", "--cmax", "30")
        assert code == EXIT_OK and doc["all_match"] is True


@pytest.fixture(scope="module")
def cert_file(tmp_path_factory):
    code, doc = call_json("belyi", "--n", "2", "--points", "[1:2]")
    assert code == EXIT_OK
    path = tmp_path_factory.mktemp("cert") / "cert.json"
    path.write_text(json.dumps(doc))
    return path, doc


class TestBelyiCertificates:
    def test_roundtrip(self, cert_file):
        path, _ = cert_file
        code, doc = call_json("verify-cert", str(path))
        assert code == EXIT_OK and doc["agree"] and doc["valid"]

    def test_tamper_flag(self, cert_file, tmp_path):
        _, doc = cert_file
        doc = json.loads(json.dumps(doc))
        doc["certificate"]["clause_flags"]["non_criticality"] = False
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert call("verify-cert", str(bad))[0] == EXIT_VERIFY

    def test_tamper_map(self, cert_file, tmp_path):
        _, doc = cert_file
        doc = json.loads(json.dumps(doc))
        doc["certificate"]["map"] = "x + y"
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(doc))
        assert call("verify-cert", str(bad))[0] == EXIT_VERIFY

    def test_missing_file(self, tmp_path):
        assert call("verify-cert", str(tmp_path / "nope.json"))[0] == EXIT_USAGE

    def test_resource_limit(self):
        code, doc = call_json("belyi", "--n", "3", "--points", "[1:2]")
        assert code == EXIT_RESOURCE
        assert doc["error"] == "resource limit" and doc["trace"]


def test_console_script():
    out = subprocess.run(
        [sys.executable, "-m", "abc_effectivity.cli", "height", "[2:3]", "--json"],
        capture_output=True, text=True, check=False,
    )
    assert out.returncode == 0 and json.loads(out.stdout)["exact_form"] == "log 3"
