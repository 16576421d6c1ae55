"""Tests for the upb management command and console script."""

import json
from io import StringIO

import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from django_upb.cli import run
from django_upb.models import ClaimRecord


def _call(*args):
    out = StringIO()
    call_command("upb", *args, stdout=out)
    return out.getvalue()


def _run(*args):
    out, err = StringIO(), StringIO()
    code = run(list(args), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def uom_file(tmp_path):
    def write(rows, name="uom.json"):
        path = tmp_path / name
        path.write_text(json.dumps({"rows": rows}))
        return str(path)

    return write


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.json"
    zero, half = [0, 0], [0.5, 0]
    path.write_text(
        json.dumps(
            {
                "dim": 4,
                "layout": [2, 2],
                "entries": [
                    [half, zero, zero, half],
                    [zero, zero, zero, zero],
                    [zero, zero, zero, zero],
                    [half, zero, zero, half],
                ],
            }
        )
    )
    return str(path)


class TestCheck:
    """Test the check subcommand."""

    def test_builtin_upb(self):
        """Test that a bundled UPB passes."""
        assert "unextendible" in _call("check", "--builtin", "size6")

    def test_json_output(self):
        """Test the JSON document of a check."""
        data = json.loads(_call("check", "--builtin", "threequbit", "--json"))
        assert data["orthogonal"] is True
        assert data["verdict"]["unextendible"] is True
        assert data["basis"]["layout"] == [2, 2, 2]
        assert data["basis"]["vectors"][0][0] == [[1.0, 0.0], [0.0, 0.0]]

    def test_extendible_exits_one(self, uom_file):
        """Test that an extendible set fails the check."""
        code, out, err = _run("check", "--in", uom_file(["00", "11"]))
        assert code == 1
        assert "extendible" in out

    def test_not_orthogonal_exits_one(self, uom_file):
        """Test that overlapping members fail the check."""
        code, _, err = _run("check", "--in", uom_file(["00", "0a"]))
        assert code == 1
        assert "OrthogonalityError" in err

    def test_unknown_symbol_exits_two(self, uom_file):
        """Test that malformed matrices are input errors."""
        code, _, err = _run("check", "--in", uom_file(["00", "0x"]))
        assert code == 2
        assert "SymbolError" in err

    def test_bad_angles_exit_two(self):
        """Test that out-of-range angles are input errors."""
        assert _run("check", "--builtin", "size6", "--angles", "0")[0] == 2

    def test_missing_file_exits_two(self, tmp_path):
        """Test that an unreadable file is an input error."""
        assert _run("check", "--in", str(tmp_path / "nope.json"))[0] == 2

    def test_usage_errors(self):
        """Test that a missing subcommand or source exits two."""
        assert _run()[0] == 2
        assert _run("check")[0] == 2
        assert _run("check", "--builtin", "size8")[0] == 2

    def test_numeric_basis_file(self, tmp_path):
        """Test a product basis given by amplitudes."""
        path = tmp_path / "basis.json"
        path.write_text(
            json.dumps(
                {
                    "layout": [2, 2],
                    "labels": ["A", "B"],
                    "vectors": [
                        [[[1, 0], [0, 0]], [[1, 0], [0, 0]]],
                        [[[0, 0], [1, 0]], [[0, 0], [1, 0]]],
                    ],
                }
            )
        )
        assert _run("check", "--in", str(path))[0] == 1

    def test_raises_command_error(self):
        """Test that call_command surfaces the exit code."""
        with pytest.raises(CommandError) as excinfo:
            call_command("upb", "check", "--builtin", "size6", "--angles", "2.0", stdout=StringIO())
        assert excinfo.value.returncode == 2


class TestCoarse:
    """Test the coarse subcommand."""

    def test_single_cut(self):
        """Test the verdict of one partition."""
        data = json.loads(_call("coarse", "--builtin", "size6", "--cut", "AB|C|D", "--json"))
        assert data["partition"] == "AB|C|D"
        assert data["unextendible"] is True

    def test_all_partitions(self):
        """Test the summary over every coarse graining."""
        out = _call("coarse", "--builtin", "size7")
        assert "AB|CD: extendible" in out
        assert len(out.strip().splitlines()) == 14

    def test_report_json(self):
        """Test the JSON report of the 11th size-9 UPB."""
        data = json.loads(_call("coarse", "--builtin", "size9-11th", "--json"))
        assert len(data["2x2x4"]) == 6
        assert sorted(data["4x4"]) == ["AB|CD", "AC|BD", "AD|BC"]

    def test_bad_cut(self):
        """Test that an unknown party is an input error."""
        assert _run("coarse", "--builtin", "size6", "--cut", "AB|CE")[0] == 2


class TestEquiv:
    """Test the equiv subcommand."""

    @pytest.mark.parametrize("name", ["family11", "family11-1"])
    def test_chain(self, name):
        """Test that printed chains verify."""
        assert "verified" in _call("equiv", "--chain", name)

    def test_search(self):
        """Test that the table form reaches the chain form."""
        data = json.loads(
            _call("equiv", "--first", "size9-11th-table", "--second", "size9-11th", "--json")
        )
        assert data["equivalent"] is True
        assert data["steps"]

    def test_missing_second(self):
        """Test that both matrices are required."""
        assert _run("equiv", "--first", "size6")[0] == 2

    def test_not_found(self, uom_file):
        """Test that an exhausted budget fails the check."""
        path = uom_file(["0000", "0001", "0010", "0011", "1000", "1001", "1100", "1101", "1110"])
        code, out, _ = _run("equiv", "--first", "size9-11th", "--second", path, "--budget", "100")
        assert code == 1
        assert "no chain found" in out

    def test_shape_mismatch(self):
        """Test that differently shaped matrices are input errors."""
        assert _run("equiv", "--first", "size6", "--second", "size7")[0] == 2


class TestCatalog:
    """Test the catalog subcommand."""

    def test_list(self):
        """Test the bundled listing."""
        out = _call("catalog", "--list")
        assert "size6 (size 6)" in out

    def test_load_and_count(self, tmp_path):
        """Test table loading with counts."""
        path = tmp_path / "table.json"
        path.write_text(json.dumps([{"name": "u11", "rows": ["001a", "01a0", "0a01", "110a", "1a10", "10a1", "a000", "a111", "a'a'a'a'"]}]))
        data = json.loads(_call("catalog", "--load", str(path), "--counts", "--json"))
        assert data["counts"]["count_224"] == 6
        assert data["counts"]["count_44"] == 3
        assert data["table"][0]["provenance"] == "external-table"

    def test_bad_table(self, tmp_path):
        """Test that an invalid table is an input error."""
        path = tmp_path / "table.json"
        path.write_text(json.dumps([{"rows": ["00", "0a"]}]))
        assert _run("catalog", "--load", str(path))[0] == 2


class TestStates:
    """Test the rho, ppt and gme subcommands."""

    def test_rho(self):
        """Test the default rank-seven state."""
        data = json.loads(_call("rho", "--angles", "pi/4", "--json"))
        assert data["rank"] == 7
        assert data["trace"] == pytest.approx(1.0)
        assert "entries" not in data

    def test_rho_round_trip(self, tmp_path):
        """Test that a written state feeds ppt and gme."""
        path = str(tmp_path / "rho.json")
        _call("rho", "--angles", "0.3,0.7,1.1,0.4", "--out", path)
        document = json.loads((tmp_path / "rho.json").read_text())
        assert document["dim"] == 16
        assert document["layout"] == [2, 2, 2, 2]
        assert len(document["entries"]) == 16
        ppt = json.loads(_call("ppt", "--rho", path, "--json"))
        assert ppt["ppt"] is True
        assert len(ppt["results"]) == 7
        gme = json.loads(_call("gme", "--rho", path, "--restarts", "2", "--seed", "1", "--json"))
        assert 0.0 < gme["max_overlap"] < 1.0
        assert gme["partition"] == "A|B|C|D"

    def test_ppt_spectra(self, tmp_path):
        """Test that the JSON record lists the spectrum of every cut."""
        path = str(tmp_path / "rho.json")
        _call("rho", "--angles", "pi/4", "--out", path)
        data = json.loads(_call("ppt", "--rho", path, "--json"))
        assert sorted(data["spectra"]) == sorted(r["cut"] for r in data["results"])
        assert len(data["spectra"]) == 7
        for cut, spectrum in data["spectra"].items():
            assert len(spectrum) == 16
            assert min(spectrum) >= -1e-10
            assert sum(spectrum) == pytest.approx(1.0)

    def test_ppt_spectrum_single_cut(self, bell_file):
        """Test the spectrum of one cut of a Bell state."""
        code, out, _ = _run("ppt", "--rho", bell_file, "--cut", "A|B", "--json")
        assert code == 1
        data = json.loads(out)
        assert data["spectra"]["A|B"] == pytest.approx([0.5, 0.5, 0.5, -0.5])

    def test_gme_is_deterministic(self, tmp_path):
        """Test that identical seeded invocations print identical JSON."""
        path = str(tmp_path / "rho.json")
        _call("rho", "--angles", "pi/4", "--out", path)
        args = ("gme", "--rho", path, "--restarts", "3", "--seed", "7", "--json")
        first, second = _call(*args), _call(*args)
        assert first == second
        assert json.loads(first)["max_overlap"] > 0.0

    def test_gme_chain(self):
        """Test the monotonicity record along a coarse-graining chain."""
        data = json.loads(
            _call(
                "gme", "--angles", "pi/4", "--restarts", "4", "--seed", "7",
                "--chain", "A|B|C|D", "--chain", "A|B|CD", "--chain", "AB|CD", "--json",
            )
        )
        assert data["ok"] is True
        assert sorted(data["G"]) == sorted(["A|B|C|D", "A|B|CD", "AB|CD"])
        assert data["G"]["AB|CD"] <= data["G"]["A|B|C|D"] + 1e-6

    def test_gme_chain_that_does_not_coarsen(self):
        """Test that a chain going finer is an input error."""
        code, _, _ = _run(
            "gme", "--angles", "pi/4", "--restarts", "2", "--chain", "AB|CD", "--chain", "A|B|C|D"
        )
        assert code == 2

    def test_gme_cut_and_chain(self):
        """Test that --cut and --chain exclude each other."""
        assert _run("gme", "--cut", "AB|CD", "--chain", "A|B|C|D", "--chain", "AB|CD")[0] == 2

    def test_npt_exits_one(self, bell_file):
        """Test that a Bell state fails the PPT check."""
        code, out, _ = _run("ppt", "--rho", bell_file)
        assert code == 1
        assert "A|B" in out

    def test_gme_cut(self):
        """Test the see-saw on a coarse partition."""
        out = _call("gme", "--angles", "pi/4", "--cut", "AB|CD", "--restarts", "2")
        assert out.startswith("AB|CD: max overlap")

    def test_malformed_density(self, tmp_path):
        """Test that a density file without entries is an input error."""
        path = tmp_path / "rho.json"
        path.write_text(json.dumps({"layout": [2, 2]}))
        assert _run("ppt", "--rho", str(path))[0] == 2


class TestReproduce:
    """Test the reproduce subcommand."""

    def test_single_claim(self):
        """Test one fast claim without timings."""
        data = json.loads(_call("reproduce", "--claim", "size6-graining", "--json"))
        assert data["passed"] is True
        assert "run_id" not in data
        assert "runtime" not in data["claims"][0]

    def test_timings(self):
        """Test that runtimes are included on request."""
        data = json.loads(
            _call("reproduce", "--claim", "transform-chains", "--timings", "--json")
        )
        assert data["claims"][0]["runtime"] >= 0.0

    @pytest.mark.django_db
    def test_save(self):
        """Test that --save stores one record per claim."""
        _call("reproduce", "--claim", "size6-graining", "--claim", "transform-chains", "--save")
        assert ClaimRecord.objects.count() == 2

    def test_unknown_claim(self):
        """Test that an unknown id is a usage error."""
        assert _run("reproduce", "--claim", "size10-graining")[0] == 2
