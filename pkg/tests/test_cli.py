import json
import shutil

import pytest

from wapshop.cli import default_seed_path, main
from wapshop.shop import Store
from wapshop.wml import parse_deck, serialize_deck

SAMPLE = '<wml>\n <card id="a" title="T">\n  <p>Hello there</p>\n </card>\n</wml>\n'

JOURNEY = """
form /register u=kz p=secret7 surname=Z name=K address="12 Museum St"
form /cart-add id=p1
form /order-confirm payment=courier
expect order_total=1500
"""


@pytest.fixture
def store_path(tmp_path):
    path = tmp_path / "store.json"
    shutil.copyfile(default_seed_path(), path)
    return str(path)


class TestCodecCommands:
    def test_compile_then_decompile_prints_canonical(self, tmp_path, capsys):
        infile = tmp_path / "a.wml"
        outfile = tmp_path / "a.wmlc"
        infile.write_text(SAMPLE, encoding="utf-8")
        assert main(["compile", str(infile), str(outfile)]) == 0
        assert outfile.read_bytes()[0] == 0x01
        capsys.readouterr()
        assert main(["decompile", str(outfile)]) == 0
        out = capsys.readouterr().out.strip()
        assert out == serialize_deck(parse_deck(SAMPLE))

    def test_compile_malformed_is_exit_2(self, tmp_path, capsys):
        infile = tmp_path / "bad.wml"
        infile.write_text("<wml><card id='a'>", encoding="utf-8")
        assert main(["compile", str(infile), str(tmp_path / "x.wmlc")]) == 2

    def test_decompile_garbage_is_exit_2(self, tmp_path, capsys):
        infile = tmp_path / "bad.wmlc"
        infile.write_bytes(b"\x02\x03\x04")
        assert main(["decompile", str(infile)]) == 2


class TestSeed:
    def test_seed_default_fixture(self, tmp_path, capsys):
        store_file = str(tmp_path / "s.json")
        assert main(["seed", "--store", store_file]) == 0
        assert "20 products" in capsys.readouterr().out
        assert len(Store(store_file).products) == 20

    def test_seed_missing_store_flag(self, capsys):
        assert main(["seed"]) == 2


class TestLint:
    def test_lint_storefront_route_passes(self, store_path, capsys):
        assert main(["lint", "/intro", "--store", store_path]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_lint_json_schema(self, store_path, capsys):
        assert main(["lint", "/menu", "--store", store_path, "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert set(doc) == {"violations", "checked_decks"}

    def test_lint_single_file_violations_exit_1(self, tmp_path, capsys):
        bad = tmp_path / "bad.wml"
        bad.write_text('<wml><card id="a"><p>no back action here</p></card></wml>',
                       encoding="utf-8")
        assert main(["lint", str(bad)]) == 1
        assert "R4" in capsys.readouterr().out

    def test_lint_clean_file_exit_0(self, tmp_path, capsys):
        good = tmp_path / "good.wml"
        good.write_text(
            '<wml><card id="a"><p>Hi</p>'
            '<do type="prev" label="Back"><go href="back"/></do></card></wml>',
            encoding="utf-8")
        assert main(["lint", str(good)]) == 0

    def test_policy_override_applied(self, tmp_path, store_path, capsys):
        policy = tmp_path / "policy.json"
        policy.write_text(json.dumps({"max_compiled_bytes": 50}), encoding="utf-8")
        assert main(["lint", "/menu", "--store", store_path,
                     "--policy", str(policy)]) == 1
        assert "R1" in capsys.readouterr().out

    def test_policy_unknown_key_is_usage_error(self, tmp_path, store_path, capsys):
        policy = tmp_path / "policy.json"
        policy.write_text(json.dumps({"max_compiled_byte": 50}), encoding="utf-8")
        assert main(["lint", "/menu", "--store", store_path,
                     "--policy", str(policy)]) == 2


class TestJourney:
    def test_journey_runs_and_reports(self, tmp_path, store_path, capsys):
        script = tmp_path / "trip.txt"
        script.write_text(JOURNEY, encoding="utf-8")
        assert main(["journey", str(script), "--store", store_path]) == 0
        out = capsys.readouterr().out
        assert "order o1" in out and "all expectations met" in out

    def test_journey_empty_script_exit_2(self, tmp_path, store_path, capsys):
        script = tmp_path / "empty.txt"
        script.write_text("\n# nothing\n", encoding="utf-8")
        assert main(["journey", str(script), "--store", store_path]) == 2

    def test_journey_failed_expectation_exit_1(self, tmp_path, store_path, capsys):
        script = tmp_path / "trip.txt"
        script.write_text(JOURNEY.replace("order_total=1500", "order_total=9999"),
                          encoding="utf-8")
        assert main(["journey", str(script), "--store", store_path]) == 1

    def test_journey_figures_written(self, tmp_path, store_path, capsys):
        script = tmp_path / "trip.txt"
        script.write_text("goto /menu\ngoto /product?id=p1\n", encoding="utf-8")
        figdir = tmp_path / "figs"
        assert main(["journey", str(script), "--store", store_path,
                     "--figures", str(figdir)]) == 0
        names = sorted(p.name for p in figdir.iterdir())
        assert names == ["bytes.png", "cost.png", "duration.png"]
        assert all((figdir / n).stat().st_size > 0 for n in names)

    def test_env_var_supplies_store(self, tmp_path, store_path, capsys, monkeypatch):
        monkeypatch.setenv("WAPSHOP_STORE", store_path)
        script = tmp_path / "trip.txt"
        script.write_text("goto /menu\nexpect lint_pass\n", encoding="utf-8")
        assert main(["journey", str(script)]) == 0

    def test_flag_beats_env_var(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("WAPSHOP_STORE", str(tmp_path / "does-not-exist.json"))
        real = tmp_path / "real.json"
        shutil.copyfile(default_seed_path(), real)
        script = tmp_path / "trip.txt"
        script.write_text("goto /product?id=p1\nexpect lint_pass\n", encoding="utf-8")
        assert main(["journey", str(script), "--store", str(real)]) == 0


class TestUsage:
    def test_no_command_exit_2(self, capsys):
        assert main([]) == 2

    def test_unknown_command_exit_2(self, capsys):
        assert main(["frobnicate"]) == 2

    def test_bad_link_spec_exit_2(self, tmp_path, store_path, capsys):
        script = tmp_path / "trip.txt"
        script.write_text("goto /menu\n", encoding="utf-8")
        assert main(["journey", str(script), "--store", store_path,
                     "--link", "warp9"]) == 2
