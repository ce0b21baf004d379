from pathlib import Path

import pytest

from moltwave.harness.config import ConfigError, RunConfig, load_config, parse_config

CONFIGS = sorted((Path(__file__).resolve().parent.parent / "configs").glob("*.cfg"))


class TestParse:
    def test_comments_and_blanks(self):
        cfg = parse_config("""
            # a comment
            name = demo   # trailing comment
            N = 20

            cfl = 0.5
        """)
        assert (cfg.name, cfg.N, cfg.cfl) == ("demo", 20, 0.5)

    def test_types(self):
        cfg = parse_config("fit_dt = false\nsnapshot_times = 0, 0.5, 1\ndy = none\nt_final = 1")
        assert cfg.fit_dt is False
        assert cfg.snapshot_times == (0.0, 0.5, 1.0)
        assert cfg.dy is None

    def test_defaults(self):
        assert parse_config("") == RunConfig()

    @pytest.mark.parametrize("text", ["N = abc", "nonsense", "colour = red", "N = 4\nN = 5",
                                      "fit_dt = maybe", "cfl = -1", "bc_left = robin",
                                      "bc_left = periodic", "dimension = 3", "geometry = circle",
                                      "layout = mixed\nsubdomains = 3", "snapshot_times = 5"])
    def test_errors(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_config_error_is_value_error(self):
        assert issubclass(ConfigError, ValueError)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.cfg")


class TestRunConfig:
    def test_spacing_y_defaults_to_dx(self):
        assert RunConfig(dx=0.3).spacing_y == 0.3
        assert RunConfig(dx=0.3, dy=0.2).spacing_y == 0.2

    def test_digest_tracks_content(self):
        a = RunConfig()
        assert a.digest() == RunConfig().digest()
        assert a.digest() != a.with_updates(N=41).digest()

    def test_with_updates_validates(self):
        with pytest.raises(ConfigError):
            RunConfig().with_updates(cfl=0.0)

    @pytest.mark.parametrize("kw", [dict(dimension=2, geometry="circle", initial="cavity_mode"),
                                    dict(dimension=2, geometry="rectangle", initial="bessel_mode"),
                                    dict(dimension=2, geometry="circle", initial="zero",
                                         reference="full_circle")])
    def test_incompatible_data(self, kw):
        with pytest.raises(ConfigError):
            RunConfig(**kw)


@pytest.mark.parametrize("path", CONFIGS, ids=lambda p: p.stem)
def test_shipped_configs_load(path):
    cfg = load_config(path)
    assert cfg.name == path.stem
