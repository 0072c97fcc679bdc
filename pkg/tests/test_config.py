import pytest

from singhyp.config import parse_config
from singhyp.errors import ConfigError


def test_defaults_and_overrides():
    cfg = parse_config("[run]\nseed = 7\n[map]\nfamily = lorenz\nalpha = 0.8\n[dimension]\nchains = 64\n",
                       "dimension")
    assert cfg.seed == 7
    assert cfg.knobs["chains"] == 64 and cfg.knobs["length"] == 2000
    assert cfg.build_map().base.expansion_floor == pytest.approx(1.6)


def test_fraction_values_and_comments():
    cfg = parse_config("[map]\nfamily = affine-skew  # baker\ncontraction = 1/3\n", "ulam")
    assert cfg.map_params["contraction"] == pytest.approx(1 / 3)


@pytest.mark.parametrize("text,key", [
    ("[ulam]\nbinz = 4\n", "binz"),
    ("[ulam]\nbins = 4\nbins = 8\n", "bins"),
    ("[ulam]\nbins = many\n", "bins"),
    ("[ulam]\nbins = 1\n", "bins"),
    ("[dimension]\nchains = 3\n", "dimension"),
    ("bins = 4\n", "bins"),
])
def test_errors_name_the_key(text, key):
    with pytest.raises(ConfigError) as exc:
        parse_config(text, "ulam")
    assert exc.value.key == key


def test_error_line_number():
    with pytest.raises(ConfigError) as exc:
        parse_config("[ulam]\n\nbins = 4\ntol = 5\n", "ulam")
    assert exc.value.line == 4


def test_bad_map_params():
    cfg = parse_config("[map]\nfamily = doubling\nalpha = 0.7\n", "ulam")
    with pytest.raises(ConfigError):
        cfg.build_map()


def test_digest_tracks_text():
    a = parse_config("[ulam]\nbins = 8\n", "ulam")
    b = parse_config("[ulam]\nbins = 16\n", "ulam")
    assert a.digest != b.digest and len(a.digest) == 64
