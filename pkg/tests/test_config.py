"""YAML config parsing: defaults, strictness, dt snapping, hashing."""

import pytest

from sulfsim.config import config_hash, load_config
from sulfsim.errors import ConfigParseError, TimeStepTooLarge


def write(tmp_path, text):
    p = tmp_path / "cfg.yaml"
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_empty_config_gets_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg.params.alpha == 7.0
    assert cfg.params.sigma == 1.0
    assert cfg.params.eta == 1.5
    assert cfg.k == 0.22
    assert cfg.seed == 0
    assert cfg.threads == 1
    assert cfg.material is None
    assert cfg.grid is None
    assert cfg.mode is None


def test_sde_section_overrides(tmp_path):
    cfg = load_config(write(tmp_path, "sde:\n  sigma: 0.25\n  psi0: 0.3\n"))
    assert cfg.params.sigma == 0.25
    assert cfg.psi0 == 0.3


def test_material_lambda_key(tmp_path):
    cfg = load_config(write(tmp_path, "material:\n  lambda: 100.0\n"))
    assert cfg.material.lam == 100.0
    assert cfg.material.eta_tilde == pytest.approx(15.0, rel=1e-14)


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigParseError, match="alpha_typo"):
        load_config(write(tmp_path, "sde:\n  alpha_typo: 3\n"))
    with pytest.raises(ConfigParseError, match="unknown section"):
        load_config(write(tmp_path, "sde_typo:\n  alpha: 3\n"))
    with pytest.raises(ConfigParseError, match="grid"):
        load_config(write(tmp_path,
                          "grid:\n  x_max: 1.0\n  t_max: 1.0\n  dx: 0.1\n"
                          "  dt: 2.0e-3\n  extra: 1\n"))


def test_non_numeric_value_rejected(tmp_path):
    with pytest.raises(ConfigParseError, match="sde.alpha"):
        load_config(write(tmp_path, "sde:\n  alpha: fast\n"))


def test_invalid_yaml_rejected(tmp_path):
    with pytest.raises(ConfigParseError, match="invalid YAML"):
        load_config(write(tmp_path, "sde: [unclosed\n"))


def test_top_level_must_be_mapping(tmp_path):
    with pytest.raises(ConfigParseError):
        load_config(write(tmp_path, "- just\n- a list\n"))


def test_grid_requires_all_keys(tmp_path):
    with pytest.raises(ConfigParseError, match="grid.dt"):
        load_config(write(tmp_path, "grid:\n  x_max: 1.0\n  t_max: 1.0\n  dx: 0.1\n"))


def test_dt_snaps_to_divisor(tmp_path):
    # 1.5 / 1.99e-5 = 75376.88..., snapped to 75377 whole steps
    cfg = load_config(write(tmp_path,
                            "grid:\n  x_max: 1.5\n  t_max: 1.5\n  dx: 0.01\n"
                            "  dt: 1.99e-5\n"))
    assert cfg.grid.n_steps == 75377
    assert cfg.grid.dt == pytest.approx(1.5 / 75377, rel=1e-15)
    assert cfg.resolved["grid"]["dt"] == cfg.grid.dt


def test_dt_snap_rejects_far_values(tmp_path):
    # nearest divisor 1.5/4 = 0.375 is 6.25% away from 0.4
    with pytest.raises(ConfigParseError, match="dt"):
        load_config(write(tmp_path,
                          "grid:\n  x_max: 1.5\n  t_max: 1.5\n  dx: 0.25\n"
                          "  dt: 0.4\n"))


def test_grid_stability_becomes_config_error(tmp_path):
    # dbar = 0.01/0.01 = 1 > 1/2
    with pytest.raises(ConfigParseError):
        load_config(write(tmp_path,
                          "grid:\n  x_max: 1.0\n  t_max: 1.0\n  dx: 0.1\n"
                          "  dt: 0.01\n"))


def test_grid_with_material_checks_reaction_bound(tmp_path):
    # dt = 2e-3 is fine for lambda = 1 but far beyond the bound for lambda = 2000
    body = ("material:\n  lambda: 2000.0\n"
            "grid:\n  x_max: 1.0\n  t_max: 1.0\n  dx: 0.1\n  dt: 2.0e-3\n")
    with pytest.raises(TimeStepTooLarge):
        load_config(write(tmp_path, body))


def test_run_section_validation(tmp_path):
    with pytest.raises(ConfigParseError, match="seed"):
        load_config(write(tmp_path, "run:\n  seed: -2\n"))
    with pytest.raises(ConfigParseError, match="threads"):
        load_config(write(tmp_path, "run:\n  threads: 0\n"))
    with pytest.raises(ConfigParseError, match="time_stride"):
        load_config(write(tmp_path, "run:\n  time_stride: 0\n"))
    with pytest.raises(ConfigParseError, match="right_bc"):
        load_config(write(tmp_path, "run:\n  right_bc: reflect\n"))
    with pytest.raises(ConfigParseError, match="quantities"):
        load_config(write(tmp_path, "run:\n  quantities: [s, bogus]\n"))
    with pytest.raises(ConfigParseError, match="mode"):
        load_config(write(tmp_path, "run:\n  mode: fly\n"))


def test_sde_k_and_psi0_ranges(tmp_path):
    with pytest.raises(ConfigParseError, match="sde.k"):
        load_config(write(tmp_path, "sde:\n  k: 1.5\n"))
    with pytest.raises(ConfigParseError, match="psi0"):
        load_config(write(tmp_path, "sde:\n  psi0: 2.0\n"))


def test_bad_sde_parameters_surface_as_value_errors(tmp_path):
    # module validators run during load; their errors are ValueErrors too
    with pytest.raises(ValueError):
        load_config(write(tmp_path, "sde:\n  sigma: 3.0\n"))
    with pytest.raises(ValueError):
        load_config(write(tmp_path, "material:\n  c0_bar: 17.0\n"))


def test_hash_stable_and_sensitive(tmp_path):
    path = write(tmp_path, "sde:\n  sigma: 0.25\n")
    a = load_config(path)
    b = load_config(path)
    assert a.hash() == b.hash()
    assert len(a.hash()) == 64
    c = load_config(path, overrides={"seed": 5})
    assert c.seed == 5
    assert c.hash() != a.hash()
    # overrides with None values are ignored
    d = load_config(path, overrides={"seed": None})
    assert d.hash() == a.hash()


def test_hash_covers_mode_sections(tmp_path):
    a = load_config(write(tmp_path, "convergence:\n  n_paths: 100\n"))
    b = load_config(write(tmp_path, "convergence:\n  n_paths: 200\n"))
    assert a.hash() != b.hash()
    assert a.section("convergence") == {"n_paths": 100}
    assert a.section("ensemble") == {}


def test_config_hash_is_canonical():
    assert config_hash({"b": 1, "a": 2}) == config_hash({"a": 2, "b": 1})
