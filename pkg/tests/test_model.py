"""Configuration schema, validation reports, and mirror-symmetry detection."""
import json

import pytest

from zenoleak.model import (ConfigError, DotSite, ModelConfig, QuadratureSpec,
                            config_from_dict, detect_mirror_symmetry,
                            parse_config, validate_model)

MINIMAL = {"alpha": 1.0, "sites": [{"c": 0.0, "a": 2.0, "beta": 0.1}]}


def test_minimal_document_fills_defaults():
    cfg = config_from_dict(MINIMAL)
    assert cfg.alpha == 1.0
    assert cfg.n == 1
    assert cfg.quadrature == QuadratureSpec()


def test_quadrature_overrides():
    doc = dict(MINIMAL, quadrature={"rel_tol": 1e-8, "max_subdivisions": 50})
    cfg = config_from_dict(doc)
    assert cfg.quadrature.rel_tol == 1e-8
    assert cfg.quadrature.max_subdivisions == 50
    assert cfg.quadrature.abs_tol == QuadratureSpec().abs_tol


@pytest.mark.parametrize("doc,fragment", [
    (dict(MINIMAL, gamma=2.0), "gamma"),
    ({"alpha": 1.0}, "sites"),
    ({"sites": MINIMAL["sites"]}, "alpha"),
    (dict(MINIMAL, sites=[{"c": 0, "a": 1, "beta": 0, "x": 1}]), "x"),
    (dict(MINIMAL, sites=[{"c": 0, "a": 1}]), "beta"),
    (dict(MINIMAL, sites=[]), "sites"),
    (dict(MINIMAL, alpha=True), "number"),
    (dict(MINIMAL, quadrature={"eps": 1}), "eps"),
    (dict(MINIMAL, alpha="1"), "number"),
])
def test_strict_schema_rejections(doc, fragment):
    with pytest.raises(ConfigError) as exc:
        config_from_dict(doc)
    assert fragment in str(exc.value)


def test_validation_rejects_site_on_line():
    doc = dict(MINIMAL, sites=[{"c": 0.0, "a": 0.0, "beta": 0.1}])
    with pytest.raises(ConfigError, match="on the line"):
        config_from_dict(doc)


def test_validation_report_collects_everything():
    cfg = ModelConfig(alpha=-1.0, sites=(DotSite(0, 0, 0.1), DotSite(0, 0, 0.1)))
    rep = validate_model(cfg)
    assert not rep.ok
    assert any("alpha" in v for v in rep.violations)
    assert any("coincide" in v for v in rep.violations)
    assert any("line" in v for v in rep.violations)


def test_parse_config_json_error_context(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"alpha": 1.0,\n  "sites": [}')
    with pytest.raises(ConfigError, match="line 2"):
        parse_config(str(p))


def test_parse_config_roundtrip(tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(MINIMAL))
    cfg = parse_config(str(p))
    assert cfg == config_from_dict(MINIMAL)


def test_mirror_symmetry_detected():
    cfg = ModelConfig(alpha=1.0, sites=(DotSite(0.0, 2.0, 0.1),
                                        DotSite(0.0, -2.0, 0.1)))
    rep = detect_mirror_symmetry(cfg)
    assert rep.symmetric
    assert rep.pairs == ((0, 1),)


def test_mirror_symmetry_rejected_on_beta_mismatch():
    cfg = ModelConfig(alpha=1.0, sites=(DotSite(0.0, 2.0, 0.1),
                                        DotSite(0.0, -2.0, 0.2)))
    assert not detect_mirror_symmetry(cfg).symmetric


def test_mirror_symmetry_asymmetric_pair():
    cfg = ModelConfig(alpha=1.0, sites=(DotSite(0.0, 2.0, 0.1),
                                        DotSite(1.0, -2.0, 0.1)))
    assert not detect_mirror_symmetry(cfg).symmetric
