import json

import numpy as np
import pytest

from envydiv.complexes import for_space, gorbushka_join
from envydiv.configspace import Cut, canonicalize, point_from_barycentric
from envydiv.preferences import (
    NEW,
    PREFERENCE_TOL,
    load_preference_file,
    make_builtin,
    piecewise_from_tables,
    row_shuffled,
    sample_config_point,
    scores,
    validate,
)


def test_make_builtin_rejects_unknowns():
    with pytest.raises(ValueError):
        make_builtin("caviar", 3)
    with pytest.raises(ValueError):
        make_builtin("hungry", 3, kind="sideways")
    with pytest.raises(ValueError):
        make_builtin("piecewise_random", 3, seed=-4)
    with pytest.raises(ValueError):
        make_builtin("burnt", 3, params={"plateau": 1.5})


def test_hungry_scores_match_lengths():
    prefs = make_builtin("hungry", 3)
    assert np.allclose(scores(prefs, 1, (1 / 3, 1 / 3, 1 / 3)), [1 / 3] * 3)
    assert np.allclose(scores(prefs, 2, (1.0, 0.0, 0.0)), [1, 0, 0])
    # a crumb below the margin is worthless
    s = scores(prefs, 1, (0.0005, 0.4995, 0.5))
    assert s[0] == 0.0 and s[1] > 0 and s[2] > 0


def test_gorbushka_scores_end_tiles_only():
    prefs = make_builtin("gorbushka", 3)
    s = scores(prefs, 1, (0.25, 0.25, 0.5))
    assert s[0] > 0 and s[2] > 0 and s[1] == 0.0


def test_gorbushka_degenerate_tiles_score_equally():
    prefs = make_builtin("gorbushka", 3)
    s = scores(prefs, 1, (0.0, 0.0, 1.0))
    assert s[0] == s[1] > 0


def test_burnt_prefers_degenerate_tiles():
    prefs = make_builtin("burnt", 3)
    s = scores(prefs, 1, (0.0, 0.0, 1.0))
    assert s[0] == s[1] == max(s)
    assert s[2] == min(s)


def test_scores_normalize_and_stay_nonnegative():
    for name in ("hungry", "gorbushka", "burnt", "piecewise_random"):
        prefs = make_builtin(name, 4, seed=3)
        rng = np.random.default_rng(0)
        for _ in range(50):
            z = rng.dirichlet(np.ones(4))
            s = scores(prefs, 1, tuple(z))
            assert (s >= 0).all()
            assert abs(s.sum() - 1.0) < 1e-12


def test_domain_mismatch_raises():
    old = make_builtin("hungry", 3)
    new = make_builtin("hungry", 3, kind=NEW, variant=gorbushka_join(3))
    point = point_from_barycentric(
        gorbushka_join(3), [(1, 1), (2, 2), (3, 3)], (1 / 3, 1 / 3, 1 / 3)
    )
    with pytest.raises(TypeError):
        scores(old, 1, point)
    with pytest.raises(TypeError):
        scores(new, 1, (1 / 3, 1 / 3, 1 / 3))
    with pytest.raises(ValueError):
        scores(old, 9, (1 / 3, 1 / 3, 1 / 3))


def test_new_style_hungry_scores_box_content():
    variant = gorbushka_join(3)
    prefs = make_builtin("hungry", 3, kind=NEW, variant=variant)
    point = point_from_barycentric(variant, [(1, 1), (2, 2), (3, 3)], (1 / 3, 1 / 3, 1 / 3))
    assert np.allclose(scores(prefs, 1, point), [1 / 3] * 3)
    # an empty box feeds nobody
    shared = point_from_barycentric(variant, [(1, 1), (2, 2), (1, 3)], (0.3, 0.3, 0.4))
    s = scores(prefs, 1, shared)
    assert s[2] == 0.0


def test_new_style_gorbushka_empty_boxes_when_all_cuts_at_zero():
    variant = gorbushka_join(3)
    prefs = make_builtin("gorbushka", 3, kind=NEW, variant=variant)
    point = canonicalize(Cut((0.0, 0.0)), {1: 3, 2: 3, 3: 3}, variant)
    s = scores(prefs, 1, point)
    assert s[0] == s[1] > PREFERENCE_TOL  # the two empty boxes
    assert np.allclose(s, [1 / 3] * 3)


def test_validate_covering_builtin_models():
    for name in ("hungry", "gorbushka", "burnt", "piecewise_random"):
        old = make_builtin(name, 3, seed=5)
        assert validate(old, "covering", 400, seed=1).passed
        new = make_builtin(name, 3, kind=NEW, variant=gorbushka_join(3), seed=5)
        assert validate(new, "covering", 400, seed=1).passed


def test_validate_covering_catches_non_covering_oracle():
    plain = make_builtin("gorbushka", 3, params={"dte": False})
    report = validate(plain, "covering", 600, seed=2)
    assert not report.passed
    assert report.violations


def test_validate_equivariance_builtin_models():
    for space in ("c1", "c2", "c3"):
        variant = for_space(space, 3)
        for name in ("hungry", "gorbushka", "burnt", "piecewise_random"):
            prefs = make_builtin(name, 3, kind=NEW, variant=variant, seed=4)
            report = validate(prefs, "equivariance", 300, seed=3, tol=1e-12)
            assert report.passed, (space, name, report.max_deviation)


def test_validate_equivariance_catches_shuffled_oracle():
    prefs = make_builtin("piecewise_random", 3, kind=NEW, variant=gorbushka_join(3), seed=4)
    broken = row_shuffled(prefs)
    report = validate(broken, "equivariance", 300, seed=3)
    assert not report.passed
    assert len(report.violations) >= 1


def test_validate_p_dte():
    assert validate(make_builtin("gorbushka", 3), "p_dte", 400, seed=0).passed
    assert validate(make_builtin("burnt", 3), "p_dte", 400, seed=0).passed
    assert validate(make_builtin("hungry", 3), "p_dte", 400, seed=0).passed
    # tables pin zero-length scores to 0, so even the random model treats
    # all degenerate tiles alike
    assert validate(make_builtin("piecewise_random", 3, seed=11), "p_dte", 400, seed=0).passed
    # an oracle that rates empty tiles differently per slot is caught
    flat = [[0.0, 1.0], [1.0, 1.0]]
    sloped = [[0.0, 0.2], [1.0, 1.0]]
    tables = {str(j): {"1": flat, "2": sloped, "3": flat} for j in (1, 2, 3)}
    report = validate(piecewise_from_tables(3, tables), "p_dte", 400, seed=0)
    assert not report.passed


def test_validate_p_pe():
    assert validate(make_builtin("hungry", 3), "p_pe", 300, seed=0).passed
    report = validate(make_builtin("gorbushka", 4), "p_pe", 300, seed=0)
    # moving a zero into the end slot flips which tiles count as gorbushkas
    assert not report.passed


def test_validate_continuity_builtins():
    for name in ("hungry", "gorbushka", "burnt", "piecewise_random"):
        prefs = make_builtin(name, 3, seed=6)
        assert validate(prefs, "continuity", 300, seed=5).passed, name


def test_validate_kind_checks():
    old = make_builtin("hungry", 3)
    new = make_builtin("hungry", 3, kind=NEW, variant=gorbushka_join(3))
    with pytest.raises(ValueError):
        validate(old, "equivariance")
    with pytest.raises(ValueError):
        validate(new, "p_dte")
    with pytest.raises(ValueError):
        validate(old, "flavor")


def test_piecewise_from_tables():
    tables = {
        str(j): {str(t): [[0.0, 0.2], [0.5, 1.0], [1.0, 0.0]] for t in (1, 2)}
        for j in (1, 2)
    }
    prefs = piecewise_from_tables(2, tables)
    s = scores(prefs, 1, (0.5, 0.5))
    assert np.allclose(s, [0.5, 0.5])
    with pytest.raises(ValueError):
        piecewise_from_tables(3, tables)


def test_sample_config_point_respects_variant():
    rng = np.random.default_rng(0)
    for space in ("c1", "c2", "c3"):
        variant = for_space(space, 3)
        for _ in range(20):
            point = sample_config_point(rng, variant, force_degenerate=True)
            assert point.variant == variant


def test_load_preference_file(tmp_path):
    path = tmp_path / "prefs.json"
    path.write_text(json.dumps({"r": 3, "kind": "new", "model": "hungry"}))
    prefs = load_preference_file(path, space="c1")
    assert prefs.kind == NEW and prefs.variant == gorbushka_join(3)

    path.write_text(json.dumps({"r": 3, "kind": "old", "model": "hungry", "reduction": "psi"}))
    lifted = load_preference_file(path, space="c1")
    assert lifted.kind == NEW and lifted.model == "psi(hungry)"

    path.write_text(json.dumps({"r": 2, "model": "hungry"}))
    with pytest.raises(ValueError):
        load_preference_file(path, space="c1", r=3)

    path.write_text(json.dumps({"r": 3, "model": "mystery"}))
    with pytest.raises(ValueError):
        load_preference_file(path)


def test_old_oracle_accepts_cut_objects():
    prefs = make_builtin("hungry", 3)
    s = scores(prefs, 1, Cut((1 / 3, 2 / 3)))
    assert np.allclose(s, [1 / 3] * 3)
