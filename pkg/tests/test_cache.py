import json
import shutil

import numpy as np

from nlsff.cache import ThermoCache, cache_key
from nlsff.thermo import SERIAL_VERSION, solve_dressed


def test_hit_is_bitwise_identical(tmp_path):
    cache = ThermoCache(tmp_path)
    a = cache.model(2.0, 1.1, 32)
    b = cache.model(2.0, 1.1, 32)
    assert (cache.misses, cache.hits) == (1, 1)
    assert a.to_json() == b.to_json()
    np.testing.assert_array_equal(a.Z, solve_dressed(2.0, 1.1, 32).Z)


def test_key_depends_on_every_input():
    base = cache_key("model", 2.0, 1.1, 32)
    assert base != cache_key("model", 2.0, 1.1, 64)
    assert base != cache_key("model", 2.5, 1.1, 32)
    assert base != cache_key("model", 2.0, 1.2, 32)
    assert base != cache_key("fermi", 2.0, 1.1, 32)
    assert base == cache_key("model", 2.0, 1.1 + 1e-15, 32)


def test_corrupt_and_missing_entries_are_rebuilt(tmp_path):
    cache = ThermoCache(tmp_path)
    ref = cache.model(2.0, 1.1, 32).to_json()
    path = cache.path("model", 2.0, 1.1, 32)
    path.write_text("{not json")
    assert cache.model(2.0, 1.1, 32).to_json() == ref
    shutil.rmtree(tmp_path)
    assert cache.model(2.0, 1.1, 32).to_json() == ref
    assert cache.misses == 3 and cache.hits == 0


def test_outdated_version_is_rebuilt(tmp_path):
    cache = ThermoCache(tmp_path)
    cache.fermi_boundary(2.0, 0.5, 32)
    path = cache.path("fermi", 2.0, 0.5, 32)
    rec = json.loads(path.read_text())
    rec["version"] = SERIAL_VERSION + 100
    path.write_text(json.dumps(rec))
    q = cache.fermi_boundary(2.0, 0.5, 32)
    assert cache.misses == 2
    assert json.loads(path.read_text())["version"] == SERIAL_VERSION
    assert cache.fermi_boundary(2.0, 0.5, 32) == q and cache.hits == 1


def test_density_lookup_round_trip(tmp_path):
    cache = ThermoCache(tmp_path)
    model = cache.model_for_density(2.0, 0.5, 32)
    assert abs(model.density - 0.5) < 1e-10
