import math

import numpy as np
import pytest

from qupid.datasets import (
    LabeledCloudSet,
    OrbitParams,
    generate_orbit,
    generate_orbit_dataset,
    generate_pattern,
    generate_pattern_set,
    list_items,
    orbit_points,
    read_cloud_csv,
    read_dataset,
    write_cloud_csv,
    write_dataset,
)
from qupid.rng import Xoshiro256, derive_seed, splitmix64


def test_splitmix64_reference_value():
    # first output of the reference splitmix64 seeded with 0
    _, out = splitmix64(0)
    assert out == 0xE220A8397B1DCDAF


def test_xoshiro_reference_stream():
    r = Xoshiro256(0)
    r._s = [1, 2, 3, 4]
    assert [r.next_u64() for _ in range(4)] == [11520, 0, 1509978240, 1215971899390074240]


def test_random_is_53_bit_unit_interval():
    r = Xoshiro256(123)
    vals = [r.random() for _ in range(1000)]
    assert all(0 <= v < 1 for v in vals)
    assert all((v * 2**53) == int(v * 2**53) for v in vals)


def test_randbelow_and_seed_derivation():
    r = Xoshiro256(5)
    assert {r.randbelow(3) for _ in range(300)} == {0, 1, 2}
    assert derive_seed(7, 0, 1) != derive_seed(7, 1, 0)
    assert derive_seed(7, 2) == derive_seed(7, 2)


def test_orbit_first_step():
    pts = orbit_points(3.5, 2, 0.5, 0.5)
    assert pts[1].tolist() == [0.375, 0.3203125]


def test_orbit_fixed_point():
    assert np.all(generate_orbit(OrbitParams(4.1, 20, 0), start=(0.0, 0.0)).points == 0)


def test_orbit_determinism_and_range():
    a = generate_orbit(OrbitParams(4.3, 300, 99)).points
    b = generate_orbit(OrbitParams(4.3, 300, 99)).points
    assert a.tobytes() == b.tobytes()
    assert np.all((a >= 0) & (a < 1))
    assert a.shape == (300, 2)


def test_orbit_params_validation():
    with pytest.raises(ValueError):
        OrbitParams(2.5, 0)
    with pytest.raises(ValueError):
        OrbitParams(0.0, 10)


def test_orbit_dataset_shapes():
    one = generate_orbit_dataset([2.5], 1, 10, 0)
    assert len(one) == 1 and one.labels == [0]
    five = generate_orbit_dataset([2.5, 3.5, 4.0, 4.1, 4.3], 50, 20, 7)
    assert len(five) == 250
    assert np.bincount(five.labels).tolist() == [50] * 5
    again = generate_orbit_dataset([2.5, 3.5, 4.0, 4.1, 4.3], 50, 20, 7)
    assert all(a.points.tobytes() == b.points.tobytes() for a, b in zip(five.clouds, again.clouds))


def test_patterns():
    u = generate_pattern("uniform", 10, 1).points
    assert u.shape == (10, 2) and np.all((u >= 0) & (u <= 1))
    c = generate_pattern("circles", 200, 3, jitter=0.0, background=0.0).points
    d1 = np.hypot(c[:, 0] - 0.3, c[:, 1] - 0.5)
    d2 = np.hypot(c[:, 0] - 0.72, c[:, 1] - 0.5)
    on_circle = np.isclose(d1, 0.2, atol=1e-12) | np.isclose(d2, 0.12, atol=1e-12)
    assert on_circle.all()
    a = generate_pattern_set(["circles", "clusters", "uniform"], 4, 50, 11)
    b = generate_pattern_set(["circles", "clusters", "uniform"], 4, 50, 11)
    assert sorted(set(a.labels)) == [0, 1, 2]
    assert all(x.points.tobytes() == y.points.tobytes() for x, y in zip(a.clouds, b.clouds))
    with pytest.raises(ValueError):
        generate_pattern("spirals", 10, 0)


def test_labeled_set_validation():
    with pytest.raises(ValueError):
        LabeledCloudSet([np.zeros((1, 2))], [0, 1])
    with pytest.raises(ValueError):
        LabeledCloudSet([np.zeros((1, 2))], [3], ["a", "b"])


def test_cloud_csv_round_trip(tmp_path):
    pts = np.array([[0.1, 1 / 3], [math.pi, 2.0 ** -40]])
    write_cloud_csv(tmp_path / "c.csv", pts)
    assert read_cloud_csv(tmp_path / "c.csv").points.tolist() == pts.tolist()


def test_dataset_round_trip(tmp_path):
    data = generate_orbit_dataset([2.5, 4.0], 3, 15, 1)
    write_dataset(tmp_path, data, {"seed": 1})
    items = list_items(tmp_path)
    assert [(it.label, it.stem) for it in items] == [(0, "0000"), (0, "0001"), (0, "0002"),
                                                      (1, "0000"), (1, "0001"), (1, "0002")]
    back = read_dataset(tmp_path)
    assert back.class_names == ["rho=2.5", "rho=4"]
    assert all(a.points.tolist() == b.points.tolist() for a, b in zip(data.clouds, back.clouds))
