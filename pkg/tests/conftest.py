import pytest

from crystalwalk import build_root_system, make_params, minuscule_crystal


@pytest.fixture(scope="session")
def gl2():
    spec = build_root_system("A", 1)
    crystal = minuscule_crystal(spec, spec.fundamental(1))
    return spec, crystal


@pytest.fixture(scope="session")
def gl3():
    spec = build_root_system("A", 2)
    crystal = minuscule_crystal(spec, spec.fundamental(1))
    return spec, crystal


@pytest.fixture(scope="session")
def c2():
    spec = build_root_system("C", 2)
    crystal = minuscule_crystal(spec, spec.fundamental(1))
    return spec, crystal


@pytest.fixture(scope="session")
def c3():
    spec = build_root_system("C", 3)
    crystal = minuscule_crystal(spec, spec.fundamental(1))
    return spec, crystal


@pytest.fixture(scope="session")
def b3():
    spec = build_root_system("B", 3)
    crystal = minuscule_crystal(spec, spec.fundamental(3))
    return spec, crystal


@pytest.fixture(scope="session")
def d4():
    spec = build_root_system("D", 4)
    crystal = minuscule_crystal(spec, spec.fundamental(4))
    return spec, crystal


@pytest.fixture(scope="session")
def gl2_params(gl2):
    spec, crystal = gl2
    return make_params(spec, crystal, (3 / 7,))


@pytest.fixture(scope="session")
def c2_params(c2):
    spec, crystal = c2
    return make_params(spec, crystal, (0.5, 0.5))


@pytest.fixture(scope="session")
def all_minuscule_systems(gl3, c2, c3, b3, d4):
    """The five reference systems used throughout the exhaustive checks."""
    return [gl3, c2, c3, b3, d4]
