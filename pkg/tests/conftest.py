import json
import shutil

import pytest

from wapshop.cli import default_seed_path
from wapshop.journey import SimClock
from wapshop.shop import Store
from wapshop.storefront import Storefront


@pytest.fixture
def seeded_store(tmp_path) -> Store:
    path = tmp_path / "store.json"
    shutil.copyfile(default_seed_path(), path)
    return Store(str(path))


@pytest.fixture
def admins() -> dict:
    from importlib import resources
    with resources.files("wapshop.data").joinpath("admins.json").open() as f:
        return json.load(f)


@pytest.fixture
def storefront(seeded_store, admins) -> Storefront:
    return Storefront(seeded_store, admins=admins, clock=SimClock())
