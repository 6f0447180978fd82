import numpy as np
import pytest

from blendplan import DemandVector, RecipeMatrix, StockVector, validate_recipes
from blendplan import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # pay JIT compilation once, outside any timed assertions
    _kernels.warm_up()


@pytest.fixture()
def worked_recipes() -> RecipeMatrix:
    return validate_recipes(
        ["BLEND1", "BLEND2"], ["C1", "C2", "C3"], [[0.5, 0.5, 0.0], [0.2, 0.3, 0.5]]
    )


@pytest.fixture()
def worked_stock() -> StockVector:
    return StockVector(np.array([10.0, 9.0, 5.0]))


@pytest.fixture()
def worked_demand() -> DemandVector:
    return DemandVector(np.array([4.0, 2.0]))
