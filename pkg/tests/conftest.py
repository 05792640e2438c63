import numpy as np
import pytest


@pytest.fixture(scope="session")
def mnist_idx(tmp_path_factory):
    """The 5000-image MNIST subset shipped with mlxtend, written as gzipped IDX files."""
    mlxtend_data = pytest.importorskip("mlxtend.data")
    from accuracy_limit.fileio import write_idx
    x, y = mlxtend_data.mnist_data()
    d = tmp_path_factory.mktemp("mnist")
    images = write_idx(d / "images-idx3-ubyte.gz", np.asarray(x, dtype=np.uint8).reshape(-1, 28, 28))
    labels = write_idx(d / "labels-idx1-ubyte.gz", np.asarray(y, dtype=np.uint8))
    return images, labels
