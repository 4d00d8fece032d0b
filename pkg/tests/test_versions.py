import ncgraded.bin
import ncgraded.core
import ncgraded._version


def test_versions_in_modules():
    assert ncgraded.bin.__version__ == ncgraded._version.__version__
    assert ncgraded.core.__version__ == ncgraded._version.__version__
