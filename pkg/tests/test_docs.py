import doctest

import multihomog


def test_package_docstring():
    res = doctest.testmod(multihomog)
    assert res.attempted > 0 and res.failed == 0
