import pytest
from hypothesis import settings

from cbpv.semantics import algebra_model, atoms, make_monad, storage_model
from cbpv.syntax import BaseT, Signature

settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repro")


@pytest.fixture
def choice_sig():
    return Signature.build(["b"], [], [("or", 2), ("fail", 0)])


@pytest.fixture
def ab():
    return atoms(["a", "b"])


@pytest.fixture
def pfin_model(choice_sig, ab):
    return algebra_model(make_monad("pfin"), choice_sig, {"b": ab})


@pytest.fixture
def list_model(choice_sig, ab):
    return algebra_model(make_monad("list"), choice_sig, {"b": ab})


@pytest.fixture
def state_model(ab):
    return storage_model(["s0", "s1"], {"b": ab})


B = BaseT("b")
