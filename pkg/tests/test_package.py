import partial_copula as pc
from partial_copula import __version__


def test_version():
    assert __version__ == "0.1.0"


def test_public_api():
    cop = pc.make_copula(pc.FamilySpec.of("Frank3", 2.0))
    partial = pc.partial_copula(cop, pc.PartialMode.CLOSED_FORM)
    assert isinstance(partial.underlying.closed_partial, pc.FrankPartial2)
    assert issubclass(pc.ParameterOutOfRange, pc.CopulaError)
    assert issubclass(pc.OptimizerDiverged, pc.EstimationError)


if __name__ == "__main__":
    test_version()
    test_public_api()
    print("Done")
