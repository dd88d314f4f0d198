"""
Tests for the exception types and the context they carry.
"""

from src.core.exceptions import (
    DataValidationError,
    DimensionError,
    DomainError,
    IntegrationHalt,
    PoleError,
    SamplingError,
    TruncationError,
    UnknownCheckError,
)


def test_messages_are_the_string_form():
    for error in (
        TruncationError("series did not converge"),
        PoleError("at a pole"),
        DomainError("out of range"),
        DimensionError("too large"),
        UnknownCheckError("unknown"),
        SamplingError("all rejected"),
        IntegrationHalt("halted"),
        DataValidationError("invalid"),
    ):
        assert str(error) == error.message


def test_context_attributes():
    assert TruncationError("t", last_term=1e-3, terms_used=200).terms_used == 200
    assert PoleError("p", argument=1j, distance=0.0).argument == 1j
    assert DomainError("d", parameter="tau", value=0.01j).parameter == "tau"
    assert DimensionError("x", expected=4096, actual=8192).actual == 8192
    assert SamplingError("s", check_id="heat", attempts=200).attempts == 200
    assert DataValidationError("v", field_name="seed", value=-1).field_name == "seed"


def test_halt_keeps_partial_trajectory():
    assert IntegrationHalt("h").trajectory == []
    halt = IntegrationHalt("h", reason="pole_approach", trajectory=[1, 2])
    assert halt.reason == "pole_approach"
    assert halt.trajectory == [1, 2]
