from enum import StrEnum


class MechanismKind(StrEnum):
    RR = 'rr'
    RAPPOR = 'rappor'
    HR = 'hr'
    HRPair = 'hr-pair'
    RAPTOR = 'raptor'
    RAPTOR2 = 'raptor2'


class Decision(StrEnum):
    Uniform = 'uniform'
    NotUniform = 'not_uniform'
    Unbiased = 'unbiased'
    Biased = 'biased'
    Close = 'close'
    Far = 'far'
    Independent = 'independent'
    NotIndependent = 'not_independent'

    @property
    def rejects(self) -> bool:
        """True for the decisions that reject the null hypothesis"""
        return self in REJECTING_DECISIONS


REJECTING_DECISIONS = frozenset({
    Decision.NotUniform,
    Decision.Biased,
    Decision.Far,
    Decision.NotIndependent,
})


class TestKind(StrEnum):
    RapporUniformity = 'rappor-uniformity'
    HadamardUniformity = 'hr-uniformity'
    RaptorUniformity = 'raptor-uniformity'
    BinaryUniformity = 'binary-uniformity'
    BiasTest = 'bias'
    L2Closeness = 'l2-closeness'
    ChiSquare = 'adk-chi2'
    HadamardIndependence = 'hr-independence'
    RaptorIndependence = 'raptor-independence'
    BinaryIndependence = 'binary-independence'

    @property
    def is_independence(self) -> bool:
        return self in (
            TestKind.HadamardIndependence,
            TestKind.RaptorIndependence,
            TestKind.BinaryIndependence,
        )

    @property
    def mechanism(self) -> MechanismKind:
        """Mechanism whose reports the test consumes"""
        return TEST_MECHANISMS[self]


TEST_MECHANISMS = {
    TestKind.RapporUniformity: MechanismKind.RAPPOR,
    TestKind.HadamardUniformity: MechanismKind.HR,
    TestKind.RaptorUniformity: MechanismKind.RAPTOR,
    TestKind.BinaryUniformity: MechanismKind.RR,
    TestKind.BiasTest: MechanismKind.RAPTOR,
    TestKind.L2Closeness: MechanismKind.HR,
    TestKind.ChiSquare: MechanismKind.HRPair,
    TestKind.HadamardIndependence: MechanismKind.HRPair,
    TestKind.RaptorIndependence: MechanismKind.RAPTOR2,
    TestKind.BinaryIndependence: MechanismKind.RAPTOR2,
}


class InstanceKind(StrEnum):
    Uniform = 'uniform'
    Paninski = 'paninski'
    UniformJoint = 'uniform-joint'
    BalancedPaninskiJoint = 'balanced-paninski-joint'
    File = 'file'

    @property
    def is_joint(self) -> bool:
        return self in (InstanceKind.UniformJoint, InstanceKind.BalancedPaninskiJoint)


class ReportFormat(StrEnum):
    CSV = 'csv'
    JSON = 'json'


__all__ = (
    'Decision',
    'InstanceKind',
    'MechanismKind',
    'ReportFormat',
    'TestKind',
)
