"""Mode-transformation matrices for the four-stage three-mode interferometer.

The device is a cascade of four four-wave mixers (FWMs) with phase
shifts inserted at the midpoint:

    FWM1 couples modes (1, 2)   -- first splitter arm
    FWM2 couples modes (1, 3)   -- second splitter arm
    phases phi1, phi2, phi3 on the three internal beams
    FWM3 couples modes (1, 3)   -- second recombiner arm
    FWM4 couples modes (1, 2)   -- first recombiner arm

Mode 1 is the bright beam threading all four mixers; modes 2 and 3 are
the conjugate beams of the (1,2) and (1,3) mixers.  Each FWM with gain
beta and pump phase theta acts on the column (a1, a2^dag, a3^dag) as a
hyperbolic rotation by beta/2 in its mode pair; the phase stage is
diagonal.  The total transform is the chronological matrix product and
is always pseudo-unitary (see lie.METRIC).

In the balanced configuration (beta4 = beta1, beta3 = beta2, recombiner
pump phases shifted by pi, all internal phases zero) the cascade undoes
itself and the total matrix is the identity, which is the working point
for phase estimation.
"""

from dataclasses import dataclass, replace

import numpy as np


def fwm_matrix(beta, theta, pair="12"):
    """3x3 transform of a single four-wave mixer on (a1, a2^dag, a3^dag).

    pair selects which conjugate mode the bright mode 1 couples to:
    "12" or "13".
    """
    ch, sh = np.cosh(beta / 2.0), np.sinh(beta / 2.0)
    ep, em = np.exp(1j * theta), np.exp(-1j * theta)
    if pair == "12":
        return np.array(
            [[ch, em * sh, 0], [ep * sh, ch, 0], [0, 0, 1]], dtype=complex
        )
    if pair == "13":
        return np.array(
            [[ch, 0, em * sh], [0, 1, 0], [ep * sh, 0, ch]], dtype=complex
        )
    raise ValueError(f"pair must be '12' or '13', got {pair!r}")


def phase_matrix(phi1, phi2, phi3):
    """Diagonal phase stage on (a1, a2^dag, a3^dag).

    The conjugate-mode entries pick up the opposite sign because the
    vector carries creation operators in slots 2 and 3.
    """
    return np.diag(
        [np.exp(1j * phi1), np.exp(-1j * phi2), np.exp(-1j * phi3)]
    ).astype(complex)


@dataclass(frozen=True)
class InterferometerConfig:
    """Gains, pump phases and internal phases of the four-FWM cascade."""

    beta1: float
    beta2: float
    beta3: float
    beta4: float
    theta1: float = 0.0
    theta2: float = 0.0
    theta3: float = np.pi
    theta4: float = np.pi
    phi1: float = 0.0
    phi2: float = 0.0
    phi3: float = 0.0

    @classmethod
    def balanced(cls, beta1, beta2, phi1=0.0, phi2=0.0, phi3=0.0):
        """Self-cancelling cascade: identity transform when all phases vanish."""
        return cls(
            beta1=beta1,
            beta2=beta2,
            beta3=beta2,
            beta4=beta1,
            theta1=0.0,
            theta2=0.0,
            theta3=np.pi,
            theta4=np.pi,
            phi1=phi1,
            phi2=phi2,
            phi3=phi3,
        )

    def with_phases(self, phi1, phi2, phi3):
        return replace(self, phi1=phi1, phi2=phi2, phi3=phi3)

    def stages(self):
        """Chronological list of stage descriptors (first applied first)."""
        return [
            ("fwm", self.beta1, self.theta1, "12"),
            ("fwm", self.beta2, self.theta2, "13"),
            ("phase", self.phi1, self.phi2, self.phi3),
            ("fwm", self.beta3, self.theta3, "13"),
            ("fwm", self.beta4, self.theta4, "12"),
        ]

    def stage_matrices(self):
        mats = []
        for st in self.stages():
            if st[0] == "fwm":
                mats.append(fwm_matrix(st[1], st[2], st[3]))
            else:
                mats.append(phase_matrix(st[1], st[2], st[3]))
        return mats

    def total_matrix(self):
        """Full input->output mode transform (chronological product)."""
        S = np.eye(3, dtype=complex)
        for m in self.stage_matrices():
            S = m @ S
        return S

    def mid_matrix(self):
        """Transform up to the midpoint (after both splitter FWMs)."""
        return fwm_matrix(self.beta2, self.theta2, "13") @ fwm_matrix(
            self.beta1, self.theta1, "12"
        )
