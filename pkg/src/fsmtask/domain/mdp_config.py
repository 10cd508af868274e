"""Value iteration and cloud model configuration."""

from dataclasses import dataclass

from .mdp import DEFAULT_GAMMA, DEFAULT_MAX_ITERS, DEFAULT_TOL, CloudModel


@dataclass
class MdpConfig:
    """Typed configuration for the cloud-aware tasking MDP.

    Attributes:
        gamma: Discount factor in (0, 1)
        tol: Sup-norm residual below which value iteration stops
        max_iters: Maximum number of Bellman sweeps
        p_init: p(C=1)
        p10: p(C'=1|C=0)
        p11: p(C'=1|C=1)
    """

    gamma: float = DEFAULT_GAMMA
    tol: float = DEFAULT_TOL
    max_iters: int = DEFAULT_MAX_ITERS
    p_init: float = 0.2
    p10: float = 0.5
    p11: float = 0.5

    @property
    def cloud_model(self) -> CloudModel:
        return CloudModel(p_init=self.p_init, p_1_given_0=self.p10, p_1_given_1=self.p11)

    @classmethod
    def from_dict(cls, data: dict) -> "MdpConfig":
        return cls(
            gamma=float(data.get("gamma", DEFAULT_GAMMA)),
            tol=float(data.get("tol", DEFAULT_TOL)),
            max_iters=int(data.get("max_iters", DEFAULT_MAX_ITERS)),
            p_init=float(data.get("p_init", 0.2)),
            p10=float(data.get("p10", 0.5)),
            p11=float(data.get("p11", 0.5)),
        )

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "tol": self.tol,
            "max_iters": self.max_iters,
            "p_init": self.p_init,
            "p10": self.p10,
            "p11": self.p11,
        }

    def validate(self) -> bool:
        """Validate configuration values.

        Raises:
            ValueError: If a value is out of range
        """
        if not 0.0 < self.gamma < 1.0:
            raise ValueError("gamma must lie in (0, 1)")

        if not self.tol > 0.0:
            raise ValueError("tol must be positive")

        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")

        for name in ("p_init", "p10", "p11"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1]")

        return True
