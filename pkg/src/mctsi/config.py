import os
import logging

from dotenv import load_dotenv

logger = logging.getLogger(__name__)


class MctsiConfig:
    def __init__(
            self,
            threads=1,
            enumeration_guard=12,
            dense_state_guard=2 ** 24,
            tol=1e-9,
            exhaustive_guard=10,
            local_set_cap=3,
            log_level="WARNING",
        ):

        self.threads = threads
        self.enumeration_guard = enumeration_guard
        self.dense_state_guard = dense_state_guard
        self.tol = tol
        self.exhaustive_guard = exhaustive_guard
        self.local_set_cap = local_set_cap
        self.log_level = log_level

    @classmethod
    def from_env(cls, **overrides):
        """Build a config from ``MCTSI_*`` environment variables (a ``.env`` file is honoured).

        Keyword overrides that are not None win over the environment.
        """
        load_dotenv()
        config = cls(
            threads=int(os.getenv("MCTSI_THREADS", 1)),
            enumeration_guard=int(os.getenv("MCTSI_ENUM_GUARD", 12)),
            dense_state_guard=int(os.getenv("MCTSI_DENSE_GUARD", 2 ** 24)),
            tol=float(os.getenv("MCTSI_TOL", 1e-9)),
            log_level=os.getenv("MCTSI_LOG_LEVEL", "WARNING"),
        )
        for name, value in overrides.items():
            if value is None:
                continue
            if not hasattr(config, name):
                raise ValueError(f"Unknown config option: {name}")
            setattr(config, name, value)
        if config.threads < 1:
            logger.warning(f"threads={config.threads} is not positive; using 1")
            config.threads = 1
        return config


DEFAULT_CONFIG = MctsiConfig()
