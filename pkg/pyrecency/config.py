"""This module contains code that handles run configuration

Values come from built-in defaults, then an optional JSON config file, then
command line flags; later sources win.
"""

import json
import logging
import pathlib
from typing import Any, Dict, List, Mapping, Optional

from pyrecency.errors import InputError, InvalidParameter
from pyrecency.filtering import FilterConfig
from pyrecency.mixing import UNBOUNDED, DecaySpec
from pyrecency.models import (
    GaussianObservation,
    GeneratorSpec,
    ObservationModel,
    Prior,
    TransitionKernel,
    parse_generator,
    parse_kernel,
    parse_model,
    parse_prior,
)

LOGGER = logging.getLogger(__name__)

DEFAULTS: Dict[str, Any] = {
    "beta": [0.5],
    "particles": 1000,
    "seed": 0,
    "steps": 20,
    "noise_std": 0.0,
    "obs_std": 1.0,
    "kernel": "identity",
    "model": "gaussian",
    "prior": "normal:0,1",
    "generator": None,
    "input": None,
    "output": None,
    "runs": 1,
    "jobs": 1,
    "max_lag": 5,
    "resampling": "multinomial",
    "horizon": None,
    "theta0": 1.0,
    "report": None,
}

PATH_KEYS = ("input", "output", "report")

# destinations and worker counts never change a result
UNRECORDED_KEYS = ("output", "report", "jobs")


def load_config_file(path: pathlib.Path) -> Dict[str, Any]:
    """Read a JSON config file whose keys are flag names"""
    path = pathlib.Path(path)
    if not path.is_file():
        raise InputError(f"config file {path} does not exist")
    try:
        values = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as error:
        raise InputError(f"malformed config file {path}: {error.msg}", error.lineno) from None
    if not isinstance(values, dict):
        raise InputError(f"config file {path} must hold a JSON object")

    values = {key.replace("-", "_"): value for key, value in values.items()}
    unknown = sorted(set(values) - set(DEFAULTS))
    if unknown:
        raise InvalidParameter(f"unknown config keys in {path}: {', '.join(unknown)}")
    return values


class RunConfig:
    """Merged configuration of one CLI invocation"""

    def __init__(self, command: str, values: Mapping[str, Any]) -> None:
        self.command: str = command
        self._values: Dict[str, Any] = dict(DEFAULTS)
        self._values.update(values)
        if not isinstance(self._values["beta"], list):
            self._values["beta"] = [self._values["beta"]]
        for key in PATH_KEYS:
            if self._values[key] is not None:
                self._values[key] = str(self._values[key])
        for key in ("particles", "steps", "runs", "jobs", "max_lag"):
            value = self._values[key]
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidParameter(f"{key} must be a positive integer, got {value!r}")

    @classmethod
    def from_sources(
        cls, command: str, flags: Mapping[str, Any], config_path: Optional[pathlib.Path] = None
    ) -> "RunConfig":
        """Merge a config file (if any) with flags; flags left as None do not override"""
        values: Dict[str, Any] = {}
        if config_path is not None:
            values.update(load_config_file(config_path))
        values.update({key: value for key, value in flags.items() if value is not None})
        LOGGER.debug("Configuration for %s: %s", command, values)
        return cls(command, values)

    def __getattr__(self, name: str) -> Any:
        try:
            return self.__dict__["_values"][name]
        except KeyError:
            raise AttributeError(name) from None

    @property
    def betas(self) -> List[float]:
        """All requested rates of decrease"""
        return [float(beta) for beta in self._values["beta"]]

    @property
    def single_beta(self) -> float:
        """The one rate of decrease of a single-beta command

        Raises InvalidParameter when --beta was given more than once."""
        betas = self.betas
        if len(betas) > 1:
            raise InvalidParameter(
                f"{self.command} takes a single --beta, got {len(betas)}: {betas}"
            )
        return betas[0]

    @property
    def input_path(self) -> Optional[pathlib.Path]:
        """Observation input file, if any"""
        return None if self.input is None else pathlib.Path(self.input)

    @property
    def output_path(self) -> Optional[pathlib.Path]:
        """Output file; None writes to stdout"""
        return None if self.output is None else pathlib.Path(self.output)

    def decay(self) -> DecaySpec:
        """DecaySpec of the single beta"""
        horizon = UNBOUNDED if self.horizon is None else self.horizon
        return DecaySpec(self.single_beta, theta0=self.theta0, horizon=horizon)

    def transition_kernel(self) -> TransitionKernel:
        """Parsed --kernel"""
        return parse_kernel(self.kernel)

    def prior_distribution(self) -> Prior:
        """Parsed --prior"""
        return parse_prior(self.prior)

    def observation_model(self) -> ObservationModel:
        """Parsed --model; a bare 'gaussian' takes its std from --obs-std"""
        if self.model.strip() == "gaussian":
            return GaussianObservation(self.obs_std)
        return parse_model(self.model)

    def generator_spec(self) -> GeneratorSpec:
        """Parsed --generator of length --steps"""
        if self.generator is None:
            raise InvalidParameter("no generator configured")
        observation = "bernoulli" if self.model.startswith("bernoulli") else "gaussian"
        return parse_generator(self.generator, self.steps, self.seed, self.obs_std, observation)

    def filter_config(self) -> FilterConfig:
        """FilterConfig built from the merged values"""
        return FilterConfig(
            particles=self.particles,
            decay=self.decay(),
            obs_model=self.observation_model(),
            noise_std=self.noise_std,
            kernel=self.transition_kernel(),
            prior=self.prior_distribution(),
            seed=self.seed,
            resampling=self.resampling,
        )

    def check_single_source(self) -> None:
        """Exactly one of --input and --generator must be given

        Raises InputError when neither is, InvalidParameter when both are."""
        if self.input is None and self.generator is None:
            raise InputError("no observations: give --input or --generator")
        if self.input is not None and self.generator is not None:
            raise InvalidParameter("give only one of --input and --generator")

    def to_dict(self) -> Dict[str, Any]:
        """Merged values that shape the results, for output headers"""
        values = {key: value for key, value in self._values.items() if key not in UNRECORDED_KEYS}
        return dict(values, command=self.command)

    def __repr__(self):
        return f"RunConfig(command={self.command}, values={self._values})"
